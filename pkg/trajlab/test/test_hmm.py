import unittest
from collections import Counter

import numpy as np

from trajlab._analysis import classify
from trajlab._const import CLASS_STATIONARY
from trajlab._core import Rect, Scene, SeededRng, Trajectory
from trajlab._exceptions import (
    ConfigError, DataError, InvalidTransitionError, MissingStateLogError,
    OverlappingAgentsError)
from trajlab._hmm import (
    HmmAgentConfig, HmmState, SceneConfig, default_transition,
    estimate_state_occupancy, sample_chain, simulate_scene,
    stationary_distribution, validate_transition)

FORCED_WALK = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 1.0],
]

FORCED_WAIT = [[0.0, 1.0, 0.0, 0.0, 0.0]] * 4 + [[0.0, 0.0, 0.0, 0.0, 1.0]]


def walker(start, goal, speed=1.0):
    return HmmAgentConfig(start, goal, speed, transition=FORCED_WALK)


class TransitionTestCase(unittest.TestCase):
    def test_default_is_valid(self):
        matrix = default_transition()
        self.assertEqual(matrix.shape, (5, 5))
        np.testing.assert_allclose(matrix.sum(axis=1), 1.0)

    def test_invalid_matrices(self):
        bad_row = [row[:] for row in FORCED_WALK]
        bad_row[1] = [0.5, 0.4, 0.0, 0.0, 0.0]
        leaky_goal = [row[:] for row in FORCED_WALK]
        leaky_goal[4] = [0.1, 0.0, 0.0, 0.0, 0.9]
        entering_goal = [row[:] for row in FORCED_WALK]
        entering_goal[0] = [0.9, 0.0, 0.0, 0.0, 0.1]
        negative = [row[:] for row in FORCED_WALK]
        negative[2] = [1.5, -0.5, 0.0, 0.0, 0.0]
        for matrix in (bad_row, leaky_goal, entering_goal, negative, np.eye(4), 'walk'):
            with self.subTest(matrix=matrix):
                with self.assertRaises(InvalidTransitionError):
                    validate_transition(matrix)

    def test_chain_converges(self):
        matrix = default_transition()
        chain = sample_chain(matrix, HmmState.WALK, 50000, SeededRng(4))
        counts = Counter(chain)
        expected = stationary_distribution(matrix)
        for state in (HmmState.WALK, HmmState.WAIT, HmmState.TURN):
            with self.subTest(state=state):
                self.assertAlmostEqual(counts[state] / len(chain), expected[state], delta=0.02)
        self.assertEqual(expected[HmmState.GOAL_REACHED], 0.0)
        self.assertAlmostEqual(sum(expected.values()), 1.0)


class SceneConfigTestCase(unittest.TestCase):
    def test_default_file(self):
        cfg = SceneConfig.default()
        self.assertEqual(len(cfg.agents), 3)
        self.assertEqual(cfg.bounds, Rect(0.0, 100.0, 0.0, 100.0))
        again = SceneConfig.from_dict(cfg.to_dict())
        self.assertEqual(again.max_frames, cfg.max_frames)

    def test_overlapping_agents(self):
        with self.assertRaises(OverlappingAgentsError):
            SceneConfig((walker((10.0, 10.0), (20.0, 10.0)),
                         walker((10.5, 10.0), (0.0, 10.0))))

    def test_invalid(self):
        with self.assertRaises(ConfigError):
            SceneConfig((walker((10.0, 10.0), (20.0, 10.0)),), collision_radius=5.0,
                        detection_radius=5.0)
        with self.assertRaises(ConfigError):
            SceneConfig((walker((200.0, 10.0), (20.0, 10.0)),))
        with self.assertRaises(ConfigError):
            HmmAgentConfig((0.0, 0.0), (1.0, 1.0), base_speed=0.0)


class SimulationTestCase(unittest.TestCase):
    def test_lone_walker_reaches_goal(self):
        cfg = SceneConfig((walker((10.0, 50.0), (15.0, 50.0)),), heading_noise_deg=0.0)
        scene = simulate_scene(cfg, SeededRng(0))
        t = scene.trajectory(0)
        self.assertEqual(len(t), 20)
        distance = np.linalg.norm(t.points - [15.0, 50.0], axis=1)
        self.assertTrue(np.all(np.diff(distance[:5]) < 0))
        # arrival is within the collision radius of the goal
        np.testing.assert_allclose(t.points[4], [14.0, 50.0], atol=1e-9)
        np.testing.assert_allclose(t.points[4:], np.tile(t.points[4], (16, 1)))
        states = scene.state_log[0]
        self.assertEqual(states[:4], (HmmState.WALK,) * 4)
        self.assertEqual(states[4:], (HmmState.GOAL_REACHED,) * 16)
        self.assertEqual(len(states), len(t))

    def test_noisy_walker_approaches_goal(self):
        cfg = SceneConfig((walker((20.0, 50.0), (35.0, 50.0)),))
        for seed in range(10):
            with self.subTest(seed=seed):
                scene = simulate_scene(cfg, SeededRng(seed))
                distance = np.linalg.norm(scene.trajectory(0).points - [35.0, 50.0], axis=1)
                arrival = scene.state_log[0].index(HmmState.GOAL_REACHED)
                self.assertTrue(np.all(np.diff(distance[:arrival + 1]) < 0))

    def test_waiting_agent_is_stationary(self):
        agent = HmmAgentConfig((30.0, 30.0), (60.0, 30.0), transition=FORCED_WAIT)
        scene = simulate_scene(SceneConfig((agent,)), SeededRng(5))
        t = scene.trajectory(0)
        np.testing.assert_array_equal(t.points, np.tile([30.0, 30.0], (20, 1)))
        self.assertEqual(classify(t), CLASS_STATIONARY)
        self.assertEqual(set(scene.state_log[0]), {HmmState.WAIT})

    def test_head_on_agents_keep_apart(self):
        cfg = SceneConfig((walker((40.0, 50.0), (60.0, 50.0)),
                           walker((60.0, 50.0), (40.0, 50.0))))
        apart, avoided = 0, 0
        for seed in range(100):
            scene = simulate_scene(cfg, SeededRng(seed))
            a, b = scene.trajectory(0).points, scene.trajectory(1).points
            if np.linalg.norm(a - b, axis=1).min() >= cfg.collision_radius:
                apart += 1
            if HmmState.IMPENDING_COLLISION in scene.state_log[0]:
                avoided += 1
        self.assertGreaterEqual(apart, 90)
        self.assertEqual(avoided, 100)

    def test_avoidance_side_is_kept(self):
        cfg = SceneConfig((walker((40.0, 50.0), (60.0, 50.0)),
                           walker((60.0, 50.0), (40.0, 50.0))))
        for seed in range(10):
            scene = simulate_scene(cfg, SeededRng(seed))
            for agent_id in (0, 1):
                states = scene.state_log[agent_id]
                steps = np.diff(scene.trajectory(agent_id).points[:, 1])
                sides = {np.sign(steps[frame]) for frame in range(len(steps))
                         if states[frame] is HmmState.IMPENDING_COLLISION}
                with self.subTest(seed=seed, agent=agent_id):
                    self.assertEqual(len(sides), 1)

    def test_positions_stay_in_bounds(self):
        cfg = SceneConfig((HmmAgentConfig((1.0, 1.0), (-50.0, -50.0), 3.0),),
                          bounds=Rect(0.0, 10.0, 0.0, 10.0))
        scene = simulate_scene(cfg, SeededRng(2))
        self.assertTrue(cfg.bounds.contains(scene.trajectory(0).points))

    def test_reproducible(self):
        cfg = SceneConfig.default()
        first = simulate_scene(cfg, SeededRng(9))
        second = simulate_scene(cfg, SeededRng(9))
        self.assertEqual(first, second)
        self.assertEqual(first.state_log, second.state_log)

    def test_no_agents(self):
        with self.assertRaises(ConfigError):
            simulate_scene(SceneConfig(()), SeededRng(0))


class OccupancyTestCase(unittest.TestCase):
    def test_counts_sum_to_frames(self):
        cfg = SceneConfig.default()
        scene = simulate_scene(cfg, SeededRng(3))
        occupancy = estimate_state_occupancy(scene, cfg)
        for agent_id, counts in occupancy.items():
            with self.subTest(agent=agent_id):
                self.assertEqual(sum(counts.values()), cfg.max_frames)

    def test_missing_log(self):
        t = Trajectory(np.zeros((3, 2)))
        with self.assertRaises(MissingStateLogError):
            estimate_state_occupancy(Scene(((0, t),)))
        with self.assertRaises(DataError):
            estimate_state_occupancy(Scene(((0, t),), state_log={0: ('walk',)}))
