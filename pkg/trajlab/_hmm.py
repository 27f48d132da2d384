# -*- coding: utf-8 -*-
"""
    trajlab.hmm
    ~~~~~~~~~~~

    Multi-agent scene generator driven by a five state interaction chain
    (walk, wait, turn, impending collision, goal reached), emulating a
    static-drone recording of pedestrians.

    Every agent decides one state per frame from its transition row; that
    state moves it from the current frame to the next. A neighbour inside
    the detection radius that is closing in forces the impending collision
    state, and arriving within the collision radius of the goal forces the
    absorbing goal reached state.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import enum
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional, Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import (
    COLLISION_SLOWDOWN, DEFAULT_DT, DEFAULT_HEADING_NOISE_DEG,
    DEFAULT_OBS_LEN, DEFAULT_PRED_LEN, DEFAULT_TURN_MAX_DEG, HMM_DEFAULT_FILE)
from trajlab._core import Rect, Scene, Trajectory
from trajlab._exceptions import (
    ConfigError, DataError, InvalidTransitionError, MissingStateLogError,
    OverlappingAgentsError)
from trajlab._io import read_package_json

# local constants
LOGGER = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9


class HmmState(str, enum.Enum):
    WALK = 'walk'
    WAIT = 'wait'
    TURN = 'turn'
    IMPENDING_COLLISION = 'impending_collision'
    GOAL_REACHED = 'goal_reached'


STATES = tuple(HmmState)
STATE_INDEX = {state: i for i, state in enumerate(STATES)}
GOAL = STATE_INDEX[HmmState.GOAL_REACHED]


def validate_transition(matrix):
    """Returns ``matrix`` as a 5x5 array or raises InvalidTransitionError"""
    try:
        matrix = np.array(matrix, dtype=np.float64)
    except (TypeError, ValueError):
        raise InvalidTransitionError("transition matrix is not numeric") from None
    if matrix.shape != (len(STATES), len(STATES)):
        raise InvalidTransitionError("transition matrix must be %dx%d, got %s"
                                     % (len(STATES), len(STATES), matrix.shape))
    if not np.all(np.isfinite(matrix)) or np.any(matrix < 0):
        raise InvalidTransitionError("transition probabilities must be finite and >= 0")
    if np.any(np.abs(matrix.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
        raise InvalidTransitionError("transition rows must sum to 1")
    if matrix[GOAL, GOAL] != 1.0:
        raise InvalidTransitionError("goal_reached must be absorbing")
    if np.any(np.delete(matrix[:, GOAL], GOAL) != 0.0):
        raise InvalidTransitionError("goal_reached is entered by arrival only")
    matrix.setflags(write=False)
    return matrix


def default_transition():
    return validate_transition(read_package_json(HMM_DEFAULT_FILE)['transition'])


def _draw_state(row, u):
    index = int(np.searchsorted(np.cumsum(row), u, side='right'))
    return STATES[min(index, len(STATES) - 1)]


def sample_chain(transition, start, steps, rng):
    """Free-running chain of ``steps`` states beginning with ``start``"""
    transition = validate_transition(transition)
    state = HmmState(start)
    draws = rng.uniform(size=steps - 1)
    chain = [state]
    for u in draws:
        state = _draw_state(transition[STATE_INDEX[state]], u)
        chain.append(state)
    return chain


def stationary_distribution(transition, start=HmmState.WALK):
    """Stationary distribution of the chain restricted to the states
    reachable from ``start``; zero for every other state."""
    transition = validate_transition(transition)
    reachable, queue = {STATE_INDEX[HmmState(start)]}, deque([STATE_INDEX[HmmState(start)]])
    while queue:
        for j in np.flatnonzero(transition[queue.popleft()] > 0):
            if j not in reachable:
                reachable.add(int(j))
                queue.append(int(j))
    index = sorted(reachable)
    sub = transition[np.ix_(index, index)]
    system = np.vstack([sub.T - np.eye(len(index)), np.ones(len(index))])
    rhs = np.concatenate([np.zeros(len(index)), [1.0]])
    solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
    distribution = dict.fromkeys(STATES, 0.0)
    for i, p in zip(index, solution):
        distribution[STATES[i]] = float(max(p, 0.0))
    return distribution


@dataclass(frozen=True)
class HmmAgentConfig:
    start: Tuple[float, float]
    goal: Tuple[float, float]
    base_speed: float = 1.0
    transition: Optional[np.ndarray] = None
    initial_state: HmmState = HmmState.WALK

    def __post_init__(self):
        object.__setattr__(self, 'start', tuple(float(v) for v in self.start))
        object.__setattr__(self, 'goal', tuple(float(v) for v in self.goal))
        if len(self.start) != 2 or len(self.goal) != 2:
            raise ConfigError("start and goal must be 2D points")
        if not self.base_speed > 0:
            raise ConfigError("base_speed must be positive")
        transition = default_transition() if self.transition is None else self.transition
        object.__setattr__(self, 'transition', validate_transition(transition))
        object.__setattr__(self, 'initial_state', HmmState(self.initial_state))

    @classmethod
    def from_dict(cls, values, transition=None):
        values = dict(values)
        values.setdefault('transition', transition)
        try:
            return cls(**values)
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid agent config: %s" % err) from None

    def to_dict(self):
        return {'start': list(self.start), 'goal': list(self.goal),
                'base_speed': self.base_speed,
                'transition': self.transition.tolist(),
                'initial_state': self.initial_state.value}


@dataclass(frozen=True)
class SceneConfig:
    agents: Tuple[HmmAgentConfig, ...]
    bounds: Rect = field(default_factory=lambda: Rect(0.0, 100.0, 0.0, 100.0))
    collision_radius: float = 1.0
    detection_radius: float = 5.0
    max_frames: int = DEFAULT_OBS_LEN + DEFAULT_PRED_LEN
    heading_noise_deg: float = DEFAULT_HEADING_NOISE_DEG
    turn_max_deg: float = DEFAULT_TURN_MAX_DEG
    dt: float = DEFAULT_DT

    def __post_init__(self):
        object.__setattr__(self, 'agents', tuple(self.agents))
        if not 0 < self.collision_radius < self.detection_radius:
            raise ConfigError("need detection_radius > collision_radius > 0")
        if int(self.max_frames) != self.max_frames or self.max_frames < 2:
            raise ConfigError("max_frames must be an integer >= 2")
        if self.heading_noise_deg < 0 or self.turn_max_deg < 0:
            raise ConfigError("angles must be >= 0")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        for agent in self.agents:
            if not self.bounds.contains(agent.start):
                raise ConfigError("agent start %s outside scene bounds" % (agent.start,))
        starts = np.array([agent.start for agent in self.agents]).reshape(-1, 2)
        for i in range(len(starts)):
            for j in range(i + 1, len(starts)):
                if np.linalg.norm(starts[i] - starts[j]) < self.collision_radius:
                    raise OverlappingAgentsError("agents %d and %d start collided" % (i, j))

    @classmethod
    def from_dict(cls, values):
        try:
            values = dict(values)
            transition = values.pop('transition', None)
            values.pop('states', None)
            agents = tuple(HmmAgentConfig.from_dict(a, transition)
                           for a in values.pop('agents', ()))
            if 'bounds' in values:
                values['bounds'] = Rect.from_list(values['bounds'])
            return cls(agents, **values)
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid scene config: %s" % err) from None

    @classmethod
    def default(cls):
        return cls.from_dict(read_package_json(HMM_DEFAULT_FILE))

    def to_dict(self):
        return {'agents': [agent.to_dict() for agent in self.agents],
                'bounds': self.bounds.to_list(),
                'collision_radius': self.collision_radius,
                'detection_radius': self.detection_radius,
                'max_frames': self.max_frames,
                'heading_noise_deg': self.heading_noise_deg,
                'turn_max_deg': self.turn_max_deg, 'dt': self.dt}


def _unit(vec):
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else np.zeros(2)


def _rotate(vec, angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c * vec[0] - s * vec[1], s * vec[0] + c * vec[1]])


class HmmSceneSimulator:
    """Frame-by-frame engine behind :func:`simulate_scene`.

    Agents decide on the snapshot of the previous frame in id order, so
    results depend on the seed only.
    """

    def __init__(self, cfg, rng):
        self.cfg = cfg
        self.rng = rng
        count = len(cfg.agents)
        self.positions = np.array([a.start for a in cfg.agents], dtype=np.float64).reshape(count, 2)
        self.goals = np.array([a.goal for a in cfg.agents], dtype=np.float64).reshape(count, 2)
        self.velocities = np.zeros((count, 2))
        self.headings = np.array([_unit(g - p) for g, p in zip(self.goals, self.positions)]
                                 ).reshape(count, 2)
        self.states = [agent.initial_state for agent in cfg.agents]
        # agent -> (threat, avoidance side) held for the whole encounter
        self.encounters = {}
        self.frame = 0
        self.history = [self.positions.copy()]
        self.state_log = [[] for _ in range(count)]
        self.clip_events = 0

    def _intents(self, positions):
        """Goal directed step every agent means to take from ``positions``"""
        intents = np.zeros_like(positions)
        for index, agent in enumerate(self.cfg.agents):
            if self.states[index] is not HmmState.GOAL_REACHED:
                intents[index] = (_unit(self.goals[index] - positions[index])
                                  * agent.base_speed * self.cfg.dt)
        return intents

    def _threat(self, index, positions, intents):
        """Nearest neighbour within detection radius that is closing in.

        Closing is judged on the goal directed intents, so a sidestep does
        not end the encounter before the agents have passed each other.
        """
        me, best, best_dist = positions[index], None, math.inf
        for other in range(len(positions)):
            if other == index:
                continue
            offset = positions[other] - me
            dist = np.linalg.norm(offset)
            closing = np.dot(offset, intents[other] - intents[index]) < 0
            if dist < self.cfg.detection_radius and closing and dist < best_dist:
                best, best_dist = other, dist
        return best

    def _decide(self, index, positions, intents, u):
        agent = self.cfg.agents[index]
        if (self.states[index] is HmmState.GOAL_REACHED
                or np.linalg.norm(self.goals[index] - positions[index]) <= self.cfg.collision_radius):
            return HmmState.GOAL_REACHED, None
        row = agent.transition[STATE_INDEX[self.states[index]]]
        state = _draw_state(row, u)
        threat = self._threat(index, positions, intents)
        if threat is not None:
            state = HmmState.IMPENDING_COLLISION
        return state, threat

    def _avoidance_side(self, index, threat, positions, intents):
        """Unit step off the relative path of ``threat``, held until the
        encounter ends. Both agents of a pair pick opposite sides."""
        held = self.encounters.get(index)
        if held is not None and held[0] == threat:
            return held[1]
        away = positions[index] - positions[threat]
        relative = _unit(intents[index] - intents[threat])
        if not np.any(relative):
            relative = _unit(-away)
        # right hand side of the relative motion unless already offset
        side = np.array([relative[1], -relative[0]])
        if np.dot(side, away) < 0:
            side = -side
        self.encounters[index] = (threat, side)
        return side

    def _emit(self, index, state, threat, positions, intents, noise, turn):
        agent = self.cfg.agents[index]
        here = positions[index]
        speed = agent.base_speed * self.cfg.dt
        to_goal = self.goals[index] - here
        if state is not HmmState.IMPENDING_COLLISION:
            self.encounters.pop(index, None)
        if state in (HmmState.WAIT, HmmState.GOAL_REACHED):
            return np.zeros(2)
        if state is HmmState.WALK:
            self.headings[index] = _rotate(_unit(to_goal), noise)
            return self.headings[index] * min(speed, np.linalg.norm(to_goal))
        if state is HmmState.TURN:
            self.headings[index] = _rotate(self.headings[index], turn)
            return self.headings[index] * speed
        # impending collision: slow sidestep off the threat's path
        if threat is None:
            return _unit(to_goal) * speed * COLLISION_SLOWDOWN
        side = self._avoidance_side(index, threat, positions, intents)
        direction = _unit(side + _unit(to_goal))
        if not np.any(direction):
            direction = side
        self.headings[index] = direction
        return direction * speed * COLLISION_SLOWDOWN

    def step(self):
        """Advance one frame; returns the new positions"""
        positions = self.positions.copy()
        intents = self._intents(positions)
        count = len(positions)
        noise_scale = math.radians(self.cfg.heading_noise_deg)
        turn_scale = math.radians(self.cfg.turn_max_deg)
        moves = np.zeros((count, 2))
        for index in range(count):
            u, noise, turn = (self.rng.uniform(), self.rng.normal(0.0, 1.0),
                              self.rng.uniform(-1.0, 1.0))
            state, threat = self._decide(index, positions, intents, u)
            self.states[index] = state
            self.state_log[index].append(state)
            moves[index] = self._emit(index, state, threat, positions, intents,
                                      noise * noise_scale, turn * turn_scale)
        target = self.positions + moves
        clipped = self.cfg.bounds.clip(target)
        if not np.array_equal(clipped, target):
            self.clip_events += 1
            LOGGER.debug("Clipped agent positions to scene bounds at frame %d", self.frame)
        self.velocities = (clipped - self.positions) / self.cfg.dt
        self.positions = clipped
        self.frame += 1
        self.history.append(self.positions.copy())
        return self.positions

    def run(self):
        while len(self.history) < self.cfg.max_frames:
            self.step()
        # decision of the final recorded frame
        intents = self._intents(self.positions)
        for index in range(len(self.positions)):
            state, _ = self._decide(index, self.positions, intents, self.rng.uniform())
            self.state_log[index].append(state)
        return self.scene()

    def scene(self, scene_id=0):
        points = np.stack(self.history, axis=1)
        length = points.shape[1]
        split = min(DEFAULT_OBS_LEN, length - 1)
        trajectories = tuple(
            (index, Trajectory(points[index], dt=self.cfg.dt, obs_len=split,
                               pred_len=max(1, length - split)))
            for index in range(len(points)))
        log = {index: tuple(states) for index, states in enumerate(self.state_log)}
        return Scene(trajectories, bounds=self.cfg.bounds, scene_id=scene_id, state_log=log)


def simulate_scene(cfg, rng, scene_id=0):
    if not cfg.agents:
        raise ConfigError("scene has no agents")
    simulator = HmmSceneSimulator(cfg, rng)
    simulator.run()
    LOGGER.debug("Simulated scene %d: %d agents, %d frames, %d clip events",
                 scene_id, len(cfg.agents), cfg.max_frames, simulator.clip_events)
    return simulator.scene(scene_id)


def estimate_state_occupancy(s, cfg=None):
    """Per agent frame counts of every state in the scene's state log"""
    if s.state_log is None:
        raise MissingStateLogError("scene %d has no state log" % s.scene_id)
    occupancy = {}
    for agent_id, traj in s.trajectories:
        states = s.state_log.get(agent_id)
        if states is None:
            raise MissingStateLogError("no states logged for agent %d" % agent_id)
        if len(states) != len(traj):
            raise DataError("agent %d logs %d states for %d frames"
                            % (agent_id, len(states), len(traj)))
        if cfg is not None and len(states) > cfg.max_frames:
            raise DataError("agent %d logs more frames than simulated" % agent_id)
        counts = dict.fromkeys(STATES, 0)
        for state in states:
            counts[HmmState(state)] += 1
        occupancy[agent_id] = counts
    return occupancy
