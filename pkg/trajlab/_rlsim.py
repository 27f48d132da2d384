# -*- coding: utf-8 -*-
"""
    trajlab.rlsim
    ~~~~~~~~~~~~~

    A policy-gradient pedestrian learning to reach its goal among
    background agents driven by the interaction chain.

    The step reward is

        R_t = AF^t * (n_ics + 1)^(AS + AP) / (t^2 * (1 + |G - x_t|))

    where n_ics counts detection-radius entries that did not end in a
    collision. A collision adds a fixed penalty and ends the episode. The
    policy is a dense network emitting (mu_x, mu_y, s_x, s_y) with
    variance ``softplus(s) + 1e-4``; training minimizes
    ``-sum_t log P(a_t | s_t) * R_t`` with per-step rewards as weights.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import (
    ACTIVATION_IDENTITY, ACTIVATION_RELU, DEFAULT_A_MAX,
    DEFAULT_COLLISION_PENALTY, DEFAULT_DT, DEFAULT_GOAL_RADIUS,
    DEFAULT_NEIGHBORS, DEFAULT_OBS_LEN, DEFAULT_V_MAX, INIT_DEFAULT, LOG_2PI,
    TERMINAL_COLLISION, TERMINAL_GOAL, TERMINAL_TIMEOUT, VARIANCE_FLOOR)
from trajlab._core import Dataset, SeededRng, Trajectory
from trajlab._exceptions import (
    ConfigError, EmptyDatasetError, NonFiniteOutputError, OverlappingAgentsError,
    ShapeMismatchError)
from trajlab._hmm import HmmSceneSimulator, SceneConfig
from trajlab._neural import INITIALIZERS, Gradients, Mlp, backward, forward, sgd_step

# local constants
LOGGER = logging.getLogger(__name__)

FEATURE_SCALE = 10.0
POLICY_OUTPUTS = 4


@dataclass(frozen=True)
class AgentProfile:
    """Fitness, sociability and patience in [0, 1], fixed per simulation"""
    AF: float
    AS: float
    AP: float
    goal: Tuple[float, float]

    def __post_init__(self):
        for name in ('AF', 'AS', 'AP'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError("%s must be in [0, 1], got %r" % (name, getattr(self, name)))
        goal = tuple(float(v) for v in self.goal)
        if len(goal) != 2:
            raise ConfigError("goal must be a 2D point")
        object.__setattr__(self, 'goal', goal)

    @classmethod
    def from_dict(cls, values):
        try:
            return cls(**values)
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid agent profile: %s" % err) from None

    def to_dict(self):
        return {'AF': self.AF, 'AS': self.AS, 'AP': self.AP, 'goal': list(self.goal)}


@dataclass(frozen=True)
class AgentState:
    position: Tuple[float, float]
    velocity: Tuple[float, float]
    t: int
    n_ics: int = 0
    # (relative position, relative velocity) per neighbour within detection
    neighbors: Tuple[Tuple[Tuple[float, float], Tuple[float, float]], ...] = ()


@dataclass(frozen=True)
class RlEnvConfig:
    start: Tuple[float, float] = (0.0, 0.0)
    goal_radius: float = DEFAULT_GOAL_RADIUS
    v_max: float = DEFAULT_V_MAX
    a_max: float = DEFAULT_A_MAX
    collision_penalty: float = DEFAULT_COLLISION_PENALTY
    neighbors: int = DEFAULT_NEIGHBORS
    max_steps: int = 50
    dt: float = DEFAULT_DT
    collision_radius: float = 1.0
    detection_radius: float = 5.0
    scene: Optional[SceneConfig] = None

    def __post_init__(self):
        object.__setattr__(self, 'start', tuple(float(v) for v in self.start))
        if not (self.goal_radius > 0 and self.v_max > 0 and self.a_max > 0 and self.dt > 0):
            raise ConfigError("goal_radius, v_max, a_max and dt must be positive")
        if not 0 < self.collision_radius < self.detection_radius:
            raise ConfigError("need detection_radius > collision_radius > 0")
        if self.neighbors < 0 or self.max_steps < 1:
            raise ConfigError("neighbors must be >= 0 and max_steps >= 1")
        if self.collision_penalty > 0:
            raise ConfigError("collision_penalty must be <= 0")

    @property
    def feature_dim(self):
        return 4 + 4 * self.neighbors

    @classmethod
    def from_dict(cls, values):
        try:
            values = dict(values)
            if values.get('scene') is not None:
                values['scene'] = SceneConfig.from_dict(values['scene'])
            return cls(**values)
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid environment: %s" % err) from None

    def to_dict(self):
        document = {name: getattr(self, name) for name in (
            'goal_radius', 'v_max', 'a_max', 'collision_penalty', 'neighbors',
            'max_steps', 'dt', 'collision_radius', 'detection_radius')}
        document['start'] = list(self.start)
        document['scene'] = self.scene.to_dict() if self.scene else None
        return document


@dataclass(frozen=True, eq=False)
class EpisodeLog:
    states: Tuple[AgentState, ...]
    actions: np.ndarray
    rewards: np.ndarray
    logprobs: np.ndarray
    features: np.ndarray
    positions: np.ndarray
    terminal: str

    def __len__(self):
        return len(self.states)

    @property
    def total_return(self):
        return float(self.rewards.sum())

    def final_distance(self, goal):
        return float(np.linalg.norm(np.array(goal) - self.positions[-1]))


def reward_fn(s, p):
    if s.t < 1:
        raise ConfigError("reward needs t >= 1, got %d" % s.t)
    distance = np.linalg.norm(np.array(p.goal) - np.array(s.position))
    return float(p.AF ** s.t * (s.n_ics + 1) ** (p.AS + p.AP)
                 / (s.t ** 2 * (1.0 + distance)))


def _rewards(states, terminal, p, env):
    rewards = np.array([reward_fn(s, p) for s in states])
    if terminal == TERMINAL_COLLISION:
        rewards[-1] += env.collision_penalty
    return rewards


def episode_rewards(log, p, env):
    """Rewards recomputed from the logged states and terminal"""
    return _rewards(log.states, log.terminal, p, env)


def featurize(s, goal, neighbors=DEFAULT_NEIGHBORS):
    """Goal offset, own velocity and the nearest neighbours, zero padded"""
    features = np.zeros(4 + 4 * neighbors)
    features[0:2] = (np.array(goal) - np.array(s.position)) / FEATURE_SCALE
    features[2:4] = s.velocity
    ranked = sorted(s.neighbors, key=lambda n: float(np.hypot(*n[0])))[:neighbors]
    for i, (offset, velocity) in enumerate(ranked):
        features[4 + 4 * i:6 + 4 * i] = np.array(offset) / FEATURE_SCALE
        features[6 + 4 * i:8 + 4 * i] = velocity
    return features


def _softplus(x):
    return np.logaddexp(0.0, x)


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _policy_parameters(outputs):
    outputs = np.asarray(outputs, dtype=np.float64)
    if not np.all(np.isfinite(outputs)):
        raise NonFiniteOutputError("policy produced non-finite output")
    return outputs[..., :2], _softplus(outputs[..., 2:]) + VARIANCE_FLOOR


def gaussian_logprob(action, mu, var):
    """Log density of a diagonal Gaussian, summed over the last axis"""
    diff = np.asarray(action) - mu
    return -0.5 * np.sum(LOG_2PI + np.log(var) + diff * diff / var, axis=-1)


def gaussian_score(action, mu, var):
    """Gradient of the log density with respect to (mu, var)"""
    diff = np.asarray(action) - mu
    return diff / var, -0.5 / var + 0.5 * diff * diff / (var * var)


def _sample_action(net, features, rng):
    if net.output_dim != POLICY_OUTPUTS:
        raise ConfigError("policy network must have %d outputs" % POLICY_OUTPUTS)
    mu, var = _policy_parameters(forward(net, features))
    action = mu + np.sqrt(var) * rng.standard_normal(2)
    return action, float(gaussian_logprob(action, mu, var))


def policy_act(net, s, rng, goal):
    """Samples an acceleration for state ``s``; the number of neighbour
    slots follows the input width of ``net``"""
    neighbors, rest = divmod(net.input_dim - 4, 4)
    if neighbors < 0 or rest:
        raise ShapeMismatchError("policy input width %d is not 4 + 4 * neighbors"
                                 % net.input_dim)
    return _sample_action(net, featurize(s, goal, neighbors), rng)


def _clip_norm(vec, limit):
    norm = np.linalg.norm(vec)
    return vec * (limit / norm) if norm > limit else vec


def _neighbors(position, velocity, others, other_velocities, radius):
    found = []
    for other, other_velocity in zip(others, other_velocities):
        offset = other - position
        if np.linalg.norm(offset) < radius:
            found.append((tuple(offset), tuple(other_velocity - velocity)))
    return tuple(found)


def run_episode(net, env, p, rng, max_steps=None):
    """One episode of the learner among the background scene agents.

    Background agents do not see the learner. ``states[k]`` is the state
    after step k + 1 and ``rewards[k]`` its reward.
    """
    max_steps = env.max_steps if max_steps is None else max_steps
    background = None
    others = np.zeros((0, 2))
    other_velocities = np.zeros((0, 2))
    if env.scene is not None and env.scene.agents:
        background = HmmSceneSimulator(env.scene, rng.derive(0))
        others, other_velocities = background.positions, background.velocities
    policy_rng = rng.derive(1)

    goal = np.array(p.goal)
    x = np.array(env.start, dtype=np.float64)
    v = np.zeros(2)
    distances = np.linalg.norm(others - x, axis=1)
    if np.any(distances < env.collision_radius):
        raise OverlappingAgentsError("learner starts inside a collision radius")
    n_ics = 0
    state = AgentState(tuple(x), tuple(v), 1, 0, _neighbors(
        x, v, others, other_velocities, env.detection_radius))
    states, actions, logprobs, features, positions = [], [], [], [], [x.copy()]
    terminal = TERMINAL_TIMEOUT
    for t in range(1, max_steps + 1):
        observation = featurize(state, goal, env.neighbors)
        action, logprob = _sample_action(net, observation, policy_rng)
        applied = _clip_norm(action, env.a_max)
        v = _clip_norm(v + applied * env.dt, env.v_max)
        x = x + v * env.dt
        if background is not None:
            background.step()
            others, other_velocities = background.positions, background.velocities
        previous = distances
        distances = np.linalg.norm(others - x, axis=1)
        collided = bool(np.any(distances < env.collision_radius))
        entered = bool(np.any((previous >= env.detection_radius)
                              & (distances < env.detection_radius)))
        if entered and not collided:
            n_ics += 1
        state = AgentState(tuple(x), tuple(v), t, n_ics, _neighbors(
            x, v, others, other_velocities, env.detection_radius))
        states.append(state)
        actions.append(action)
        logprobs.append(logprob)
        features.append(observation)
        positions.append(x.copy())
        if collided:
            terminal = TERMINAL_COLLISION
            break
        if np.linalg.norm(goal - x) <= env.goal_radius:
            terminal = TERMINAL_GOAL
            break
    return EpisodeLog(tuple(states), np.array(actions), _rewards(states, terminal, p, env),
                      np.array(logprobs), np.array(features), np.array(positions), terminal)


def _episode_terms(net, episode):
    """Per-step loss terms and output gradients for one episode"""
    outputs = forward(net, episode.features)
    mu, var = _policy_parameters(outputs)
    logprob = gaussian_logprob(episode.actions, mu, var)
    d_mu, d_var = gaussian_score(episode.actions, mu, var)
    weights = -episode.rewards[:, np.newaxis]
    upstream = np.hstack([weights * d_mu, weights * d_var * _sigmoid(outputs[:, 2:])])
    return float(-(logprob * episode.rewards).sum()), upstream


def policy_loss(net, episodes):
    return sum(_episode_terms(net, episode)[0] for episode in episodes)


def policy_gradient(net, episodes):
    """Loss and parameter gradients of -sum log P(a_t|s_t) * R_t"""
    if not episodes:
        raise EmptyDatasetError("no episodes to learn from")
    total, loss = Gradients.zeros_like(net), 0.0
    for episode in episodes:
        episode_loss, upstream = _episode_terms(net, episode)
        loss += episode_loss
        total = total + backward(net, upstream)
    return loss, total


def reinforce_update(net, episodes, lr):
    loss, grads = policy_gradient(net, episodes)
    return sgd_step(net, grads, lr), loss


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 100
    episodes_per_iter: int = 16
    lr: float = 0.05
    seed: int = 0
    hidden: Tuple[int, ...] = (16,)
    activation: str = ACTIVATION_RELU
    init: str = INIT_DEFAULT
    max_steps: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'hidden', tuple(self.hidden))
        if self.iterations < 1 or self.episodes_per_iter < 1:
            raise ConfigError("iterations and episodes_per_iter must be >= 1")
        if not self.lr > 0:
            raise ConfigError("learning rate must be positive")
        if self.init not in INITIALIZERS:
            raise ConfigError("unknown initialization %r" % (self.init,))

    def to_dict(self):
        return {'iterations': self.iterations, 'episodes_per_iter': self.episodes_per_iter,
                'lr': self.lr, 'seed': self.seed, 'hidden': list(self.hidden),
                'activation': self.activation, 'init': self.init,
                'max_steps': self.max_steps}


@dataclass(frozen=True)
class CurvePoint:
    iteration: int
    mean_return: float
    mean_final_dist: float
    loss: float


@dataclass(frozen=True)
class LearningCurve:
    points: Tuple[CurvePoint, ...] = field(default_factory=tuple)

    HEADER = ('iter', 'mean_return', 'mean_final_dist')

    def rows(self):
        return [(pt.iteration, pt.mean_return, pt.mean_final_dist) for pt in self.points]


def policy_network(env, cfg, rng):
    sizes = [env.feature_dim] + list(cfg.hidden) + [POLICY_OUTPUTS]
    net = Mlp.build(sizes, hidden=cfg.activation, output=ACTIVATION_IDENTITY)
    return INITIALIZERS[cfg.init](net, rng)


def train(env, p, cfg):
    root = SeededRng(cfg.seed)
    net = policy_network(env, cfg, root.derive(0))
    episodes_rng = root.derive(1)
    points: List[CurvePoint] = []
    for iteration in range(1, cfg.iterations + 1):
        batch_rng = episodes_rng.derive(iteration)
        episodes = [run_episode(net, env, p, batch_rng.derive(j), cfg.max_steps)
                    for j in range(cfg.episodes_per_iter)]
        net, loss = reinforce_update(net, episodes, cfg.lr)
        point = CurvePoint(iteration,
                           float(np.mean([e.total_return for e in episodes])),
                           float(np.mean([e.final_distance(p.goal) for e in episodes])),
                           loss)
        points.append(point)
        LOGGER.debug("iteration %d: return %.6g, final distance %.4g",
                     iteration, point.mean_return, point.mean_final_dist)
    LOGGER.info("Trained policy for %d iterations, final mean distance %.4g",
                cfg.iterations, points[-1].mean_final_dist)
    return net, LearningCurve(tuple(points))


def rollout_dataset(net, env, p, rng, count=1, label='rl'):
    """Learner paths of ``count`` episodes as a dataset"""
    trajectories = []
    for index in range(count):
        episode = run_episode(net, env, p, rng.derive(index))
        length = len(episode.positions)
        split = min(DEFAULT_OBS_LEN, length - 1)
        trajectories.append(Trajectory(episode.positions, dt=env.dt, obs_len=split,
                                       pred_len=length - split))
    return Dataset.from_trajectories(trajectories, label=label)
