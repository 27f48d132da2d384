# -*- coding: utf-8 -*-
"""
    trajlab.genkin
    ~~~~~~~~~~~~~~

    Kinematic trajectory generators: Newtonian motion with static or
    bounded variable acceleration, Gaussian position noise and sampled
    geometric curves (circles, Archimedean spirals, rose loops, lines).

    Start positions and velocities may be given as ranges
    ``{"low": [x, y], "high": [x, y]}`` and are then drawn per trajectory.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

# environment imports
import numpy as np

# custom imports
from trajlab._const import (
    ACCEL_STATIC, ACCEL_VARIABLE, CURVE_CIRCLE, CURVE_LINE, CURVE_LOOP,
    CURVE_SPIRAL, DEFAULT_DT, DEFAULT_OBS_LEN, DEFAULT_PRED_LEN,
    SAMPLING_FIXED, SAMPLING_VARIABLE)
from trajlab._core import Dataset, Trajectory
from trajlab._exceptions import ConfigError

# local constants
LOGGER = logging.getLogger(__name__)


def _vector(value, name):
    vec = np.array(value, dtype=np.float64)
    if vec.shape != (2,) or not np.all(np.isfinite(vec)):
        raise ConfigError("%s must be a finite 2-vector, got %r" % (name, value))
    return vec


@dataclass(frozen=True)
class Range2:
    """Uniform box of 2-vectors to draw from"""
    low: Tuple[float, float]
    high: Tuple[float, float]

    def __post_init__(self):
        low, high = _vector(self.low, 'low'), _vector(self.high, 'high')
        if np.any(low > high):
            raise ConfigError("range low %s exceeds high %s" % (low, high))
        object.__setattr__(self, 'low', tuple(low))
        object.__setattr__(self, 'high', tuple(high))

    def draw(self, rng):
        return rng.uniform(self.low, self.high)

    def to_dict(self):
        return {'low': list(self.low), 'high': list(self.high)}


def _vector_or_range(value, name):
    if isinstance(value, Range2):
        return value
    if isinstance(value, dict):
        return Range2(value['low'], value['high'])
    return tuple(_vector(value, name))


def _resolve(value, rng):
    if isinstance(value, Range2):
        return value.draw(rng)
    return np.array(value, dtype=np.float64)


def _encode(value):
    return value.to_dict() if isinstance(value, Range2) else list(value)


@dataclass(frozen=True)
class NewtonSpec:
    x0: Union[Tuple[float, float], Range2] = (0.0, 0.0)
    v0: Union[Tuple[float, float], Range2] = (1.0, 0.0)
    accel_mode: str = ACCEL_STATIC
    accel: Tuple[float, float] = (0.0, 0.0)
    accel_bound: float = 0.0
    steps: int = DEFAULT_OBS_LEN + DEFAULT_PRED_LEN
    dt: float = DEFAULT_DT
    obs_len: int = DEFAULT_OBS_LEN
    pred_len: int = DEFAULT_PRED_LEN

    def __post_init__(self):
        object.__setattr__(self, 'x0', _vector_or_range(self.x0, 'x0'))
        object.__setattr__(self, 'v0', _vector_or_range(self.v0, 'v0'))
        object.__setattr__(self, 'accel', tuple(_vector(self.accel, 'accel')))
        if self.accel_mode not in (ACCEL_STATIC, ACCEL_VARIABLE):
            raise ConfigError("unknown acceleration mode %r" % (self.accel_mode,))
        if not self.accel_bound >= 0:
            raise ConfigError("accel_bound must be >= 0")
        if int(self.steps) != self.steps or self.steps < 2:
            raise ConfigError("steps must be an integer >= 2")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")

    @classmethod
    def from_dict(cls, values):
        try:
            return cls(**values)
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError("invalid newton spec: %s" % err) from None

    def to_dict(self):
        return {'x0': _encode(self.x0), 'v0': _encode(self.v0),
                'accel_mode': self.accel_mode, 'accel': list(self.accel),
                'accel_bound': self.accel_bound, 'steps': self.steps, 'dt': self.dt,
                'obs_len': self.obs_len, 'pred_len': self.pred_len}


@dataclass(frozen=True)
class NoiseSpec:
    sigma: float = 0.0

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ConfigError("sigma must be a finite value >= 0, got %r" % (self.sigma,))

    def to_dict(self):
        return {'sigma': self.sigma}


@dataclass(frozen=True)
class NoisyNewtonSpec:
    newton: NewtonSpec = field(default_factory=NewtonSpec)
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    @classmethod
    def from_dict(cls, values):
        try:
            values = dict(values)
            sigma = float(values.pop('sigma'))
        except KeyError:
            raise ConfigError("noisy spec needs a sigma") from None
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid noisy spec: %s" % err) from None
        return cls(NewtonSpec.from_dict(values), NoiseSpec(sigma))

    def to_dict(self):
        document = self.newton.to_dict()
        document.update(self.noise.to_dict())
        return document


def gen_newton(spec, rng):
    """Point i sits at x0 + v0*t + a*t^2/2 for static acceleration; in
    variable mode each step draws its own acceleration uniformly from
    [-bound, bound] per axis and integrates it."""
    x0 = _resolve(spec.x0, rng)
    v0 = _resolve(spec.v0, rng)
    dt = spec.dt
    if spec.accel_mode == ACCEL_STATIC:
        t = np.arange(spec.steps)[:, np.newaxis] * dt
        points = x0 + v0 * t + 0.5 * np.array(spec.accel) * t * t
    else:
        accel = rng.uniform(-spec.accel_bound, spec.accel_bound, size=(spec.steps - 1, 2))
        velocity = v0 + dt * np.vstack([np.zeros(2), np.cumsum(accel, axis=0)[:-1]])
        increments = velocity * dt + 0.5 * accel * dt * dt
        points = np.vstack([x0, x0 + np.cumsum(increments, axis=0)])
    return Trajectory(points, dt=dt, obs_len=spec.obs_len, pred_len=spec.pred_len)


def add_noise(t, noise, rng):
    if noise.sigma == 0:
        return t
    return t.with_points(t.points + rng.normal(0.0, noise.sigma, size=t.points.shape))


def gen_noisy(spec, rng):
    return add_noise(gen_newton(spec.newton, rng), spec.noise, rng)


@dataclass(frozen=True)
class CurveSpec:
    """Sampled curve; ``n`` points at uniform or jittered parameter steps.

    circle: radius; spiral: r = a + b*phi over ``turns`` revolutions;
    loop: rose r = radius * cos(lobes * phi); line: ``length`` along the
    ``phase`` direction.
    """
    kind: str = CURVE_CIRCLE
    radius: float = 1.0
    a: float = 0.0
    b: float = 1.0
    turns: float = 1.0
    lobes: int = 3
    length: float = 10.0
    sampling: str = SAMPLING_FIXED
    n: int = DEFAULT_OBS_LEN + DEFAULT_PRED_LEN
    jitter: float = 0.0
    center: Tuple[float, float] = (0.0, 0.0)
    phase: float = 0.0
    dt: float = DEFAULT_DT
    obs_len: int = DEFAULT_OBS_LEN
    pred_len: int = DEFAULT_PRED_LEN

    def __post_init__(self):
        object.__setattr__(self, 'center', tuple(_vector(self.center, 'center')))
        if self.kind not in (CURVE_CIRCLE, CURVE_SPIRAL, CURVE_LOOP, CURVE_LINE):
            raise ConfigError("unknown curve kind %r" % (self.kind,))
        if self.sampling not in (SAMPLING_FIXED, SAMPLING_VARIABLE):
            raise ConfigError("unknown sampling %r" % (self.sampling,))
        if int(self.n) != self.n or self.n < 3:
            raise ConfigError("n must be an integer >= 3")
        if not 0 <= self.jitter < 1:
            raise ConfigError("jitter must be in [0, 1)")
        if self.kind in (CURVE_CIRCLE, CURVE_LOOP) and not self.radius > 0:
            raise ConfigError("radius must be positive")
        if self.kind == CURVE_LINE and not self.length > 0:
            raise ConfigError("length must be positive")
        if self.kind == CURVE_SPIRAL and not (self.a >= 0 and self.b >= 0
                                              and self.a + self.b > 0 and self.turns > 0):
            raise ConfigError("spiral needs a, b >= 0 (not both 0) and turns > 0")
        if self.kind == CURVE_LOOP and (int(self.lobes) != self.lobes or self.lobes < 1):
            raise ConfigError("lobes must be an integer >= 1")
        if not self.dt > 0:
            raise ConfigError("dt must be positive")

    @property
    def closed(self):
        return self.kind in (CURVE_CIRCLE, CURVE_LOOP)

    @classmethod
    def from_dict(cls, values):
        try:
            return cls(**values)
        except (TypeError, ValueError) as err:
            raise ConfigError("invalid curve spec: %s" % err) from None

    def to_dict(self):
        return {'kind': self.kind, 'radius': self.radius, 'a': self.a, 'b': self.b,
                'turns': self.turns, 'lobes': self.lobes, 'length': self.length,
                'sampling': self.sampling, 'n': self.n, 'jitter': self.jitter,
                'center': list(self.center), 'phase': self.phase, 'dt': self.dt,
                'obs_len': self.obs_len, 'pred_len': self.pred_len}


def _parameter_grid(spec, rng):
    """Unit parameter values u_0 = 0 < u_1 < ... for ``spec.n`` points"""
    # closed curves stop one step short of their start
    step = 1.0 / spec.n if spec.closed else 1.0 / (spec.n - 1)
    increments = np.full(spec.n - 1, step)
    if spec.sampling == SAMPLING_VARIABLE and spec.jitter > 0:
        increments *= 1.0 + rng.uniform(-spec.jitter, spec.jitter, size=spec.n - 1)
    return np.concatenate([[0.0], np.cumsum(increments)])


def gen_curve(spec, rng):
    u = _parameter_grid(spec, rng)
    if spec.kind == CURVE_CIRCLE:
        phi = 2.0 * math.pi * u
        radius = np.full_like(phi, spec.radius)
    elif spec.kind == CURVE_SPIRAL:
        phi = 2.0 * math.pi * spec.turns * u
        radius = spec.a + spec.b * phi
    elif spec.kind == CURVE_LOOP:
        phi = 2.0 * math.pi * u
        radius = spec.radius * np.cos(spec.lobes * phi)
    else:
        phi = np.zeros_like(u)
        radius = spec.length * u
    angle = phi + spec.phase
    points = np.array(spec.center) + radius[:, np.newaxis] * np.column_stack(
        [np.cos(angle), np.sin(angle)])
    return Trajectory(points, dt=spec.dt, obs_len=spec.obs_len, pred_len=spec.pred_len)


def gen_batch(generator, spec, count, rng, label=''):
    """``count`` trajectories, item i drawn from ``rng.derive(i)``"""
    if int(count) != count or count < 1:
        raise ConfigError("count must be an integer >= 1, got %r" % (count,))
    trajectories = [generator(spec, rng.derive(i)) for i in range(count)]
    LOGGER.info("Generated %d trajectories with %s", count, generator.__name__)
    return Dataset.from_trajectories(trajectories, label=label)
