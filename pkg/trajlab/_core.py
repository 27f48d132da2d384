# -*- coding: utf-8 -*-
"""
    trajlab.core
    ~~~~~~~~~~~~

    Trajectory, scene and dataset value types shared by every other
    module, plus the seeded random generator used for all sampling.

    All values are immutable after construction. Point arrays are stored
    as read-only float64 numpy arrays of shape (n, 2).

    :license: BSD, see LICENSE for more details.
"""

# python imports
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Optional, Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import DEFAULT_DT, DEFAULT_OBS_LEN, DEFAULT_PRED_LEN
from trajlab._exceptions import ConfigError, DataError


class Point2(NamedTuple):
    x: float
    y: float


def _frozen_points(points):
    pts = np.array(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DataError("points must have shape (n, 2), got %s" % (pts.shape,))
    if not np.all(np.isfinite(pts)):
        raise DataError("points contain non-finite coordinates")
    pts.setflags(write=False)
    return pts


def _frame_index(value):
    try:
        frame = float(value)
    except (TypeError, ValueError):
        raise DataError("frame0 must be an integer, got %r" % (value,)) from None
    if not frame.is_integer():
        raise DataError("frame0 must be an integer, got %r" % (value,))
    return int(frame)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle [xmin, xmax] x [ymin, ymax]"""
    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin <= self.xmax and self.ymin <= self.ymax):
            raise ConfigError("inverted rectangle %r" % (self,))

    @property
    def width(self):
        return self.xmax - self.xmin

    @property
    def height(self):
        return self.ymax - self.ymin

    @property
    def area(self):
        return self.width * self.height

    def contains(self, points, tol=0.0):
        pts = np.atleast_2d(points)
        return bool(np.all(
            (pts[:, 0] >= self.xmin - tol) & (pts[:, 0] <= self.xmax + tol)
            & (pts[:, 1] >= self.ymin - tol) & (pts[:, 1] <= self.ymax + tol)))

    def clip(self, points):
        pts = np.array(points, dtype=np.float64)
        pts[..., 0] = np.clip(pts[..., 0], self.xmin, self.xmax)
        pts[..., 1] = np.clip(pts[..., 1], self.ymin, self.ymax)
        return pts

    def to_list(self):
        return [self.xmin, self.xmax, self.ymin, self.ymax]

    @classmethod
    def from_list(cls, values):
        try:
            xmin, xmax, ymin, ymax = (float(v) for v in values)
        except (TypeError, ValueError):
            raise ConfigError("bounds must be four numbers, got %r" % (values,)) from None
        return cls(xmin, xmax, ymin, ymax)

    @classmethod
    def around(cls, points):
        pts = np.atleast_2d(points)
        return cls(float(pts[:, 0].min()), float(pts[:, 0].max()),
                   float(pts[:, 1].min()), float(pts[:, 1].max()))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Ordered 2D points sampled every ``dt`` frames.

    ``obs_len`` and ``pred_len`` describe the observed/future split used
    by evaluation; they do not constrain the number of points otherwise.
    """
    points: np.ndarray
    dt: float = DEFAULT_DT
    obs_len: int = DEFAULT_OBS_LEN
    pred_len: int = DEFAULT_PRED_LEN
    frame0: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'frame0', _frame_index(self.frame0))
        pts = _frozen_points(self.points)
        if len(pts) < 2:
            raise DataError("trajectory needs at least 2 points, got %d" % len(pts))
        if not (self.dt > 0 and np.isfinite(self.dt)):
            raise DataError("dt must be positive, got %r" % (self.dt,))
        if self.obs_len < 1 or self.pred_len < 1:
            raise DataError("obs_len and pred_len must be >= 1")
        object.__setattr__(self, 'points', pts)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.dt == other.dt and self.obs_len == other.obs_len
                and self.pred_len == other.pred_len
                and self.frame0 == other.frame0
                and np.array_equal(self.points, other.points))

    __hash__ = None

    @property
    def observed(self):
        return self.points[:self.obs_len]

    @property
    def future(self):
        return self.points[self.obs_len:self.obs_len + self.pred_len]

    @property
    def has_eval_shape(self):
        return len(self.points) == self.obs_len + self.pred_len

    @property
    def path_length(self):
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def frame(self, i):
        """Frame of point ``i``; an int whenever it falls on a whole frame"""
        value = self.frame0 + i * self.dt
        return int(value) if float(value).is_integer() else float(value)

    def point(self, i):
        x, y = self.points[i]
        return Point2(float(x), float(y))

    def with_points(self, points):
        """Same timing and split, new coordinates"""
        return Trajectory(points, dt=self.dt, obs_len=self.obs_len,
                          pred_len=self.pred_len, frame0=self.frame0)


def tight_bbox(t):
    """Tightest axis-aligned rectangle around all points of ``t``"""
    return Rect.around(t.points)


@dataclass(frozen=True, eq=False)
class Scene:
    """Agent trajectories sharing one frame clock"""
    trajectories: Tuple[Tuple[int, Trajectory], ...]
    frame0: int = 0
    bounds: Optional[Rect] = None
    scene_id: int = 0
    state_log: Optional[Mapping[int, tuple]] = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, 'frame0', _frame_index(self.frame0))
        entries = tuple((int(agent_id), traj) for agent_id, traj in self.trajectories)
        ids = [agent_id for agent_id, _ in entries]
        if len(set(ids)) != len(ids):
            raise DataError("duplicate agent ids in scene %d" % self.scene_id)
        object.__setattr__(self, 'trajectories', entries)
        if self.bounds is None and entries:
            object.__setattr__(self, 'bounds', Rect.around(
                np.concatenate([traj.points for _, traj in entries])))

    def __len__(self):
        return len(self.trajectories)

    def __eq__(self, other):
        if not isinstance(other, Scene):
            return NotImplemented
        return (self.scene_id == other.scene_id
                and self.trajectories == other.trajectories)

    __hash__ = None

    @property
    def agent_ids(self):
        return [agent_id for agent_id, _ in self.trajectories]

    def trajectory(self, agent_id):
        for other_id, traj in self.trajectories:
            if other_id == agent_id:
                return traj
        raise KeyError(agent_id)


@dataclass(frozen=True, eq=False)
class Dataset:
    scenes: Tuple[Scene, ...]
    label: str = ''

    def __post_init__(self):
        object.__setattr__(self, 'scenes', tuple(self.scenes))

    def __len__(self):
        return sum(len(scene) for scene in self.scenes)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return self.label == other.label and self.scenes == other.scenes

    __hash__ = None

    def trajectories(self):
        """All trajectories in scene then agent order"""
        return [traj for scene in self.scenes for _, traj in scene.trajectories]

    def keys(self):
        """(scene_id, agent_id) per trajectory, aligned with trajectories()"""
        return [(scene.scene_id, agent_id)
                for scene in self.scenes for agent_id, _ in scene.trajectories]

    @classmethod
    def from_trajectories(cls, trajectories, label='', scene_id=0, bounds=None):
        scene = Scene(tuple(enumerate(trajectories)), bounds=bounds, scene_id=scene_id)
        return cls((scene,), label=label)


class SeededRng:
    """PCG64 generator seeded from a 64-bit unsigned integer.

    Derived generators come from ``numpy.random.SeedSequence`` with the
    item index as spawn key, so batch items are reproducible on their own.
    """

    def __init__(self, seed=0, spawn_key=()):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer, got %d" % seed)
        self.seed = seed
        self.spawn_key = tuple(spawn_key)
        self._sequence = np.random.SeedSequence(seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.PCG64(self._sequence))

    def __repr__(self):
        return "<SeededRng seed:%d key:%s>" % (self.seed, self.spawn_key)

    def derive(self, index):
        return SeededRng(self.seed, self.spawn_key + (int(index),))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self.generator.uniform(low, high, size)

    def normal(self, loc=0.0, scale=1.0, size=None):
        return self.generator.normal(loc, scale, size)

    def integers(self, low, high=None, size=None):
        return self.generator.integers(low, high, size)

    def choice(self, a, size=None, replace=True, p=None):
        return self.generator.choice(a, size=size, replace=replace, p=p)

    def permutation(self, x):
        return self.generator.permutation(x)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)
