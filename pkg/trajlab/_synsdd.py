# -*- coding: utf-8 -*-
"""
    trajlab.synsdd
    ~~~~~~~~~~~~~~

    Statistics-matched synthetic datasets, rotation/translation
    augmentation and proportion-controlled mixing of synthetic into real
    trajectories.

    A target gives proportions over qualitative classes and, optionally,
    over unique-point counts. The joint class x unique-count allocation is
    a transportation problem solved with ``scipy.optimize.linprog``; each
    cell is then realized by a class recipe and checked against the
    classifier.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional

# environment imports
import numpy as np
from scipy.optimize import linprog

# custom imports
from trajlab._analysis import DEFAULT_THRESHOLDS, classify, unique_points
from trajlab._const import (
    CLASS_BACKTRACKER, CLASS_BOUNDED_LARGE, CLASS_BOUNDED_SMALL,
    CLASS_FLYING_LARGE, CLASS_FLYING_SMALL, CLASS_HAPHAZARD, CLASS_LINEAR,
    CLASS_LOOP, CLASS_STATIONARY, CURVE_CIRCLE, DEFAULT_OBS_LEN,
    DEFAULT_PRED_LEN, SAMPLING_VARIABLE, SDD_TARGET_FILE)
from trajlab._core import Dataset, Scene, SeededRng, Trajectory
from trajlab._exceptions import (
    ConfigError, InfeasibleTargetError, InsufficientPoolError, SynthesisError)
from trajlab._genkin import CurveSpec, gen_curve
from trajlab._io import read_package_json

# local constants
LOGGER = logging.getLogger(__name__)

N_POINTS = DEFAULT_OBS_LEN + DEFAULT_PRED_LEN
SUM_TOLERANCE = 1e-9
MAX_ATTEMPTS = 50
SCENE_EXTENT = 500.0

FEASIBLE_UNIQUE = {
    CLASS_STATIONARY: (1,),
    CLASS_BOUNDED_SMALL: tuple(range(3, 9)),
    CLASS_BOUNDED_LARGE: tuple(range(3, 10)),
    CLASS_FLYING_SMALL: (N_POINTS,),
    CLASS_FLYING_LARGE: (N_POINTS,),
    CLASS_LOOP: (N_POINTS,),
    CLASS_HAPHAZARD: (N_POINTS,),
    CLASS_BACKTRACKER: tuple(range(7, 18)),
    CLASS_LINEAR: (2,) + tuple(range(10, N_POINTS + 1)),
}
SYNTH_CLASSES = tuple(FEASIBLE_UNIQUE)


def feasible_unique_counts(label):
    try:
        return FEASIBLE_UNIQUE[label]
    except KeyError:
        raise ConfigError("class %r cannot be synthesized" % (label,)) from None


def _normalized(counts, name):
    total = float(sum(counts.values()))
    if total <= 0 or any(v < 0 for v in counts.values()):
        raise ConfigError("%s must be non-negative with a positive total" % name)
    return {key: value / total for key, value in counts.items()}


@dataclass(frozen=True)
class ProfileTarget:
    class_mix: Dict[str, float]
    unique_hist: Optional[Dict[int, float]] = None

    def __post_init__(self):
        mix = {str(k): float(v) for k, v in self.class_mix.items()}
        for label in mix:
            feasible_unique_counts(label)
        if abs(sum(mix.values()) - 1.0) > SUM_TOLERANCE or any(v < 0 for v in mix.values()):
            raise ConfigError("class_mix must be a distribution")
        object.__setattr__(self, 'class_mix', mix)
        if self.unique_hist is not None:
            hist = {int(k): float(v) for k, v in self.unique_hist.items()}
            if any(not 1 <= k <= N_POINTS for k in hist):
                raise ConfigError("unique counts must lie in 1..%d" % N_POINTS)
            if abs(sum(hist.values()) - 1.0) > SUM_TOLERANCE or any(v < 0 for v in hist.values()):
                raise ConfigError("unique_hist must be a distribution")
            object.__setattr__(self, 'unique_hist', hist)

    @classmethod
    def from_counts(cls, class_counts, unique_counts=None):
        return cls(_normalized(class_counts, 'class counts'),
                   None if unique_counts is None
                   else _normalized(unique_counts, 'unique counts'))

    @classmethod
    def from_dict(cls, values):
        try:
            if 'class_counts' in values:
                return cls.from_counts(values['class_counts'], values.get('unique_counts'))
            if 'class_mix' in values:
                return cls(values['class_mix'], values.get('unique_hist'))
        except (AttributeError, TypeError, ValueError) as err:
            raise ConfigError("invalid profile target: %s" % err) from None
        raise ConfigError("target needs class_counts or class_mix")

    @classmethod
    def default(cls):
        return cls.from_dict(read_package_json(SDD_TARGET_FILE))

    def to_dict(self):
        return {'class_mix': dict(self.class_mix),
                'unique_hist': None if self.unique_hist is None
                else {str(k): v for k, v in sorted(self.unique_hist.items())}}


def _largest_remainder(weights, total):
    """Non-negative integers proportional to ``weights`` summing to ``total``"""
    weights = np.asarray(weights, dtype=np.float64)
    exact = weights / weights.sum() * total
    counts = np.floor(exact + SUM_TOLERANCE).astype(int)
    short = total - int(counts.sum())
    if short > 0:
        order = np.argsort(-(exact - counts), kind='stable')
        counts[order[:short]] += 1
    return counts


def allocate(target, count):
    """Number of trajectories per (class, unique count) cell"""
    labels = [label for label in SYNTH_CLASSES if target.class_mix.get(label, 0) > 0]
    if target.unique_hist is None:
        class_counts = _largest_remainder([target.class_mix[l] for l in labels], count)
        return {(label, None): int(n) for label, n in zip(labels, class_counts) if n}

    cells = [(label, u) for label in labels for u in FEASIBLE_UNIQUE[label]]
    uniques = sorted(target.unique_hist)
    a_eq = np.zeros((len(labels) + len(uniques), len(cells)))
    for column, (label, u) in enumerate(cells):
        a_eq[labels.index(label), column] = 1.0
        if u in target.unique_hist:
            a_eq[len(labels) + uniques.index(u), column] = 1.0
    b_eq = np.array([target.class_mix[l] for l in labels]
                    + [target.unique_hist[u] for u in uniques])
    # cells whose unique count has no target weight must stay empty
    bounds = [(0, None) if u in target.unique_hist else (0, 0) for _, u in cells]
    result = linprog(np.zeros(len(cells)), A_eq=a_eq, b_eq=b_eq, bounds=bounds,
                     method='highs')
    if result.status != 0:
        raise InfeasibleTargetError("no allocation matches both class and unique "
                                    "point proportions (%s)" % result.message)
    counts = _largest_remainder(np.maximum(result.x, 0.0), count)
    return {cell: int(n) for cell, n in zip(cells, counts) if n}


def _runs(locations, rng):
    """Visits each location once, dwelling a random positive number of frames"""
    cuts = np.sort(rng.choice(np.arange(1, N_POINTS), size=len(locations) - 1, replace=False))
    lengths = np.diff(np.concatenate([[0], cuts, [N_POINTS]]))
    return np.repeat(locations, lengths, axis=0)


def _heading(angle):
    return np.array([math.cos(angle), math.sin(angle)])


def _stationary(u, origin, rng):
    return np.repeat(origin[np.newaxis], N_POINTS, axis=0)


def _bounded_small(u, origin, rng):
    return _runs(origin + rng.uniform(0.0, 4.5, size=(u, 2)), rng)


def _bounded_large(u, origin, rng):
    base = rng.uniform(0.0, 2.0 * math.pi)
    locations = [origin]
    for _ in range(u - 1):
        step = rng.uniform(3.0, 10.0) * _heading(base + rng.uniform(-1.0, 1.0))
        locations.append(locations[-1] + step)
    return _runs(np.array(locations), rng)


def _flying_small(u, origin, rng):
    drift = rng.uniform(8.0, 15.0) * _heading(rng.uniform(0.0, 2.0 * math.pi))
    i = np.arange(N_POINTS)[:, np.newaxis]
    return origin + i * drift + rng.uniform(-0.5, 0.5, size=(N_POINTS, 2))


def _flying_large(u, origin, rng):
    angle = rng.uniform(0.0, 2.0 * math.pi)
    drift = rng.uniform(30.0, 40.0) * _heading(angle)
    across = _heading(angle + math.pi / 2.0)
    i = np.arange(N_POINTS)[:, np.newaxis]
    wobble = rng.uniform(5.0, 15.0) * np.sin(2.0 * math.pi * i / (N_POINTS - 1)
                                             + rng.uniform(0.0, 2.0 * math.pi))
    return origin + i * drift + wobble * across


def _loop(u, origin, rng):
    spec = CurveSpec(kind=CURVE_CIRCLE, radius=rng.uniform(3.0, 12.0), n=N_POINTS,
                     sampling=SAMPLING_VARIABLE, jitter=0.1, center=tuple(origin),
                     phase=rng.uniform(0.0, 2.0 * math.pi))
    return gen_curve(spec, rng).points


def _haphazard(u, origin, rng):
    lengths = rng.uniform(6.0, 15.0, size=N_POINTS - 1)
    angles = rng.uniform(0.0, 2.0 * math.pi, size=N_POINTS - 1)
    steps = lengths[:, np.newaxis] * np.column_stack([np.cos(angles), np.sin(angles)])
    return origin + np.vstack([np.zeros(2), np.cumsum(steps, axis=0)])


def _backtracker(u, origin, rng):
    turnaround = u - 1
    angle = rng.uniform(0.0, 2.0 * math.pi)
    forward = [origin]
    for _ in range(turnaround):
        angle += rng.uniform(-0.5, 0.5)
        forward.append(forward[-1] + rng.uniform(1.0, 3.0) * _heading(angle))
    back = forward[-2::-1][:N_POINTS - 1 - turnaround]
    points = forward + back
    # home again early: wait at the start
    points += [forward[0]] * (N_POINTS - len(points))
    return np.array(points)


def _linear(u, origin, rng):
    direction = _heading(rng.uniform(0.0, 2.0 * math.pi))
    speed = rng.uniform(0.5, 4.0)
    locations = origin + np.arange(u)[:, np.newaxis] * speed * direction
    return _runs(locations, rng)


RECIPES = {
    CLASS_STATIONARY: _stationary,
    CLASS_BOUNDED_SMALL: _bounded_small,
    CLASS_BOUNDED_LARGE: _bounded_large,
    CLASS_FLYING_SMALL: _flying_small,
    CLASS_FLYING_LARGE: _flying_large,
    CLASS_LOOP: _loop,
    CLASS_HAPHAZARD: _haphazard,
    CLASS_BACKTRACKER: _backtracker,
    CLASS_LINEAR: _linear,
}


def realize(label, u, rng):
    """One trajectory that classifies as ``label`` with ``u`` unique points"""
    for attempt in range(MAX_ATTEMPTS):
        origin = rng.uniform(0.0, SCENE_EXTENT, size=2)
        t = Trajectory(RECIPES[label](u, origin, rng))
        if classify(t, DEFAULT_THRESHOLDS) == label and unique_points(t) == u:
            return t
        LOGGER.debug("Rejected %s candidate with %d unique points (attempt %d)",
                     label, u, attempt + 1)
    raise SynthesisError("could not realize %s with %d unique points" % (label, u))


def gen_synsdd(target, count, rng, label='syn-sdd'):
    if int(count) != count or count < 1:
        raise ConfigError("count must be an integer >= 1, got %r" % (count,))
    plan = []
    for (cls_label, u), n in sorted(allocate(target, count).items(),
                                    key=lambda item: (item[0][0], item[0][1] or 0)):
        plan.extend([(cls_label, u)] * n)
    order = rng.permutation(len(plan))
    trajectories = []
    for index, position in enumerate(order):
        cls_label, u = plan[position]
        item_rng = rng.derive(index)
        if u is None:
            u = int(item_rng.choice(FEASIBLE_UNIQUE[cls_label]))
        trajectories.append(realize(cls_label, u, item_rng))
    LOGGER.info("Synthesized %d trajectories over %d classes", count,
                len({cell[0] for cell in plan}))
    return Dataset.from_trajectories(trajectories, label=label)


def _rotation(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rt_augment(d, n_rot, rng, angle_range=(-math.pi, math.pi), translate=True):
    """``n_rot`` rigid copies of every trajectory.

    Each copy is rotated about its first point by an angle drawn from
    ``angle_range`` and, with ``translate``, shifted so that it stays
    inside its scene's bounds when it fits. Agent ``a`` yields agents
    ``a * n_rot .. a * n_rot + n_rot - 1``.
    """
    if int(n_rot) != n_rot or n_rot < 1:
        raise ConfigError("n_rot must be an integer >= 1, got %r" % (n_rot,))
    low, high = angle_range
    scenes = []
    for scene in d.scenes:
        entries = []
        for agent_id, traj in scene.trajectories:
            anchor = traj.points[0]
            for r in range(n_rot):
                theta = rng.uniform(low, high)
                points = traj.points
                if theta != 0.0:
                    points = anchor + (points - anchor) @ _rotation(theta).T
                if translate and scene.bounds is not None:
                    lo = np.array([scene.bounds.xmin, scene.bounds.ymin]) - points.min(axis=0)
                    hi = np.array([scene.bounds.xmax, scene.bounds.ymax]) - points.max(axis=0)
                    offset = np.where(lo <= hi, rng.uniform(np.minimum(lo, hi), np.maximum(lo, hi)),
                                      0.0)
                    points = points + offset
                entries.append((agent_id * n_rot + r, traj.with_points(points)))
        scenes.append(Scene(tuple(entries), frame0=scene.frame0, bounds=scene.bounds,
                            scene_id=scene.scene_id))
    LOGGER.info("Augmented %d trajectories into %d", len(d), len(d) * n_rot)
    return Dataset(tuple(scenes), label=d.label)


@dataclass(frozen=True, eq=False)
class MixSpec:
    base: Dataset
    synth: Dataset
    fraction: float
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ConfigError("fraction must be in (0, 1], got %r" % (self.fraction,))
        if self.fraction == 1 and len(self.base):
            raise ConfigError("fraction 1 leaves no room for base trajectories")

    @property
    def synth_count(self):
        if self.fraction == 1:
            return len(self.synth)
        return math.ceil(self.fraction / (1.0 - self.fraction) * len(self.base)
                         - SUM_TOLERANCE)

    def to_dict(self):
        return {'base': self.base.label, 'synth': self.synth.label,
                'fraction': self.fraction, 'seed': self.seed,
                'base_count': len(self.base), 'synth_count': self.synth_count}


def mix(spec, rng=None):
    """Base plus a uniform synthetic subset so synthetic trajectories make up
    ``spec.fraction`` of the result, shuffled into a single scene"""
    rng = SeededRng(spec.seed) if rng is None else rng
    wanted = spec.synth_count
    pool = spec.synth.trajectories()
    if wanted > len(pool):
        raise InsufficientPoolError("need %d synthetic trajectories, pool has %d"
                                    % (wanted, len(pool)))
    chosen = rng.choice(len(pool), size=wanted, replace=False) if wanted else []
    combined = spec.base.trajectories() + [pool[i] for i in sorted(chosen)]
    shuffled = [combined[i] for i in rng.permutation(len(combined))]
    LOGGER.info("Mixed %d base and %d synthetic trajectories", len(spec.base), wanted)
    return Dataset.from_trajectories(shuffled, label='mix')
