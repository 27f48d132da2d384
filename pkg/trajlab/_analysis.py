# -*- coding: utf-8 -*-
"""
    trajlab.analysis
    ~~~~~~~~~~~~~~~~

    Unique-point counting and rule-based assignment of the qualitative
    trajectory classes, aggregated into a dataset profile.

    Rules are tried in priority order; the first match wins:

    T1  a single unique point (stationary)
    T6  backtracker: the path is retraced right after a turnaround
    T4  start and end within the small box while the path leaves it
    T2F/T3F  uniform drift ("flying") around a small/large box
    T5  haphazard drift: large steps in scattered directions
    T2  3-8 unique points inside the small box
    T3  3-9 unique points inside the large box
    T7  scaled abruptness below the linearity threshold
    TX  anything else

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Dict

# environment imports
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

# custom imports
from trajlab._const import (
    ATTR_ABSCORE, ATTR_ABSCORE_SCALED, ATTR_CLASSES, ATTR_COUNT, ATTR_PERCENT,
    ATTR_TRAJECTORIES, ATTR_UNIQUE_POINTS,
    BACKTRACK_MIN_FORWARD, BACKTRACK_MIN_RETRACE, BACKTRACK_TOLERANCE,
    CLASS_BACKTRACKER, CLASS_BOUNDED_LARGE, CLASS_BOUNDED_SMALL,
    CLASS_FLYING_LARGE, CLASS_FLYING_SMALL, CLASS_HAPHAZARD, CLASS_LINEAR,
    CLASS_LOOP, CLASS_STATIONARY, CLASS_UNCLASSIFIED,
    FLYING_MAX_CIRCVAR, FLYING_MIN_STEP, HAPHAZARD_MIN_CIRCVAR, LARGE_BOX,
    LINEARITY_THRESHOLD, QUAL_CLASSES, SMALL_BOX)
from trajlab._core import Rect, tight_bbox
from trajlab._exceptions import ConfigError, EmptyDatasetError, TrajectoryLengthError
from trajlab._metrics import abscore

# local constants
LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClassifierThresholds:
    """Every threshold the class rules use, in scene units"""
    small_box: float = SMALL_BOX
    large_box: float = LARGE_BOX
    unique_tol: float = 0.0
    backtrack_tol: float = BACKTRACK_TOLERANCE
    backtrack_min_forward: int = BACKTRACK_MIN_FORWARD
    backtrack_min_retrace: int = BACKTRACK_MIN_RETRACE
    linearity_threshold: float = LINEARITY_THRESHOLD
    flying_min_step: float = FLYING_MIN_STEP
    flying_max_circvar: float = FLYING_MAX_CIRCVAR
    haphazard_min_circvar: float = HAPHAZARD_MIN_CIRCVAR

    def __post_init__(self):
        if not 0 < self.small_box <= self.large_box:
            raise ConfigError("need 0 < small_box <= large_box")
        if self.unique_tol < 0 or self.backtrack_tol < 0:
            raise ConfigError("tolerances must be >= 0")

    def to_dict(self):
        return asdict(self)


DEFAULT_THRESHOLDS = ClassifierThresholds()


def unique_points(t, tol=0.0):
    """Number of distinct points; points within ``tol`` (Chebyshev) merge"""
    if tol < 0:
        raise ConfigError("tol must be >= 0, got %r" % (tol,))
    pts = t.points
    if tol == 0:
        return len(np.unique(pts, axis=0))
    cheb = np.abs(pts[:, np.newaxis, :] - pts[np.newaxis, :, :]).max(axis=2)
    n_components, _ = connected_components(csr_matrix(cheb <= tol), directed=False)
    return int(n_components)


def circular_variance(steps):
    """1 - |mean unit vector| over the non-zero steps (0 when none move)"""
    steps = np.asarray(steps, dtype=np.float64)
    lengths = np.linalg.norm(steps, axis=1)
    moving = lengths > 0
    if not np.any(moving):
        return 0.0
    units = steps[moving] / lengths[moving, np.newaxis]
    return float(1.0 - np.linalg.norm(units.mean(axis=0)))


def _within(rect, side):
    return rect.width <= side and rect.height <= side


def _is_backtracker(pts, th):
    n = len(pts)
    for m in range(th.backtrack_min_forward, n - th.backtrack_min_retrace):
        if np.abs(pts[m] - pts[m - 1]).max() <= th.backtrack_tol:
            continue
        retrace = 0
        for j in range(1, min(m, n - 1 - m) + 1):
            if np.abs(pts[m + j] - pts[m - j]).max() > th.backtrack_tol:
                break
            retrace = j
        if retrace >= th.backtrack_min_retrace:
            return True
    return False


def _flying_class(pts, steps, th):
    mean_step = steps.mean(axis=0)
    if np.linalg.norm(steps, axis=1).mean() <= th.flying_min_step:
        return None
    if circular_variance(steps) >= th.flying_max_circvar:
        return None
    residual = pts - pts[0] - np.arange(len(pts))[:, np.newaxis] * mean_step
    box = Rect.around(residual)
    if _within(box, th.small_box):
        return CLASS_FLYING_SMALL
    if _within(box, th.large_box):
        return CLASS_FLYING_LARGE
    return None


def classify(t, thresholds=DEFAULT_THRESHOLDS):
    th = thresholds
    if not t.has_eval_shape:
        raise TrajectoryLengthError("classify expects %d points, got %d"
                                    % (t.obs_len + t.pred_len, len(t)))
    pts = t.points
    unique = unique_points(t, th.unique_tol)
    if unique == 1:
        return CLASS_STATIONARY
    if _is_backtracker(pts, th):
        return CLASS_BACKTRACKER
    box = tight_bbox(t)
    if (np.abs(pts[0] - pts[-1]).max() <= th.small_box
            and not _within(box, th.small_box)):
        return CLASS_LOOP
    steps = np.diff(pts, axis=0)
    flying = _flying_class(pts, steps, th)
    if flying is not None:
        return flying
    if (circular_variance(steps) > th.haphazard_min_circvar
            and np.linalg.norm(steps, axis=1).mean() > th.flying_min_step):
        return CLASS_HAPHAZARD
    if 3 <= unique <= 8 and _within(box, th.small_box):
        return CLASS_BOUNDED_SMALL
    if 3 <= unique <= 9 and _within(box, th.large_box):
        return CLASS_BOUNDED_LARGE
    if abscore(t).scaled < th.linearity_threshold:
        return CLASS_LINEAR
    return CLASS_UNCLASSIFIED


def _stats(values):
    if not values:
        return {'min': None, 'max': None, 'mean': None, 'std': None}
    arr = np.array(values)
    return {'min': float(arr.min()), 'max': float(arr.max()),
            'mean': float(arr.mean()), 'std': float(arr.std())}


@dataclass(frozen=True)
class DatasetProfile:
    count: int
    unique_counts: Dict[int, int]
    class_counts: Dict[str, int]
    abscore_stats: Dict[str, float]
    scaled_abscore_stats: Dict[str, float]

    def unique_proportions(self):
        return {u: c / self.count for u, c in self.unique_counts.items()}

    def class_proportions(self):
        return {label: c / self.count for label, c in self.class_counts.items()}

    def to_dict(self):
        return {
            ATTR_TRAJECTORIES: self.count,
            ATTR_UNIQUE_POINTS: [
                {ATTR_UNIQUE_POINTS: u, ATTR_COUNT: c, ATTR_PERCENT: 100.0 * c / self.count}
                for u, c in sorted(self.unique_counts.items())],
            ATTR_CLASSES: [
                {'class': label, ATTR_COUNT: self.class_counts[label],
                 ATTR_PERCENT: 100.0 * self.class_counts[label] / self.count}
                for label in QUAL_CLASSES],
            ATTR_ABSCORE: self.abscore_stats,
            ATTR_ABSCORE_SCALED: self.scaled_abscore_stats,
        }


def _safe_classify(t, thresholds):
    try:
        return classify(t, thresholds)
    except TrajectoryLengthError as err:
        LOGGER.warning("Counting trajectory as %s: %s", CLASS_UNCLASSIFIED, err)
        return CLASS_UNCLASSIFIED


def profile(d, thresholds=DEFAULT_THRESHOLDS):
    trajectories = d.trajectories()
    if not trajectories:
        raise EmptyDatasetError("cannot profile an empty dataset")
    max_len = max(len(t) for t in trajectories)
    unique_counts = {u: 0 for u in range(1, max_len + 1)}
    unique_counts.update(Counter(unique_points(t, thresholds.unique_tol)
                                 for t in trajectories))
    class_counts = dict.fromkeys(QUAL_CLASSES, 0)
    class_counts.update(Counter(_safe_classify(t, thresholds) for t in trajectories))
    raw, scaled = [], []
    for t in trajectories:
        if len(t) < 3:
            LOGGER.debug("Skipping %d-point trajectory in abscore statistics", len(t))
            continue
        report = abscore(t)
        raw.append(report.raw)
        scaled.append(report.scaled)
    LOGGER.info("Profiled %d trajectories of %s", len(trajectories), d.label or 'dataset')
    return DatasetProfile(len(trajectories), unique_counts, class_counts,
                          _stats(raw), _stats(scaled))


TRAJECTORY_ROW_HEADER = ('scene_id', 'agent_id', 'unique_points', 'class',
                         'abscore', 'abscore_scaled')


def trajectory_rows(d, thresholds=DEFAULT_THRESHOLDS):
    """Per-trajectory (scene, agent, unique points, class, abscore) rows"""
    rows = []
    for (scene_id, agent_id), t in zip(d.keys(), d.trajectories()):
        report = abscore(t) if len(t) >= 3 else None
        rows.append((scene_id, agent_id, unique_points(t, thresholds.unique_tol),
                     _safe_classify(t, thresholds),
                     report.raw if report else 0.0,
                     report.scaled if report else 0.0))
    return rows
