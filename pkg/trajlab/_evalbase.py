# -*- coding: utf-8 -*-
"""
    trajlab.evalbase
    ~~~~~~~~~~~~~~~~

    Newtonian baseline predictors and the evaluation harness that splits
    trajectories, predicts K futures each and scores them with
    best-of-K ADE/FDE, broken down by qualitative class.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
from collections import defaultdict
from dataclasses import dataclass, replace

# environment imports
import numpy as np

# custom imports
from trajlab._analysis import classify
from trajlab._const import (
    ATTR_ADE, ATTR_COUNT, ATTR_FDE, PREDICTOR_CONSTANT_VELOCITY,
    PREDICTOR_LINEAR_FIT, PREDICTOR_STATIONARY)
from trajlab._core import SeededRng
from trajlab._exceptions import ConfigError, EmptyDatasetError, TrajectoryLengthError
from trajlab._metrics import evaluate

# local constants
LOGGER = logging.getLogger(__name__)

PREDICTORS = (PREDICTOR_CONSTANT_VELOCITY, PREDICTOR_LINEAR_FIT, PREDICTOR_STATIONARY)

EVAL_ROW_HEADER = ('scene_id', 'agent_id', 'class', 'ade', 'fde')


@dataclass(frozen=True)
class Predictor:
    kind: str = PREDICTOR_CONSTANT_VELOCITY
    k_samples: int = 1
    jitter_sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in PREDICTORS:
            raise ConfigError("unknown predictor %r" % (self.kind,))
        if int(self.k_samples) != self.k_samples or self.k_samples < 1:
            raise ConfigError("k_samples must be an integer >= 1, got %r" % (self.k_samples,))
        if not self.jitter_sigma >= 0:
            raise ConfigError("jitter_sigma must be >= 0")

    @property
    def min_observed(self):
        return 1 if self.kind == PREDICTOR_STATIONARY else 2

    def to_dict(self):
        return {'kind': self.kind, 'k_samples': self.k_samples,
                'jitter_sigma': self.jitter_sigma}


def _line_direction(obs):
    """Unit principal axis of ``obs``, pointing the way the agent moved"""
    centered = obs - obs.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    direction = vt[0]
    if np.dot(direction, obs[-1] - obs[0]) < 0:
        direction = -direction
    return direction


def _extrapolate(p, obs, pred_len):
    ahead = np.arange(1, pred_len + 1)[:, np.newaxis]
    if p.kind == PREDICTOR_STATIONARY:
        return np.repeat(obs[-1:], pred_len, axis=0)
    if p.kind == PREDICTOR_CONSTANT_VELOCITY:
        return obs[-1] + ahead * (obs[-1] - obs[-2])
    speed = np.linalg.norm(np.diff(obs, axis=0), axis=1).mean()
    if speed == 0:
        return np.repeat(obs[-1:], pred_len, axis=0)
    direction = _line_direction(obs)
    center = obs.mean(axis=0)
    anchor = center + np.dot(obs[-1] - center, direction) * direction
    return anchor + ahead * speed * direction


def predict(p, obs, pred_len, rng):
    """``p.k_samples`` futures of ``pred_len`` points after ``obs``.

    The first future is the plain extrapolation; every further one moves
    its endpoint by N(0, jitter_sigma^2) per axis and the points before it
    by the same offset scaled with (i + 1) / pred_len.
    """
    obs = np.asarray(obs, dtype=np.float64)
    if obs.ndim != 2 or len(obs) < p.min_observed:
        raise TrajectoryLengthError("%s needs %d observed points, got %d"
                                    % (p.kind, p.min_observed, len(obs)))
    base = _extrapolate(p, obs, pred_len)
    futures = [base]
    ramp = np.arange(1, pred_len + 1)[:, np.newaxis] / pred_len
    for _ in range(p.k_samples - 1):
        offset = rng.normal(0.0, p.jitter_sigma, size=2) if p.jitter_sigma else np.zeros(2)
        futures.append(base + ramp * offset)
    return futures


def _class_breakdown(labels, per_trajectory):
    groups = defaultdict(list)
    for label, errors in zip(labels, per_trajectory):
        groups[label].append(errors)
    breakdown = {}
    for label in sorted(groups):
        values = np.array(groups[label])
        breakdown[label] = {ATTR_COUNT: len(values),
                            ATTR_ADE: float(values[:, 0].mean()),
                            ATTR_FDE: float(values[:, 1].mean())}
    return breakdown


def run_eval(d, p, cfg, rng=None):
    """Evaluate predictor ``p`` on every trajectory of ``d``.

    ``cfg.k`` wins over ``p.k_samples``; trajectory i predicts with
    ``rng.derive(i)``.
    """
    rng = SeededRng(0) if rng is None else rng
    trajectories = d.trajectories()
    if not trajectories:
        raise EmptyDatasetError("nothing to evaluate")
    if p.k_samples != cfg.k:
        LOGGER.debug("Using k=%d samples instead of %d", cfg.k, p.k_samples)
        p = replace(p, k_samples=cfg.k)
    samples, truths, labels = [], [], []
    for index, t in enumerate(trajectories):
        if not t.has_eval_shape:
            raise TrajectoryLengthError("trajectory %d has %d points, expected %d"
                                        % (index, len(t), t.obs_len + t.pred_len))
        samples.append(predict(p, t.observed, t.pred_len, rng.derive(index)))
        truths.append(t.future)
        labels.append(classify(t))
    report = evaluate(samples, truths, cfg)
    LOGGER.info("Evaluated %s on %d trajectories: ade %.4f fde %.4f",
                p.kind, len(trajectories), report.ade, report.fde)
    return replace(report, per_class=_class_breakdown(labels, report.per_trajectory))


def eval_rows(d, report):
    """Per-trajectory (scene, agent, class, ade, fde) rows of a report"""
    rows = []
    for (scene_id, agent_id), t, (ade_value, fde_value) in zip(
            d.keys(), d.trajectories(), report.per_trajectory):
        rows.append((scene_id, agent_id, classify(t), ade_value, fde_value))
    return rows

