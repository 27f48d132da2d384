# -*- coding: utf-8 -*-
"""
    trajlab.metrics
    ~~~~~~~~~~~~~~~

    Abruptness score (turn-quantized cross products, raw and areally
    scaled), displacement errors and best-of-K evaluation.

    A turn between consecutive displacement vectors a and b scores
    ``ceil(deg(theta) / 10) * |a x b|`` where theta is the arcsine of the
    normalized cross product, shifted by pi/2 when the turn is obtuse
    (a . b < 0).

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import (
    CEIL_SNAP, DEFAULT_K, DEFAULT_STANDARDIZATION, DEGREES_PER_BUCKET,
    EPS_AREA, SCALING_AREA, SCALING_LENGTH)
from trajlab._core import tight_bbox
from trajlab._exceptions import (
    ConfigError, EmptyDatasetError, LengthMismatchError, TrajectoryLengthError)

# local constants
LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class TurnScore:
    theta: float
    cross_mag: float
    score: float


@dataclass(frozen=True)
class AbScoreReport:
    raw: float
    scaled: float
    scaling_mode: str
    per_turn: Tuple[TurnScore, ...] = ()

    def to_dict(self):
        return {
            'raw': self.raw,
            'scaled': self.scaled,
            'scaling_mode': self.scaling_mode,
            'per_turn': [asdict(turn) for turn in self.per_turn],
        }


def _turn_terms(a, b):
    """Vectorized theta, |a x b| and score for rows of a and b"""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    cross = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    dot = a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1]
    norms = np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1)
    moving = norms > 0.0
    ratio = np.zeros_like(cross)
    np.divide(cross, norms, out=ratio, where=moving)
    theta = np.abs(np.arcsin(np.clip(ratio, 0.0, 1.0)))
    theta = np.where(moving & (dot < 0.0), theta + math.pi / 2.0, theta)
    theta = np.where(moving, theta, 0.0)
    cross = np.where(moving, cross, 0.0)
    buckets = np.ceil(180.0 * theta / (DEGREES_PER_BUCKET * math.pi) - CEIL_SNAP)
    return theta, cross, buckets * cross


def turn_score(a, b):
    theta, cross, score = _turn_terms(a, b)
    return TurnScore(float(theta[0]), float(cross[0]), float(score[0]))


def abscore(t):
    """Sum of turn scores over consecutive point triples of ``t``"""
    if len(t) < 3:
        raise TrajectoryLengthError("abscore needs at least 3 points, got %d" % len(t))
    steps = np.diff(t.points, axis=0)
    theta, cross, score = _turn_terms(steps[:-1], steps[1:])
    raw = float(score.sum())
    area = tight_bbox(t).area
    if area > EPS_AREA:
        mode, scaled = SCALING_AREA, raw / area
    else:
        length = t.path_length
        mode, scaled = SCALING_LENGTH, (raw / length if length > 0 else 0.0)
    per_turn = tuple(TurnScore(float(th), float(cr), float(sc))
                     for th, cr, sc in zip(theta, cross, score))
    return AbScoreReport(raw, scaled, mode, per_turn)


def _aligned(pred, gt):
    pred = np.asarray(pred, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if pred.shape != gt.shape or pred.ndim != 2 or len(pred) < 1:
        raise LengthMismatchError("prediction %s and ground truth %s differ"
                                  % (pred.shape, gt.shape))
    return pred, gt


def ade(pred, gt, std=1.0):
    if not std > 0:
        raise ConfigError("standardization must be positive, got %r" % (std,))
    pred, gt = _aligned(pred, gt)
    return float(np.linalg.norm(pred - gt, axis=1).mean() / std)


def fde(pred, gt):
    pred, gt = _aligned(pred, gt)
    return float(np.linalg.norm(pred[-1] - gt[-1]))


def displacement_errors(samples, gt):
    """(k,) ADE and FDE arrays for k sample futures against one ground truth"""
    samples = np.asarray(samples, dtype=np.float64)
    gt = np.asarray(gt, dtype=np.float64)
    if samples.ndim != 3 or samples.shape[1:] != gt.shape:
        raise LengthMismatchError("samples %s do not match ground truth %s"
                                  % (samples.shape, gt.shape))
    dist = np.linalg.norm(samples - gt[np.newaxis], axis=2)
    return dist.mean(axis=1), dist[:, -1]


@dataclass(frozen=True)
class EvalConfig:
    k: int = DEFAULT_K
    standardization: float = DEFAULT_STANDARDIZATION
    legacy_scale_bug: bool = False
    decoupled: bool = False

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ConfigError("k must be an integer >= 1, got %r" % (self.k,))
        if not self.standardization > 0:
            raise ConfigError("standardization must be positive, got %r"
                              % (self.standardization,))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class EvalReport:
    ade: float
    fde: float
    per_trajectory: Tuple[Tuple[float, float], ...]
    config: EvalConfig
    per_class: Dict[str, Dict[str, float]] = field(default_factory=dict)

    def to_dict(self):
        return {
            'ade': self.ade,
            'fde': self.fde,
            'count': len(self.per_trajectory),
            'per_class': self.per_class,
            'config': self.config.to_dict(),
        }


def evaluate(samples, gt, cfg):
    """Best-of-K ADE/FDE over trajectories.

    ``samples[i]`` holds ``cfg.k`` futures for ground truth ``gt[i]``.
    Coupled mode reports the ADE of the FDE-best sample; decoupled mode
    takes both minima independently.
    """
    if len(gt) == 0:
        raise EmptyDatasetError("nothing to evaluate")
    if len(samples) != len(gt):
        raise LengthMismatchError("%d sample sets for %d trajectories"
                                  % (len(samples), len(gt)))
    per_trajectory: List[Tuple[float, float]] = []
    for index, (futures, truth) in enumerate(zip(samples, gt)):
        if len(futures) != cfg.k:
            raise LengthMismatchError("trajectory %d has %d samples, expected %d"
                                      % (index, len(futures), cfg.k))
        ades, fdes = displacement_errors(futures, truth)
        if cfg.decoupled:
            best_ade, best_fde = float(ades.min()), float(fdes.min())
        else:
            best = int(np.argmin(fdes))
            best_ade, best_fde = float(ades[best]), float(fdes[best])
        if cfg.legacy_scale_bug:
            best_ade /= cfg.standardization
        per_trajectory.append((best_ade, best_fde))
    values = np.array(per_trajectory)
    LOGGER.debug("Evaluated %d trajectories (k=%d, decoupled=%s)",
                 len(values), cfg.k, cfg.decoupled)
    return EvalReport(float(values[:, 0].mean()), float(values[:, 1].mean()),
                      tuple(per_trajectory), cfg)
