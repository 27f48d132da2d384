# -*- coding: utf-8 -*-
"""
    trajlab.cluster
    ~~~~~~~~~~~~~~~

    Matrix-norm distances between equally long trajectories, k-medoids
    (PAM) clustering with member representatives and bounding-box
    binning.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import enum
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import NORM_FROBENIUS, NORM_L1, NORM_L2OP, NORM_LINF
from trajlab._core import tight_bbox
from trajlab._exceptions import ConfigError, EmptyDatasetError, LengthMismatchError

# local constants
LOGGER = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 256
SWAP_TOLERANCE = 1e-12


class NormKind(enum.Enum):
    FROBENIUS = NORM_FROBENIUS
    L1 = NORM_L1
    L2OP = NORM_L2OP
    LINF = NORM_LINF


def _matrix_norm(diff, norm):
    if norm is NormKind.FROBENIUS:
        return float(np.sqrt(np.sum(diff * diff)))
    if norm is NormKind.L1:
        return float(np.abs(diff).sum())
    if norm is NormKind.LINF:
        return float(np.abs(diff).max())
    # largest singular value from the 2x2 Gram matrix
    top = np.linalg.eigvalsh(diff.T @ diff)[-1]
    return float(np.sqrt(max(top, 0.0)))


def traj_distance(a, b, norm=NormKind.FROBENIUS):
    norm = NormKind(norm)
    if len(a) != len(b):
        raise LengthMismatchError("cannot compare %d and %d point trajectories"
                                  % (len(a), len(b)))
    return _matrix_norm(a.points - b.points, norm)


def distance_matrix(trajectories, norm=NormKind.FROBENIUS):
    norm = NormKind(norm)
    n = len(trajectories)
    dist = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = traj_distance(trajectories[i], trajectories[j], norm)
    return dist


@dataclass(frozen=True, eq=False)
class Clustering:
    assignments: Tuple[int, ...]
    medoids: Tuple[int, ...]
    k: int
    total_cost: float
    norm: NormKind = NormKind.FROBENIUS
    cost_history: Tuple[float, ...] = ()
    distances: np.ndarray = None

    def members(self, cluster):
        return [i for i, c in enumerate(self.assignments) if c == cluster]

    def rows(self):
        """(index, cluster, is_medoid) per trajectory"""
        medoids = set(self.medoids)
        return [(i, c, int(i in medoids)) for i, c in enumerate(self.assignments)]

    def summary(self):
        clusters = []
        for cluster, medoid in enumerate(self.medoids):
            members = self.members(cluster)
            cost = (float(self.distances[members, medoid].sum())
                    if self.distances is not None else None)
            clusters.append({'cluster': cluster, 'medoid': medoid,
                             'size': len(members), 'cost': cost})
        return {'k': self.k, 'norm': self.norm.value,
                'total_cost': self.total_cost, 'clusters': clusters,
                'cost_history': list(self.cost_history)}


def _cost(dist, medoids):
    return float(dist[:, list(medoids)].min(axis=1).sum())


def _assign(dist, medoids):
    labels = np.argmin(dist[:, medoids], axis=1)
    labels[medoids] = np.arange(len(medoids))
    return labels


def _farthest_first(dist, k, first):
    medoids = [first]
    nearest = dist[first].copy()
    while len(medoids) < k:
        candidate = int(np.argmax(nearest))
        if candidate in medoids:
            # duplicates only left
            candidate = next(i for i in range(len(dist)) if i not in medoids)
        medoids.append(candidate)
        nearest = np.minimum(nearest, dist[candidate])
    return sorted(medoids)


def _pam(dist, medoids, max_iter):
    """Voronoi alternation followed by greedy best-swap search"""
    n = len(dist)
    history = [_cost(dist, medoids)]
    for _ in range(max_iter):
        labels = _assign(dist, medoids)
        updated = []
        for cluster in range(len(medoids)):
            members = np.flatnonzero(labels == cluster)
            within = dist[np.ix_(members, members)].sum(axis=1)
            updated.append(int(members[np.argmin(within)]))
        updated = sorted(updated)
        cost = _cost(dist, updated)
        if cost < history[-1] - SWAP_TOLERANCE:
            medoids = updated
            history.append(cost)
            continue
        best, best_cost = None, history[-1]
        for position, h in itertools.product(range(len(medoids)), range(n)):
            if h in medoids:
                continue
            candidate = sorted(medoids[:position] + [h] + medoids[position + 1:])
            cost = _cost(dist, candidate)
            if cost < best_cost - SWAP_TOLERANCE:
                best, best_cost = candidate, cost
        if best is None:
            break
        medoids = best
        history.append(best_cost)
    return medoids, history


def _exhaustive(dist, k):
    best, best_cost = None, math.inf
    for medoids in itertools.combinations(range(len(dist)), k):
        cost = _cost(dist, medoids)
        if cost < best_cost - SWAP_TOLERANCE:
            best, best_cost = list(medoids), cost
    return best, [best_cost]


def kmedoids(d, k, norm, rng, max_iter=100, n_init=4, exhaustive_limit=EXHAUSTIVE_LIMIT):
    """Partitioning around medoids over the trajectories of ``d``.

    Problems with at most ``exhaustive_limit`` medoid subsets are solved by
    enumeration. Otherwise ``n_init`` farthest-first starts, each seeded by
    a random first medoid, are refined by PAM and the cheapest is kept.
    """
    norm = NormKind(norm)
    trajectories = d.trajectories()
    n = len(trajectories)
    if n == 0:
        raise EmptyDatasetError("cannot cluster an empty dataset")
    if int(k) != k or not 1 <= k <= n:
        raise ConfigError("k must be in [1, %d], got %r" % (n, k))
    if len({len(t) for t in trajectories}) != 1:
        raise LengthMismatchError("clustering needs trajectories of equal length")
    dist = distance_matrix(trajectories, norm)

    if math.comb(n, k) <= exhaustive_limit:
        medoids, history = _exhaustive(dist, k)
    else:
        medoids, history = None, None
        for first in rng.choice(n, size=min(n_init, n), replace=False):
            start = _farthest_first(dist, k, int(first))
            candidate, candidate_history = _pam(dist, start, max_iter)
            LOGGER.debug("PAM start %d finished at cost %s", first, candidate_history[-1])
            if history is None or candidate_history[-1] < history[-1] - SWAP_TOLERANCE:
                medoids, history = candidate, candidate_history

    labels = _assign(dist, medoids)
    LOGGER.info("Clustered %d trajectories into %d clusters (%s), cost %s",
                n, k, norm.value, history[-1])
    return Clustering(tuple(int(c) for c in labels), tuple(medoids), int(k),
                      history[-1], norm, tuple(history), dist)


def bbox_cluster(d, bins):
    """Groups trajectory indices by (ceil(bbox_w / w), ceil(bbox_h / h))"""
    width, height = bins
    if not (width > 0 and height > 0):
        raise ConfigError("bin dimensions must be positive, got %r" % (bins,))
    groups = defaultdict(list)
    for index, t in enumerate(d.trajectories()):
        box = tight_bbox(t)
        key = (max(1, math.ceil(box.width / width)), max(1, math.ceil(box.height / height)))
        groups[key].append(index)
    return dict(sorted(groups.items()))
