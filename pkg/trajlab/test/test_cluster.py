import itertools
import unittest

import numpy as np

from trajlab._cluster import (
    NormKind, bbox_cluster, distance_matrix, kmedoids, traj_distance)
from trajlab._core import Dataset, SeededRng, Trajectory
from trajlab._exceptions import ConfigError, EmptyDatasetError, LengthMismatchError


def random_dataset(seed, n, length=20):
    rng = np.random.default_rng(seed)
    offsets = rng.choice([-20.0, 20.0], size=(n, 1, 2))
    return Dataset.from_trajectories(
        [Trajectory(offset + np.cumsum(rng.normal(size=(length, 2)), axis=0))
         for offset in offsets])


def brute_force_cost(dist, k):
    return min(dist[:, list(medoids)].min(axis=1).sum()
               for medoids in itertools.combinations(range(len(dist)), k))


class DistanceTestCase(unittest.TestCase):
    def test_norm_values(self):
        a = Trajectory([[0.0, 0.0], [0.0, 0.0]])
        b = Trajectory([[3.0, 0.0], [0.0, 4.0]])
        self.assertAlmostEqual(traj_distance(a, b, NormKind.FROBENIUS), 5.0)
        self.assertAlmostEqual(traj_distance(a, b, NormKind.L1), 7.0)
        self.assertAlmostEqual(traj_distance(a, b, NormKind.LINF), 4.0)
        self.assertAlmostEqual(traj_distance(a, b, NormKind.L2OP), 4.0)

    def test_norm_ordering(self):
        rng = np.random.default_rng(8)
        zero = Trajectory(np.zeros((6, 2)))
        for _ in range(1000):
            other = Trajectory(rng.normal(size=(6, 2)))
            linf, l2op, fro, l1 = (traj_distance(zero, other, kind) for kind in (
                NormKind.LINF, NormKind.L2OP, NormKind.FROBENIUS, NormKind.L1))
            self.assertLessEqual(linf, l2op + 1e-12)
            self.assertLessEqual(l2op, fro + 1e-12)
            self.assertLessEqual(fro, l1 + 1e-12)

    def test_length_mismatch(self):
        with self.assertRaises(LengthMismatchError):
            traj_distance(Trajectory(np.zeros((3, 2))), Trajectory(np.zeros((4, 2))))

    def test_matrix_symmetric(self):
        dist = distance_matrix(random_dataset(1, 5).trajectories(), 'l1')
        np.testing.assert_array_equal(dist, dist.T)
        np.testing.assert_array_equal(np.diag(dist), np.zeros(5))


class KMedoidsTestCase(unittest.TestCase):
    def test_matches_exhaustive_optimum(self):
        for seed, norm, limit in itertools.product(range(5), NormKind, (256, 0)):
            with self.subTest(seed=seed, norm=norm, exhaustive_limit=limit):
                d = random_dataset(seed, 8)
                result = kmedoids(d, 2, norm, SeededRng(seed), exhaustive_limit=limit)
                dist = distance_matrix(d.trajectories(), norm)
                self.assertAlmostEqual(result.total_cost, brute_force_cost(dist, 2), places=9)

    def test_swap_search_on_larger_sets(self):
        d = random_dataset(4, 12)
        result = kmedoids(d, 3, NormKind.FROBENIUS, SeededRng(4), exhaustive_limit=0)
        dist = distance_matrix(d.trajectories(), NormKind.FROBENIUS)
        self.assertEqual(len(set(result.medoids)), 3)
        history = result.cost_history
        self.assertTrue(all(b <= a for a, b in zip(history, history[1:])))
        self.assertGreaterEqual(result.total_cost, brute_force_cost(dist, 3) - 1e-9)

    def test_medoids_are_members(self):
        d = random_dataset(2, 10)
        result = kmedoids(d, 3, NormKind.L1, SeededRng(0), exhaustive_limit=0)
        for cluster, medoid in enumerate(result.medoids):
            self.assertIn(medoid, result.members(cluster))
        rows = result.rows()
        self.assertEqual(sum(is_medoid for _, _, is_medoid in rows), 3)
        self.assertEqual(sum(c['size'] for c in result.summary()['clusters']), 10)

    def test_k_equals_n(self):
        d = random_dataset(3, 4)
        result = kmedoids(d, 4, NormKind.LINF, SeededRng(0))
        self.assertEqual(result.total_cost, 0.0)
        self.assertEqual(sorted(result.assignments), [0, 1, 2, 3])

    def test_reproducible(self):
        d = random_dataset(6, 15)
        first = kmedoids(d, 4, NormKind.L2OP, SeededRng(9), exhaustive_limit=0)
        second = kmedoids(d, 4, NormKind.L2OP, SeededRng(9), exhaustive_limit=0)
        self.assertEqual(first.assignments, second.assignments)

    def test_errors(self):
        d = random_dataset(0, 4)
        for k in (0, 5, 1.5):
            with self.subTest(k=k):
                with self.assertRaises(ConfigError):
                    kmedoids(d, k, NormKind.FROBENIUS, SeededRng(0))
        with self.assertRaises(EmptyDatasetError):
            kmedoids(Dataset(()), 1, NormKind.FROBENIUS, SeededRng(0))
        mixed = Dataset.from_trajectories([Trajectory(np.zeros((3, 2))),
                                           Trajectory(np.ones((4, 2)))])
        with self.assertRaises(LengthMismatchError):
            kmedoids(mixed, 1, NormKind.FROBENIUS, SeededRng(0))


class BBoxClusterTestCase(unittest.TestCase):
    def test_bins(self):
        d = Dataset.from_trajectories([
            Trajectory([[0.0, 0.0], [0.0, 0.0]]),
            Trajectory([[0.0, 0.0], [4.0, 1.0]]),
            Trajectory([[0.0, 0.0], [11.0, 5.0]]),
        ])
        self.assertEqual(bbox_cluster(d, (5.0, 5.0)), {(1, 1): [0, 1], (3, 1): [2]})

    def test_bad_bins(self):
        with self.assertRaises(ConfigError):
            bbox_cluster(Dataset(()), (0.0, 1.0))
