import math
import unittest

import numpy as np

from trajlab._const import (
    ACCEL_VARIABLE, CURVE_CIRCLE, CURVE_LINE, CURVE_LOOP, CURVE_SPIRAL,
    SAMPLING_VARIABLE)
from trajlab._core import SeededRng
from trajlab._exceptions import ConfigError
from trajlab._genkin import (
    CurveSpec, NewtonSpec, NoiseSpec, NoisyNewtonSpec, Range2, add_noise,
    gen_batch, gen_curve, gen_newton, gen_noisy)
from trajlab._io import format_dataset


class NewtonTestCase(unittest.TestCase):
    def test_closed_form(self):
        spec = NewtonSpec(x0=(0.0, 0.0), v0=(0.0, 0.0), accel=(2.0, 0.0), steps=6)
        t = gen_newton(spec, SeededRng(0))
        np.testing.assert_allclose(t.points[:, 0], np.arange(6) ** 2, atol=1e-12)
        np.testing.assert_allclose(t.points[:, 1], np.zeros(6), atol=1e-12)

    def test_constant_second_difference(self):
        spec = NewtonSpec(x0=(1.0, -2.0), v0=(0.5, 1.5), accel=(0.3, -0.1), dt=0.4)
        second = np.diff(gen_newton(spec, SeededRng(0)).points, n=2, axis=0)
        np.testing.assert_allclose(second, np.tile([0.3 * 0.16, -0.1 * 0.16], (18, 1)),
                                   atol=1e-9)

    def test_variable_acceleration_bounded(self):
        spec = NewtonSpec(v0=(1.0, 0.0), accel_mode=ACCEL_VARIABLE, accel_bound=0.5)
        t = gen_newton(spec, SeededRng(3))
        second = np.diff(t.points, n=2, axis=0)
        self.assertTrue(np.all(np.abs(second) <= 1.0 + 1e-12))
        self.assertFalse(np.allclose(second, second[0]))

    def test_ranges_vary_per_trajectory(self):
        spec = NewtonSpec.from_dict({'x0': {'low': [0, 0], 'high': [10, 10]},
                                     'v0': [1, 0]})
        d = gen_batch(gen_newton, spec, 5, SeededRng(1))
        starts = {tuple(t.points[0]) for t in d.trajectories()}
        self.assertEqual(len(starts), 5)
        for t in d.trajectories():
            self.assertTrue(np.all((t.points[0] >= 0) & (t.points[0] <= 10)))

    def test_invalid(self):
        for values in ({'accel_mode': 'jerk'}, {'steps': 1}, {'dt': 0.0},
                       {'accel_bound': -1.0}, {'speed': 2.0}):
            with self.subTest(values=values):
                with self.assertRaises(ConfigError):
                    NewtonSpec.from_dict(values)
        with self.assertRaises(ConfigError):
            Range2((1.0, 0.0), (0.0, 0.0))


class NoiseTestCase(unittest.TestCase):
    def test_zero_sigma_is_identity(self):
        t = gen_newton(NewtonSpec(), SeededRng(0))
        self.assertIs(add_noise(t, NoiseSpec(0.0), SeededRng(1)), t)

    def test_noise_std(self):
        spec = NoisyNewtonSpec(NewtonSpec(steps=10000), NoiseSpec(0.7))
        clean = gen_newton(spec.newton, SeededRng(0))
        noisy = gen_noisy(spec, SeededRng(0))
        residual = noisy.points - clean.points
        self.assertAlmostEqual(residual.std() / 0.7, 1.0, delta=0.05)

    def test_needs_sigma(self):
        with self.assertRaises(ConfigError):
            NoisyNewtonSpec.from_dict({'v0': [1, 0]})
        with self.assertRaises(ConfigError):
            NoiseSpec(-0.1)


class CurveTestCase(unittest.TestCase):
    def test_circle_on_curve(self):
        spec = CurveSpec(kind=CURVE_CIRCLE, radius=3.0, center=(1.0, 2.0),
                         sampling=SAMPLING_VARIABLE, jitter=0.3)
        t = gen_curve(spec, SeededRng(5))
        radii = np.linalg.norm(t.points - np.array([1.0, 2.0]), axis=1)
        np.testing.assert_allclose(radii, 3.0, atol=1e-9)

    def test_circle_does_not_close(self):
        t = gen_curve(CurveSpec(kind=CURVE_CIRCLE, radius=1.0, n=4), SeededRng(0))
        np.testing.assert_allclose(t.points, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-12)

    def test_spiral_radius_grows(self):
        spec = CurveSpec(kind=CURVE_SPIRAL, a=1.0, b=0.5, turns=2.0)
        radii = np.linalg.norm(gen_curve(spec, SeededRng(0)).points, axis=1)
        self.assertTrue(np.all(np.diff(radii) > 0))
        self.assertAlmostEqual(radii[-1], 1.0 + 0.5 * 4 * math.pi)

    def test_loop_and_line(self):
        loop = gen_curve(CurveSpec(kind=CURVE_LOOP, radius=2.0, lobes=3), SeededRng(0))
        self.assertTrue(np.all(np.linalg.norm(loop.points, axis=1) <= 2.0 + 1e-12))
        line = gen_curve(CurveSpec(kind=CURVE_LINE, length=19.0, phase=math.pi / 2), SeededRng(0))
        np.testing.assert_allclose(line.points[:, 1], np.arange(20), atol=1e-9)

    def test_invalid(self):
        for values in ({'kind': 'ellipse'}, {'n': 2}, {'jitter': 1.0},
                       {'kind': CURVE_CIRCLE, 'radius': 0.0},
                       {'kind': CURVE_SPIRAL, 'a': 0.0, 'b': 0.0}):
            with self.subTest(values=values):
                with self.assertRaises(ConfigError):
                    CurveSpec.from_dict(values)


class BatchTestCase(unittest.TestCase):
    def test_deterministic(self):
        spec = NoisyNewtonSpec.from_dict({'v0': {'low': [-1, -1], 'high': [1, 1]},
                                          'sigma': 0.2})
        first = format_dataset(gen_batch(gen_noisy, spec, 10, SeededRng(12), label='n'))
        second = format_dataset(gen_batch(gen_noisy, spec, 10, SeededRng(12), label='n'))
        self.assertEqual(first, second)

    def test_count(self):
        with self.assertRaises(ConfigError):
            gen_batch(gen_newton, NewtonSpec(), 0, SeededRng(0))
