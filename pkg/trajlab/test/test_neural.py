import unittest

import numpy as np

from trajlab._const import ACTIVATION_IDENTITY, ACTIVATION_RELU, ACTIVATION_SINE
from trajlab._core import SeededRng
from trajlab._exceptions import (
    BackwardBeforeForwardError, ConfigError, EmptyDatasetError,
    NonFiniteOutputError, ShapeMismatchError)
from trajlab._neural import (
    Layer, Mlp, backward, default_init, fit_signal, forward, mse_loss,
    sgd_step, siren_init)

EPSILON = 1e-6


def with_random_biases(net, rng):
    # zero biases put ReLU inputs exactly on the kink
    biases = [rng.uniform(-0.5, 0.5, size=layer.fan_out) for layer in net.layers]
    return net.with_parameters([layer.weights for layer in net.layers], biases)


def mixed_net(rng):
    """relu then sine hidden layers, default initialized"""
    net = Mlp([Layer(np.zeros((5, 3)), np.zeros(5), ACTIVATION_RELU),
               Layer(np.zeros((4, 5)), np.zeros(4), ACTIVATION_SINE, omega0=3.0),
               Layer(np.zeros((2, 4)), np.zeros(2), ACTIVATION_IDENTITY)])
    return with_random_biases(default_init(net, rng), rng)


def random_net(index, rng):
    kind = index % 3
    if kind == 0:
        return with_random_biases(
            default_init(Mlp.build([3, 6, 5, 2], hidden=ACTIVATION_RELU), rng), rng)
    if kind == 1:
        return siren_init(Mlp.build([3, 6, 5, 2], hidden=ACTIVATION_SINE), rng)
    return mixed_net(rng)


def numeric_gradient(net, x, upstream):
    flat = []
    for layer_index, layer in enumerate(net.layers):
        for array_index, array in enumerate((layer.weights, layer.bias)):
            grad = np.zeros_like(array)
            for position in np.ndindex(array.shape):
                values = []
                for sign in (1.0, -1.0):
                    weights = [item.weights.copy() for item in net.layers]
                    biases = [item.bias.copy() for item in net.layers]
                    target = (weights, biases)[array_index][layer_index]
                    target[position] += sign * EPSILON
                    shifted = net.with_parameters(weights, biases)
                    values.append(np.sum(forward(shifted, x) * upstream))
                grad[position] = (values[0] - values[1]) / (2 * EPSILON)
            flat.append(grad.ravel())
    return np.concatenate(flat)


class LayerTestCase(unittest.TestCase):
    def test_shapes(self):
        with self.assertRaises(ShapeMismatchError):
            Layer(np.zeros((2, 3)), np.zeros(3))
        with self.assertRaises(ShapeMismatchError):
            Mlp([Layer(np.zeros((2, 3)), np.zeros(2)), Layer(np.zeros((1, 3)), np.zeros(1))])

    def test_non_finite(self):
        with self.assertRaises(NonFiniteOutputError):
            Layer([[np.inf]], [0.0])

    def test_unknown_activation(self):
        with self.assertRaises(ConfigError):
            Layer([[1.0]], [0.0], 'tanh')

    def test_document(self):
        net = siren_init(Mlp.build([2, 4, 1]), SeededRng(0))
        again = Mlp.from_dict(net.to_dict())
        x = np.array([[0.1, -0.3], [0.5, 0.2]])
        np.testing.assert_array_equal(forward(net, x), forward(again, x))


class GradientTestCase(unittest.TestCase):
    def test_against_finite_differences(self):
        root = SeededRng(21)
        for index in range(100):
            rng = root.derive(index)
            net = random_net(index, rng)
            x = rng.uniform(-1.0, 1.0, size=(4, 3))
            upstream = rng.normal(size=(4, 2))
            forward(net, x)
            analytic = backward(net, upstream).flat()
            numeric = numeric_gradient(net, x, upstream)
            scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
            with self.subTest(index=index):
                self.assertLess(np.linalg.norm(analytic - numeric) / scale, 1e-4)

    def test_single_input(self):
        net = default_init(Mlp.build([2, 3, 1], hidden=ACTIVATION_RELU), SeededRng(1))
        out = forward(net, np.array([0.5, -0.5]))
        self.assertEqual(out.shape, (1,))
        grads = backward(net, np.ones(1))
        self.assertEqual(grads.weights[0].shape, (3, 2))

    def test_sine_activations_bounded(self):
        net = siren_init(Mlp.build([1, 16, 16, 1]), SeededRng(2))
        x = np.linspace(-1.0, 1.0, 50)[:, np.newaxis]
        for depth in (1, 2):
            hidden = forward(Mlp(net.layers[:depth]), x)
            self.assertTrue(np.all(np.abs(hidden) <= 1.0))

    def test_errors(self):
        net = Mlp.build([2, 3, 1])
        with self.assertRaises(BackwardBeforeForwardError):
            backward(net, np.ones(1))
        with self.assertRaises(ShapeMismatchError):
            forward(net, np.ones(3))
        forward(net, np.ones(2))
        with self.assertRaises(ShapeMismatchError):
            backward(net, np.ones(2))

    def test_sgd_step(self):
        net = default_init(Mlp.build([2, 3, 1], hidden=ACTIVATION_RELU), SeededRng(3))
        forward(net, np.array([[1.0, 2.0]]))
        grads = backward(net, np.ones((1, 1)))
        moved = sgd_step(net, grads, 0.1)
        np.testing.assert_allclose(moved.layers[0].weights,
                                   net.layers[0].weights - 0.1 * grads.weights[0])
        wider = Mlp.build([2, 4, 1])
        forward(wider, np.ones(2))
        with self.assertRaises(ShapeMismatchError):
            sgd_step(net, backward(wider, np.ones(1)), 0.1)

    def test_siren_init_needs_sine(self):
        with self.assertRaises(ConfigError):
            siren_init(Mlp.build([1, 4, 1], hidden=ACTIVATION_RELU), SeededRng(0))

    def test_siren_bounds(self):
        net = siren_init(Mlp.build([1, 64, 64, 1]), SeededRng(4))
        self.assertLessEqual(np.abs(net.layers[0].weights).max(), 1.0)
        self.assertLessEqual(np.abs(net.layers[1].weights).max(), np.sqrt(6 / 64) / 30)


class FitSignalTestCase(unittest.TestCase):
    def samples(self):
        t = np.linspace(-1.0, 1.0, 256)
        return list(zip(t, np.sin(10.0 * t)))

    def test_loss_never_increases(self):
        net = siren_init(Mlp.build([1, 16, 1]), SeededRng(5))
        result = fit_signal(net, self.samples(), 200, 1e-3)
        self.assertEqual(len(result.losses), 200)
        self.assertTrue(all(b <= a for a, b in zip(result.losses, result.losses[1:])))
        self.assertLessEqual(result.final_loss, result.losses[0])

    def test_fits_sine(self):
        net = siren_init(Mlp.build([1, 64, 64, 64, 1]), SeededRng(0))
        result = fit_signal(net, self.samples(), 4000, 1e-4)
        inputs = np.linspace(-1.0, 1.0, 256)[:, np.newaxis]
        loss, _ = mse_loss(result.mlp, inputs, np.sin(10.0 * inputs))
        self.assertLess(loss, 1e-3)

    def test_errors(self):
        net = Mlp.build([1, 2, 1])
        with self.assertRaises(EmptyDatasetError):
            fit_signal(net, [], 10, 0.1)
        with self.assertRaises(ConfigError):
            fit_signal(net, self.samples(), 10, 0.0)
