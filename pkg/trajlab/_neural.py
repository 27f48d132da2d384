# -*- coding: utf-8 -*-
"""
    trajlab.neural
    ~~~~~~~~~~~~~~

    Small dense networks with ReLU, sine (SIREN) and identity layers,
    hand-written reverse mode gradients and plain gradient descent.

    A sine layer computes ``sin(omega0 * (W x + b))``. Inputs are single
    vectors or row-stacked batches; the forward pass caches what the
    following backward pass needs.

    :license: BSD, see LICENSE for more details.
"""

# python imports
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

# environment imports
import numpy as np

# custom imports
from trajlab._const import (
    ACTIVATION_IDENTITY, ACTIVATION_RELU, ACTIVATION_SINE, DEFAULT_OMEGA0,
    INIT_DEFAULT, INIT_SIREN)
from trajlab._exceptions import (
    BackwardBeforeForwardError, ConfigError, EmptyDatasetError,
    NonFiniteOutputError, ShapeMismatchError)

# local constants
LOGGER = logging.getLogger(__name__)

ACTIVATIONS = (ACTIVATION_RELU, ACTIVATION_SINE, ACTIVATION_IDENTITY)
LR_GROWTH = 1.05
LR_SHRINK = 0.5


@dataclass(frozen=True, eq=False)
class Layer:
    weights: np.ndarray
    bias: np.ndarray
    activation: str = ACTIVATION_IDENTITY
    omega0: float = DEFAULT_OMEGA0

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64)
        bias = np.array(self.bias, dtype=np.float64)
        if weights.ndim != 2 or bias.shape != (weights.shape[0],):
            raise ShapeMismatchError("weights %s do not match bias %s"
                                     % (weights.shape, bias.shape))
        if not (np.all(np.isfinite(weights)) and np.all(np.isfinite(bias))):
            raise NonFiniteOutputError("layer parameters must be finite")
        if self.activation not in ACTIVATIONS:
            raise ConfigError("unknown activation %r" % (self.activation,))
        if not self.omega0 > 0:
            raise ConfigError("omega0 must be positive")
        object.__setattr__(self, 'weights', weights)
        object.__setattr__(self, 'bias', bias)

    @property
    def fan_in(self):
        return self.weights.shape[1]

    @property
    def fan_out(self):
        return self.weights.shape[0]

    def activate(self, z):
        if self.activation == ACTIVATION_RELU:
            return np.maximum(z, 0.0)
        if self.activation == ACTIVATION_SINE:
            return np.sin(self.omega0 * z)
        return z

    def derivative(self, z):
        if self.activation == ACTIVATION_RELU:
            return (z > 0.0).astype(np.float64)
        if self.activation == ACTIVATION_SINE:
            return self.omega0 * np.cos(self.omega0 * z)
        return np.ones_like(z)

    def to_dict(self):
        return {'in': self.fan_in, 'out': self.fan_out,
                'activation': self.activation, 'omega0': self.omega0,
                'weights': self.weights.ravel().tolist(),
                'bias': self.bias.tolist()}

    @classmethod
    def from_dict(cls, values):
        try:
            weights = np.array(values['weights'], dtype=np.float64).reshape(
                values['out'], values['in'])
            return cls(weights, values['bias'], values.get('activation', ACTIVATION_IDENTITY),
                       values.get('omega0', DEFAULT_OMEGA0))
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError("invalid layer document: %s" % err) from None


@dataclass(frozen=True, eq=False)
class Gradients:
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]

    def __add__(self, other):
        return Gradients(tuple(a + b for a, b in zip(self.weights, other.weights)),
                         tuple(a + b for a, b in zip(self.biases, other.biases)))

    def scale(self, factor):
        return Gradients(tuple(w * factor for w in self.weights),
                         tuple(b * factor for b in self.biases))

    def flat(self):
        return np.concatenate([a.ravel() for pair in zip(self.weights, self.biases)
                               for a in pair])

    @classmethod
    def zeros_like(cls, m):
        return cls(tuple(np.zeros_like(layer.weights) for layer in m.layers),
                   tuple(np.zeros_like(layer.bias) for layer in m.layers))


class Mlp:
    """Chain of layers; the last forward pass is cached for backward"""

    def __init__(self, layers):
        self.layers: List[Layer] = list(layers)
        if not self.layers:
            raise ConfigError("network needs at least one layer")
        for previous, layer in zip(self.layers, self.layers[1:]):
            if previous.fan_out != layer.fan_in:
                raise ShapeMismatchError("layer of width %d feeds fan-in %d"
                                         % (previous.fan_out, layer.fan_in))
        self._cache = None

    def __repr__(self):
        dims = [self.input_dim] + [layer.fan_out for layer in self.layers]
        return "<Mlp %s>" % "-".join(str(d) for d in dims)

    @property
    def input_dim(self):
        return self.layers[0].fan_in

    @property
    def output_dim(self):
        return self.layers[-1].fan_out

    @classmethod
    def build(cls, sizes, hidden=ACTIVATION_SINE, output=ACTIVATION_IDENTITY,
              omega0=DEFAULT_OMEGA0):
        """Zero-initialized network with layer widths ``sizes``"""
        if len(sizes) < 2:
            raise ConfigError("sizes needs input and output widths")
        layers = []
        for index, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
            activation = output if index == len(sizes) - 2 else hidden
            layers.append(Layer(np.zeros((n_out, n_in)), np.zeros(n_out), activation, omega0))
        return cls(layers)

    def parameters(self):
        return [(layer.weights, layer.bias) for layer in self.layers]

    def with_parameters(self, weights, biases):
        return Mlp(Layer(w, b, layer.activation, layer.omega0)
                   for layer, w, b in zip(self.layers, weights, biases))

    def to_dict(self):
        return {'layers': [layer.to_dict() for layer in self.layers]}

    @classmethod
    def from_dict(cls, values):
        try:
            return cls(Layer.from_dict(layer) for layer in values['layers'])
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError("invalid network document: %s" % err) from None


def _init(m, rng, bound_of):
    weights = [rng.uniform(-bound_of(i, layer), bound_of(i, layer), size=layer.weights.shape)
               for i, layer in enumerate(m.layers)]
    return m.with_parameters(weights, [np.zeros_like(layer.bias) for layer in m.layers])


def siren_init(m, rng):
    """First layer U(-1/n, 1/n), later layers U(-sqrt(6/n)/omega0, +...)"""
    if any(layer.activation != ACTIVATION_SINE for layer in m.layers[:-1]):
        raise ConfigError("siren initialization needs sine hidden layers")

    def bound(index, layer):
        if index == 0:
            return 1.0 / layer.fan_in
        return math.sqrt(6.0 / layer.fan_in) / layer.omega0
    return _init(m, rng, bound)


def default_init(m, rng):
    """He uniform for ReLU layers, Glorot uniform otherwise"""
    def bound(index, layer):
        if layer.activation == ACTIVATION_RELU:
            return math.sqrt(6.0 / layer.fan_in)
        return math.sqrt(6.0 / (layer.fan_in + layer.fan_out))
    return _init(m, rng, bound)


INITIALIZERS = {
    INIT_SIREN: siren_init,
    INIT_DEFAULT: default_init,
}


def forward(m, x):
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = np.atleast_2d(x)
    if batch.ndim != 2 or batch.shape[1] != m.input_dim:
        raise ShapeMismatchError("input %s does not match input_dim %d"
                                 % (x.shape, m.input_dim))
    inputs, pre = [], []
    a = batch
    for layer in m.layers:
        inputs.append(a)
        z = a @ layer.weights.T + layer.bias
        pre.append(z)
        a = layer.activate(z)
    m._cache = (inputs, pre, single)
    return a[0] if single else a


def backward(m, upstream):
    """Gradients of sum(upstream * output) for the cached forward pass"""
    if m._cache is None:
        raise BackwardBeforeForwardError("backward called before forward")
    inputs, pre, single = m._cache
    grad = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
    if grad.shape != pre[-1].shape:
        raise ShapeMismatchError("upstream %s does not match output %s"
                                 % (np.shape(upstream), pre[-1].shape))
    weights, biases = [], []
    for layer, a, z in zip(reversed(m.layers), reversed(inputs), reversed(pre)):
        dz = grad * layer.derivative(z)
        weights.append(dz.T @ a)
        biases.append(dz.sum(axis=0))
        grad = dz @ layer.weights
    return Gradients(tuple(reversed(weights)), tuple(reversed(biases)))


def sgd_step(m, g, lr):
    if lr < 0:
        raise ConfigError("learning rate must be >= 0")
    if len(g.weights) != len(m.layers) or any(
            gw.shape != layer.weights.shape or gb.shape != layer.bias.shape
            for layer, gw, gb in zip(m.layers, g.weights, g.biases)):
        raise ShapeMismatchError("gradients do not match the network")
    return m.with_parameters([layer.weights - lr * gw for layer, gw in zip(m.layers, g.weights)],
                             [layer.bias - lr * gb for layer, gb in zip(m.layers, g.biases)])


def mse_loss(m, inputs, targets):
    """Mean squared error and its gradient with respect to the output"""
    error = forward(m, inputs) - targets
    return float(np.mean(error * error)), 2.0 * error / error.size


@dataclass(frozen=True, eq=False)
class FitResult:
    mlp: Mlp
    losses: Tuple[float, ...]
    final_loss: float
    lr: float


def fit_signal(m, samples, epochs, lr):
    """Full-batch gradient descent on ``[(t, y), ...]``.

    ``losses[e]`` is the loss entering epoch e. A step that raises the
    loss is undone and the learning rate halved; an accepted step grows
    it slightly, so the curve never increases.
    """
    if not samples:
        raise EmptyDatasetError("no signal samples to fit")
    if not lr > 0:
        raise ConfigError("learning rate must be positive")
    inputs = np.array([[float(t)] if np.ndim(t) == 0 else t for t, _ in samples],
                      dtype=np.float64)
    targets = np.array([np.atleast_1d(y) for _, y in samples], dtype=np.float64)
    loss, upstream = mse_loss(m, inputs, targets)
    losses = []
    for epoch in range(int(epochs)):
        losses.append(loss)
        grads = backward(m, upstream)
        candidate = sgd_step(m, grads, lr)
        candidate_loss, candidate_upstream = mse_loss(candidate, inputs, targets)
        if candidate_loss <= loss:
            m, loss, upstream = candidate, candidate_loss, candidate_upstream
            lr *= LR_GROWTH
        else:
            lr *= LR_SHRINK
            # restore the cache of the kept network
            loss, upstream = mse_loss(m, inputs, targets)
        if epoch % 500 == 0:
            LOGGER.debug("epoch %d loss %.6g lr %.3g", epoch, loss, lr)
    LOGGER.info("Fitted %d samples over %d epochs, final loss %.6g",
                len(samples), int(epochs), loss)
    return FitResult(m, tuple(losses), loss, lr)
