"""Small deterministic feed-forward engine around one encoder layer.

The network is: encoder (categorical + numeric input -> K pre-activations),
an activation on those K units, then zero or more dense layers.  Training is
plain SGD on mean squared error, one example per step.

Determinism contract: all parameters come from one seeded stream in a fixed
draw order, all accumulations run in ascending index order, and the per-step
encoder delta ``lr * dLoss/dz_k`` is computed once and handed to the encoder
verbatim.  Two networks built from the same seed and fed the same examples
produce bit-identical parameter trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .counters import OpCounters
from .errors import InvalidArgumentError, NumericError
from .layers import AugmentedBinaryLayer, BinaryLayer, Encoder, OneHotLayer
from .rng import SplitMix64


class Activation(str, Enum):
    IDENTITY = "identity"
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self is Activation.IDENTITY:
            return z.copy()
        if self is Activation.SIGMOID:
            return 1.0 / (1.0 + np.exp(-z))
        if self is Activation.TANH:
            return np.tanh(z)
        return np.maximum(z, 0.0)

    def derivative(self, z: np.ndarray, activated: np.ndarray) -> np.ndarray:
        """Derivative at z, reusing the already-computed activation value."""
        if self is Activation.IDENTITY:
            return np.ones_like(z)
        if self is Activation.SIGMOID:
            return activated * (1.0 - activated)
        if self is Activation.TANH:
            return 1.0 - activated * activated
        return np.where(z > 0.0, 1.0, 0.0)  # derivative taken as 0 at the kink


@dataclass
class DenseLayer:
    """Fully connected layer: out = activation(weights.T @ x + bias)."""

    weights: np.ndarray  # (fan_in, fan_out)
    bias: np.ndarray  # (fan_out,)
    activation: Activation

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2:
            raise InvalidArgumentError("weights must be 2-d")
        if self.bias.shape != (self.weights.shape[1],):
            raise InvalidArgumentError("bias length must match weights fan_out")
        self.activation = Activation(self.activation)

    @property
    def fan_in(self) -> int:
        return self.weights.shape[0]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[1]

    @property
    def param_count(self) -> int:
        return self.weights.size + self.bias.size

    def forward(self, x: np.ndarray, counters: OpCounters | None = None) -> np.ndarray:
        z = np.zeros(self.fan_out)
        for i in range(self.fan_in):
            z += self.weights[i] * x[i]
        z += self.bias
        if counters is not None:
            counters.downstream_madds += self.fan_in * self.fan_out
        return z


@dataclass
class ForwardCache:
    """Everything backprop needs from one forward pass."""

    category: int
    numerics: np.ndarray
    pre_activations: list[np.ndarray]  # encoder z first, then each dense z
    activations: list[np.ndarray]  # matching post-activation values

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


@dataclass
class Network:
    encoder: Encoder
    encoder_activation: Activation
    layers: list[DenseLayer] = field(default_factory=list)
    folded_forward: bool = False

    def __post_init__(self):
        self.encoder_activation = Activation(self.encoder_activation)
        fan = self.encoder.k
        for idx, layer in enumerate(self.layers):
            if layer.fan_in != fan:
                raise InvalidArgumentError(
                    f"layer {idx} expects fan_in {layer.fan_in}, previous width is {fan}"
                )
            fan = layer.fan_out

    @property
    def output_width(self) -> int:
        return self.layers[-1].fan_out if self.layers else self.encoder.k

    @property
    def param_count(self) -> int:
        return self.encoder.param_count + sum(layer.param_count for layer in self.layers)

    def _encoder_forward(self, category, numerics, counters) -> np.ndarray:
        if self.folded_forward and isinstance(self.encoder, AugmentedBinaryLayer):
            return self.encoder.forward_folded(category, numerics, counters)
        return self.encoder.forward(category, numerics, counters)

    def forward(self, category: int, numerics=(), counters: OpCounters | None = None) -> ForwardCache:
        numerics = np.asarray(numerics, dtype=np.float64)
        z = self._encoder_forward(category, numerics, counters)
        if not np.all(np.isfinite(z)):
            raise NumericError("non-finite encoder pre-activation")
        a = self.encoder_activation.apply(z)
        pre = [z]
        post = [a]
        for layer in self.layers:
            z = layer.forward(post[-1], counters)
            if not np.all(np.isfinite(z)):
                raise NumericError("non-finite dense pre-activation")
            pre.append(z)
            post.append(layer.activation.apply(z))
        return ForwardCache(int(category), numerics, pre, post)

    def backprop_deltas(self, cache: ForwardCache, target: np.ndarray) -> list[np.ndarray]:
        """Per-stage dLoss/dz, output layer last reversed to encoder first.

        Reads only pre-update weights, so the caller may apply updates in any
        stage order afterwards.
        """
        target = np.asarray(target, dtype=np.float64)
        grad = mse_gradient(cache.output, target)
        deltas: list[np.ndarray] = []
        stages = [(self.encoder_activation, None)] + [
            (layer.activation, layer) for layer in self.layers
        ]
        for idx in range(len(stages) - 1, -1, -1):
            activation, _ = stages[idx]
            dz = grad * activation.derivative(cache.pre_activations[idx], cache.activations[idx])
            deltas.append(dz)
            if idx > 0:
                layer = stages[idx][1]
                grad = np.zeros(layer.fan_in)
                for k in range(layer.fan_out):
                    grad += layer.weights[:, k] * dz[k]
        deltas.reverse()
        return deltas

    def sgd_step(
        self,
        category: int,
        numerics,
        target,
        learning_rate: float,
        counters: OpCounters | None = None,
    ) -> np.ndarray:
        """One forward/backward/update pass; returns the encoder delta used."""
        cache = self.forward(category, numerics, counters)
        deltas = self.backprop_deltas(cache, target)
        for idx in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[idx]
            step = learning_rate * deltas[idx + 1]
            layer.weights -= np.outer(cache.activations[idx], step)
            layer.bias -= step
        encoder_delta = learning_rate * deltas[0]
        self.encoder.apply_update(category, cache.numerics, encoder_delta, counters)
        return encoder_delta

    def predict(self, category: int, numerics=()) -> np.ndarray:
        return self.forward(category, numerics).output


def mse_loss(output: np.ndarray, target: np.ndarray) -> float:
    output = np.asarray(output, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if output.shape != target.shape:
        raise InvalidArgumentError("output and target shapes differ")
    total = 0.0
    for j in range(output.shape[0]):
        diff = output[j] - target[j]
        total += diff * diff
    return total / output.shape[0]


def mse_gradient(output: np.ndarray, target: np.ndarray) -> np.ndarray:
    output = np.asarray(output, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if output.shape != target.shape:
        raise InvalidArgumentError("output and target shapes differ")
    return 2.0 * (output - target) / output.shape[0]


@dataclass(frozen=True)
class NetworkConfig:
    """Architecture plus initialization seed for :func:`build_network`.

    ``hidden`` lists dense-layer widths after the K encoder units; the final
    entry is the output width.  Empty means the encoder's K units are the
    output.  ``encoder_activation`` applies to the K units; hidden layers use
    ``hidden_activation`` except the last, which uses ``output_activation``.
    """

    encoder_kind: str
    n_categories: int
    n_numeric: int
    k: int
    hidden: tuple[int, ...] = ()
    encoder_activation: Activation = Activation.SIGMOID
    hidden_activation: Activation = Activation.SIGMOID
    output_activation: Activation = Activation.IDENTITY
    seed: int = 0

    def __post_init__(self):
        if self.encoder_kind not in ("onehot", "binary", "augmented"):
            raise InvalidArgumentError(f"unknown encoder kind {self.encoder_kind!r}")
        if self.n_categories < 1:
            raise InvalidArgumentError("n_categories must be >= 1")
        if self.n_numeric < 0:
            raise InvalidArgumentError("n_numeric must be >= 0")
        if self.k < 1:
            raise InvalidArgumentError("k must be >= 1")
        for width in self.hidden:
            if width < 1:
                raise InvalidArgumentError("hidden widths must be >= 1")


_ENCODER_CLASSES = {
    "onehot": OneHotLayer,
    "binary": BinaryLayer,
    "augmented": AugmentedBinaryLayer,
}


def build_network(config: NetworkConfig) -> Network:
    """Build and initialize a network from one seeded stream.

    Draw order (normative): encoder categorical matrix row-major, encoder
    numeric matrix row-major, then each dense layer's weight matrix row-major
    in layer order.  All biases are zero-initialized and draw nothing.  The
    same seed therefore gives the same dense weights across encoder kinds
    with equal categorical parameter counts, and bit-weight draws are shared
    between the binary and augmented encoders exactly.
    """
    stream = SplitMix64(config.seed)
    encoder_cls = _ENCODER_CLASSES[config.encoder_kind]
    encoder = encoder_cls.fresh(config.n_categories, config.n_numeric, config.k, stream)
    layers = []
    fan = config.k
    for idx, width in enumerate(config.hidden):
        last = idx == len(config.hidden) - 1
        activation = config.output_activation if last else config.hidden_activation
        radius = 1.0 / math.sqrt(fan)
        layers.append(
            DenseLayer(
                weights=stream.symmetric_array((fan, width), radius),
                bias=np.zeros(width),
                activation=activation,
            )
        )
        fan = width
    return Network(encoder=encoder, encoder_activation=config.encoder_activation, layers=layers)


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float
    steps: int
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0.0:
            raise InvalidArgumentError("learning_rate must be positive")
        if self.steps < 0:
            raise InvalidArgumentError("steps must be >= 0")


def mean_loss(network: Network, examples) -> float:
    """Mean MSE over (category, numerics, target) triples, ascending order."""
    total = 0.0
    count = 0
    for category, numerics, target in examples:
        total += mse_loss(network.predict(category, numerics), np.asarray(target, dtype=np.float64))
        count += 1
    if count == 0:
        raise InvalidArgumentError("no examples")
    return total / count


def run_sgd(
    network: Network,
    examples,
    config: SgdConfig,
    counters: OpCounters | None = None,
    track_losses: bool = True,
) -> list[float]:
    """Train by cycling through examples in order for config.steps steps.

    Returns the mean dataset loss before training and after every step when
    ``track_losses`` is set (length steps + 1), else an empty list.
    """
    examples = [
        (int(c), np.asarray(x, dtype=np.float64), np.asarray(t, dtype=np.float64))
        for c, x, t in examples
    ]
    if not examples:
        raise InvalidArgumentError("no examples")
    losses = [mean_loss(network, examples)] if track_losses else []
    for step in range(config.steps):
        category, numerics, target = examples[step % len(examples)]
        network.sgd_step(category, numerics, target, config.learning_rate, counters)
        if track_losses:
            losses.append(mean_loss(network, examples))
    return losses
