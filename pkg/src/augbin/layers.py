"""First-layer encoders for one categorical feature plus dense numeric features.

Three interchangeable encoders share a single contract:

    forward(category, numerics, counters=None)       -> pre-activation (K,)
    apply_update(category, numerics, delta, counters=None)
    effective_contribution(category)                  -> (K,)

``delta`` is the per-neuron step ``lr * dLoss/dz_k`` computed once by the
engine and consumed verbatim by every parameter family an encoder owns.
Re-using the identical float for the bit-weight, category-memory, and
bit-memory updates is what makes their cancellation exact to working
precision.

``effective_contribution`` returns the category-dependent part of the
pre-activation (everything except the numeric-feature terms and the shared
bias); category isolation is stated and tested on this quantity, not on raw
weights, because bit-weight entries legitimately change for overlapping
categories while the forward-pass value does not.

Evaluation order is normative and load-bearing for cross-implementation
equality: categorical terms in ascending bit/row order, then numeric terms
in ascending feature order, then bias, then the memory corrections.  Every
accumulation below runs in ascending index order with one accumulator per
output neuron.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bitcode import bit_width, encode
from .counters import OpCounters
from .errors import InvalidArgumentError, RangeError
from .rng import SplitMix64


def _as_matrix(value, rows, cols, name) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (rows, cols):
        raise InvalidArgumentError(f"{name} must have shape {(rows, cols)}, got {arr.shape}")
    return arr


def _as_vector(value, length, name) -> np.ndarray:
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (length,):
        raise InvalidArgumentError(f"{name} must have shape {(length,)}, got {arr.shape}")
    return arr


def _check_numerics(numerics, expected) -> np.ndarray:
    x = np.asarray(numerics, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != expected:
        raise InvalidArgumentError(f"expected {expected} numeric features, got shape {x.shape}")
    return x


@dataclass
class OneHotLayer:
    """One weight row per category; updates touch only the active row."""

    kind = "onehot"

    cat_weights: np.ndarray  # (N, K)
    num_weights: np.ndarray  # (d, K)
    bias: np.ndarray  # (K,)

    def __post_init__(self):
        self.bias = np.asarray(self.bias, dtype=np.float64)
        k = self.bias.shape[0]
        self.cat_weights = np.asarray(self.cat_weights, dtype=np.float64)
        if self.cat_weights.ndim != 2 or self.cat_weights.shape[1] != k:
            raise InvalidArgumentError("cat_weights must be (N, K)")
        self.num_weights = _as_matrix(
            self.num_weights, np.asarray(self.num_weights).shape[0], k, "num_weights"
        )

    @classmethod
    def fresh(cls, n_categories: int, n_numeric: int, k: int, stream: SplitMix64) -> "OneHotLayer":
        radius = 1.0 / np.sqrt(n_categories)
        return cls(
            cat_weights=stream.symmetric_array((n_categories, k), radius),
            num_weights=stream.symmetric_array((n_numeric, k), radius),
            bias=np.zeros(k),
        )

    @property
    def k(self) -> int:
        return self.bias.shape[0]

    @property
    def n_categories(self) -> int:
        return self.cat_weights.shape[0]

    @property
    def n_numeric(self) -> int:
        return self.num_weights.shape[0]

    @property
    def param_count(self) -> int:
        return self.cat_weights.size + self.num_weights.size + self.bias.size

    def _check_category(self, category: int) -> None:
        if not 1 <= int(category) <= self.n_categories:
            raise RangeError(f"category {category} out of 1..{self.n_categories}")

    def forward(self, category: int, numerics=(), counters: OpCounters | None = None) -> np.ndarray:
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        z = self.cat_weights[category - 1].copy()
        for j in range(self.n_numeric):
            z += self.num_weights[j] * x[j]
        z += self.bias
        if counters is not None:
            counters.encoding_madds_dense += self.n_categories * self.k
            counters.encoding_madds_sparse += self.k
        return z

    def apply_update(self, category: int, numerics, delta: np.ndarray, counters: OpCounters | None = None) -> None:
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        delta = _as_vector(delta, self.k, "delta")
        self.cat_weights[category - 1] -= delta
        self.num_weights -= np.outer(x, delta)
        self.bias -= delta
        if counters is not None:
            counters.encoding_param_updates += self.k

    def effective_contribution(self, category: int) -> np.ndarray:
        self._check_category(category)
        return self.cat_weights[category - 1].copy()


@dataclass
class BinaryLayer:
    """One weight row per bit; the deliberate negative control.

    A step for one category moves every other category that shares a one-bit
    with it, by exactly the bit-overlap count times delta.
    """

    kind = "binary"

    n_categories: int
    bit_weights: np.ndarray  # (n, K)
    num_weights: np.ndarray  # (d, K)
    bias: np.ndarray  # (K,)

    def __post_init__(self):
        self.bias = np.asarray(self.bias, dtype=np.float64)
        k = self.bias.shape[0]
        width = bit_width(self.n_categories)
        self.bit_weights = _as_matrix(self.bit_weights, width, k, "bit_weights")
        self.num_weights = _as_matrix(
            self.num_weights, np.asarray(self.num_weights).shape[0], k, "num_weights"
        )

    @classmethod
    def fresh(cls, n_categories: int, n_numeric: int, k: int, stream: SplitMix64) -> "BinaryLayer":
        width = bit_width(n_categories)
        radius = 1.0 / np.sqrt(width)
        return cls(
            n_categories=n_categories,
            bit_weights=stream.symmetric_array((width, k), radius),
            num_weights=stream.symmetric_array((n_numeric, k), radius),
            bias=np.zeros(k),
        )

    @property
    def k(self) -> int:
        return self.bias.shape[0]

    @property
    def width(self) -> int:
        return self.bit_weights.shape[0]

    @property
    def n_numeric(self) -> int:
        return self.num_weights.shape[0]

    @property
    def param_count(self) -> int:
        return self.bit_weights.size + self.num_weights.size + self.bias.size

    def _check_category(self, category: int) -> None:
        if not 1 <= int(category) <= self.n_categories:
            raise RangeError(f"category {category} out of 1..{self.n_categories}")

    def _positions(self, category: int) -> tuple[int, ...]:
        return encode(category, self.width).positions

    def forward(self, category: int, numerics=(), counters: OpCounters | None = None) -> np.ndarray:
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        positions = self._positions(category)
        z = np.zeros(self.k)
        for i in positions:
            z += self.bit_weights[i - 1]
        for j in range(self.n_numeric):
            z += self.num_weights[j] * x[j]
        z += self.bias
        if counters is not None:
            counters.encoding_madds_dense += self.width * self.k
            counters.encoding_madds_sparse += len(positions) * self.k
        return z

    def apply_update(self, category: int, numerics, delta: np.ndarray, counters: OpCounters | None = None) -> None:
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        delta = _as_vector(delta, self.k, "delta")
        positions = self._positions(category)
        for i in positions:
            self.bit_weights[i - 1] -= delta
        self.num_weights -= np.outer(x, delta)
        self.bias -= delta
        if counters is not None:
            counters.encoding_param_updates += len(positions) * self.k

    def effective_contribution(self, category: int) -> np.ndarray:
        self._check_category(category)
        z = np.zeros(self.k)
        for i in self._positions(category):
            z += self.bit_weights[i - 1]
        return z


@dataclass
class AugmentedBinaryLayer:
    """Binary encoding plus two correction memories that restore isolation.

    ``cat_memory`` (N x K) accumulates, per category, the same deltas that
    were applied to that category's bit-weight rows; ``bit_memory`` (K x n)
    accumulates them per bit regardless of category.  The forward pass adds
    the active category's memory row and subtracts the memory of its one
    bits, so the net category contribution behaves as if each category owned
    a private weight row.

    ``skip_category_memory_update`` is a fault-injection hook for harness
    self-tests; it must stay False in real use.
    """

    kind = "augmented"

    bit_weights: np.ndarray  # (n, K)
    num_weights: np.ndarray  # (d, K)
    bias: np.ndarray  # (K,)
    cat_memory: np.ndarray  # (N, K)
    bit_memory: np.ndarray  # (K, n)
    skip_category_memory_update: bool = field(default=False, repr=False)

    def __post_init__(self):
        self.bias = np.asarray(self.bias, dtype=np.float64)
        k = self.bias.shape[0]
        self.cat_memory = np.asarray(self.cat_memory, dtype=np.float64)
        if self.cat_memory.ndim != 2 or self.cat_memory.shape[1] != k:
            raise InvalidArgumentError("cat_memory must be (N, K)")
        width = bit_width(self.cat_memory.shape[0])
        self.bit_weights = _as_matrix(self.bit_weights, width, k, "bit_weights")
        self.bit_memory = _as_matrix(self.bit_memory, k, width, "bit_memory")
        self.num_weights = _as_matrix(
            self.num_weights, np.asarray(self.num_weights).shape[0], k, "num_weights"
        )

    @classmethod
    def fresh(cls, n_categories: int, n_numeric: int, k: int, stream: SplitMix64) -> "AugmentedBinaryLayer":
        width = bit_width(n_categories)
        radius = 1.0 / np.sqrt(width)
        return cls(
            bit_weights=stream.symmetric_array((width, k), radius),
            num_weights=stream.symmetric_array((n_numeric, k), radius),
            bias=np.zeros(k),
            cat_memory=np.zeros((n_categories, k)),  # both memories start at zero
            bit_memory=np.zeros((k, width)),
        )

    @property
    def k(self) -> int:
        return self.bias.shape[0]

    @property
    def width(self) -> int:
        return self.bit_weights.shape[0]

    @property
    def n_categories(self) -> int:
        return self.cat_memory.shape[0]

    @property
    def n_numeric(self) -> int:
        return self.num_weights.shape[0]

    @property
    def param_count(self) -> int:
        return (
            self.bit_weights.size
            + self.num_weights.size
            + self.bias.size
            + self.cat_memory.size
            + self.bit_memory.size
        )

    def _check_category(self, category: int) -> None:
        if not 1 <= int(category) <= self.n_categories:
            raise RangeError(f"category {category} out of 1..{self.n_categories}")

    def _positions(self, category: int) -> tuple[int, ...]:
        return encode(category, self.width).positions

    def _count_forward(self, counters: OpCounters | None, ones: int) -> None:
        if counters is not None:
            counters.encoding_madds_dense += (2 * self.width + 1) * self.k
            counters.encoding_madds_sparse += (2 * ones + 1) * self.k

    def forward(self, category: int, numerics=(), counters: OpCounters | None = None) -> np.ndarray:
        """Bit rows + numeric terms + bias + category memory - bit memories."""
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        positions = self._positions(category)
        z = np.zeros(self.k)
        for i in positions:
            z += self.bit_weights[i - 1]
        for j in range(self.n_numeric):
            z += self.num_weights[j] * x[j]
        z += self.bias
        z += self.cat_memory[category - 1]
        for i in positions:
            z -= self.bit_memory[:, i - 1]
        self._count_forward(counters, len(positions))
        return z

    def forward_folded(self, category: int, numerics=(), counters: OpCounters | None = None) -> np.ndarray:
        """Same value, regrouped: memory terms folded into the bias first.

        Agrees with :meth:`forward` to within accumulated rounding noise
        (budgeted at 1e-12 absolute per component).
        """
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        positions = self._positions(category)
        adjusted = self.bias.copy()
        adjusted += self.cat_memory[category - 1]
        for i in positions:
            adjusted -= self.bit_memory[:, i - 1]
        z = np.zeros(self.k)
        for i in positions:
            z += self.bit_weights[i - 1]
        for j in range(self.n_numeric):
            z += self.num_weights[j] * x[j]
        z += adjusted
        self._count_forward(counters, len(positions))
        return z

    def apply_update(self, category: int, numerics, delta: np.ndarray, counters: OpCounters | None = None) -> None:
        """Subtract the same delta from bit rows, category memory, bit memory.

        The bit-row and bit-memory changes cancel in every forward pass, so
        only the category-memory change survives, and only for this category.
        """
        self._check_category(category)
        x = _check_numerics(numerics, self.n_numeric)
        delta = _as_vector(delta, self.k, "delta")
        positions = self._positions(category)
        for i in positions:
            self.bit_weights[i - 1] -= delta
        if not self.skip_category_memory_update:
            self.cat_memory[category - 1] -= delta
        for i in positions:
            self.bit_memory[:, i - 1] -= delta
        self.num_weights -= np.outer(x, delta)
        self.bias -= delta
        if counters is not None:
            counters.encoding_param_updates += (2 * len(positions) + 1) * self.k

    def effective_contribution(self, category: int) -> np.ndarray:
        """Category-dependent part of the pre-activation."""
        self._check_category(category)
        positions = self._positions(category)
        z = np.zeros(self.k)
        for i in positions:
            z += self.bit_weights[i - 1]
        z += self.cat_memory[category - 1]
        for i in positions:
            z -= self.bit_memory[:, i - 1]
        return z


Encoder = OneHotLayer | BinaryLayer | AugmentedBinaryLayer


def contributions_matrix(encoder: Encoder) -> np.ndarray:
    """Stack effective_contribution(c) for c = 1..N into an (N, K) matrix."""
    return np.stack(
        [encoder.effective_contribution(c) for c in range(1, encoder.n_categories + 1)]
    )
