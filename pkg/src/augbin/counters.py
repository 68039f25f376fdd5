"""Operation counters for the encoding layers and their closed forms.

The layers tally work as they perform it; :func:`expected_counts` is the
closed-form prediction the benchmark asserts against.  Two multiply-add
tallies are kept for the encoder: the sparse-aware count is what the
row-selection code path actually executes, the dense count is what the
unoptimized dense evaluation of the same pre-activation would cost.  Only
category-encoding parameters (category/bit weight rows and the two memory
matrices) are counted as encoding updates; the shared numeric weights and
bias are identical across encoders and excluded by design.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidArgumentError


@dataclass
class OpCounters:
    encoding_madds_dense: int = 0
    encoding_madds_sparse: int = 0
    encoding_param_updates: int = 0
    downstream_madds: int = 0

    def reset(self) -> None:
        self.encoding_madds_dense = 0
        self.encoding_madds_sparse = 0
        self.encoding_param_updates = 0
        self.downstream_madds = 0

    def as_dict(self) -> dict:
        return {
            "encoding_madds_dense": self.encoding_madds_dense,
            "encoding_madds_sparse": self.encoding_madds_sparse,
            "encoding_param_updates": self.encoding_param_updates,
            "downstream_madds": self.downstream_madds,
        }


def expected_counts(kind: str, n_categories: int, width: int, k: int, ones: int) -> OpCounters:
    """Per-pass closed forms for one forward plus one update.

    ``ones`` is the number of one-bits in the active category's code and is
    ignored for the one-hot encoder.

    one-hot:   forward dense N*K, sparse K (row selection), updates K
    binary:    forward dense n*K, sparse ones*K, updates ones*K
    augmented: forward dense (2n+1)*K, sparse (2*ones+1)*K,
               updates (2*ones+1)*K (bit rows + category memory row
               + bit memory entries)
    """
    if kind == "onehot":
        return OpCounters(
            encoding_madds_dense=n_categories * k,
            encoding_madds_sparse=k,
            encoding_param_updates=k,
        )
    if kind == "binary":
        return OpCounters(
            encoding_madds_dense=width * k,
            encoding_madds_sparse=ones * k,
            encoding_param_updates=ones * k,
        )
    if kind == "augmented":
        return OpCounters(
            encoding_madds_dense=(2 * width + 1) * k,
            encoding_madds_sparse=(2 * ones + 1) * k,
            encoding_param_updates=(2 * ones + 1) * k,
        )
    raise InvalidArgumentError(f"unknown encoder kind {kind!r}")
