"""Compare per-step encoding cost across encoder families as N grows.

For each category count the script runs a few training steps per encoder,
then prints the measured counters for a single average step next to the
parameter count.  One-hot dense work grows linearly with N while the binary
and augmented columns track the bit width, which is the whole point of the
augmented encoding: one-hot behavior at roughly log-cost.
"""

import argparse
import sys

import numpy as np

from augbin import (
    Activation,
    NetworkConfig,
    OpCounters,
    bit_width,
    build_network,
)

KINDS = ("onehot", "binary", "augmented")


def measure(kind: str, n_categories: int, k: int, steps: int, seed: int):
    network = build_network(
        NetworkConfig(
            encoder_kind=kind,
            n_categories=n_categories,
            n_numeric=0,
            k=k,
            encoder_activation=Activation.IDENTITY,
            seed=seed,
        )
    )
    counters = OpCounters()
    target = np.zeros(k)
    for step in range(steps):
        network.sgd_step((step % n_categories) + 1, (), target, 0.1, counters)
    return counters, network.param_count


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="16,64,256,1024,4096",
                        help="comma-separated category counts")
    parser.add_argument("--k", type=int, default=32)
    parser.add_argument("--steps", type=int, default=64)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    sizes = [int(token) for token in args.sizes.split(",") if token]

    print("encoder,N,n,K,fwd_dense_per_step,fwd_sparse_per_step,updates_per_step,params")
    for n_categories in sizes:
        for kind in KINDS:
            counters, params = measure(kind, n_categories, args.k, args.steps, args.seed)
            dense = counters.encoding_madds_dense // args.steps
            sparse = counters.encoding_madds_sparse / args.steps
            updates = counters.encoding_param_updates / args.steps
            print(f"{kind},{n_categories},{bit_width(n_categories)},{args.k},"
                  f"{dense},{sparse:.1f},{updates:.1f},{params}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
