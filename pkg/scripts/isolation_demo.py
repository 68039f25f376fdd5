"""Show what one training step does to every category's contribution.

Runs a single update for one chosen category on an augmented encoder and on
a plain binary encoder with identical initial weights, then prints how far
each category's effective contribution moved.  The augmented column is zero
everywhere except the trained category; the binary column moves every
category whose bit code overlaps the trained one, by exactly the step size
times the number of shared bits.
"""

import argparse
import sys

import numpy as np

from augbin import (
    Activation,
    NetworkConfig,
    bit_overlap,
    bit_width,
    build_network,
    encode,
    isolation_probe,
)


def movement(kind: str, n_categories: int, k: int, category: int, seed: int):
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
    target = np.zeros(network.output_width)
    return isolation_probe(network, category, (), target, 0.1)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--categories", type=int, default=10)
    parser.add_argument("--k", type=int, default=4)
    parser.add_argument("--train-on", type=int, default=5, help="category id to update")
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args(argv)

    width = bit_width(args.categories)
    augmented = movement("augmented", args.categories, args.k, args.train_on, args.seed)
    binary = movement("binary", args.categories, args.k, args.train_on, args.seed)

    print(f"one update on category {args.train_on} "
          f"(bits {encode(args.train_on, width).positions})")
    print("category,bits,shared_bits,augmented_moved,binary_moved")
    for c in range(1, args.categories + 1):
        overlap = bit_overlap(c, args.train_on, width)
        aug_moved = float(np.max(np.abs(augmented.deltas[c - 1])))
        bin_moved = float(np.max(np.abs(binary.deltas[c - 1])))
        marker = " <- trained" if c == args.train_on else ""
        print(f"{c},{encode(c, width).positions},{overlap},"
              f"{aug_moved:.3e},{bin_moved:.3e}{marker}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
