#!/usr/bin/env python3
"""Minimal truncation order over the (size, discount) grid.

Produces the heatmap table showing the order growing roughly like half the
state count at high discounts.
"""

import argparse

from mdpspin.experiments import ExperimentConfig, run_k_heatmap


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    ap.add_argument("--gammas", type=float, nargs="+",
                    default=[0.6, 0.7, 0.8, 0.9])
    ap.add_argument("--k-max", type=int, default=8)
    ap.add_argument("--out", default="results/heatmap")
    args = ap.parse_args()

    config = ExperimentConfig(experiment="k-heatmap", sizes=tuple(args.sizes),
                              gammas=tuple(args.gammas), k_max=args.k_max,
                              out_dir=args.out)
    for row in run_k_heatmap(config):
        print(f"|S|={row['num_states']:2d} gamma={row['gamma']}: "
              f"K={row['minimal_k']} ({row['status']})")


if __name__ == "__main__":
    main()
