#!/usr/bin/env python3
"""Logical-variable and coefficient counts across the instance grid."""

import argparse

from mdpspin.experiments import ExperimentConfig, run_resources


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.6, 0.9])
    ap.add_argument("--out", default="results/resources")
    args = ap.parse_args()

    config = ExperimentConfig(experiment="resources", sizes=tuple(args.sizes),
                              gammas=tuple(args.gammas), out_dir=args.out)
    for row in run_resources(config):
        rep = row["report"]
        print(f"|S|={row['num_states']:2d} gamma={row['gamma']}: K={rep.truncation} "
              f"|V|={rep.logical_variables:3d} |J|={rep.coefficient_count:4d} "
              f"fit={rep.fit_value:.1f}")


if __name__ == "__main__":
    main()
