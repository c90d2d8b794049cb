#!/usr/bin/env python3
"""Cross-solver agreement matrix on one instance.

Compares value iteration, exhaustive policy search, the compiled ground
state, simulated annealing, and a Q-learning seed ensemble.
"""

import argparse
import json

from mdpspin.experiments import ExperimentConfig, run_oracle_compare


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--num-states", type=int, default=6)
    ap.add_argument("--gamma", type=float, default=0.99)
    ap.add_argument("--truncation", type=int)
    ap.add_argument("--reads", type=int, default=1000)
    ap.add_argument("--qlearning-seeds", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/oracle")
    args = ap.parse_args()

    config = ExperimentConfig(experiment="oracle-compare", num_reads=args.reads,
                              num_qlearning_seeds=args.qlearning_seeds,
                              seed=args.seed, out_dir=args.out)
    record = run_oracle_compare(config, args.num_states, args.gamma,
                                truncation=args.truncation)
    print(json.dumps({k: record[k] for k in
                      ("interior_policies", "agreement", "qlearning")}, indent=1))


if __name__ == "__main__":
    main()
