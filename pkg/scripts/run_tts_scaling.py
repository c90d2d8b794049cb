#!/usr/bin/env python3
"""Time-to-solution versus sweep count across instance sizes.

Anneals each quadratized instance over a grid of sweep counts and reports
the optimal sweep count and TTS per instance.  The full default grid takes
tens of minutes; trim --sizes/--gammas/--reads for a quick look.
"""

import argparse

from mdpspin.experiments import ExperimentConfig, run_tts_sweep


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 5, 6, 7, 8])
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.6])
    ap.add_argument("--reads", type=int, default=1000)
    ap.add_argument("--sweep-grid", type=int, nargs="+",
                    default=[1, 2, 3, 5, 7, 10, 15, 20, 30, 50])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/tts")
    args = ap.parse_args()

    config = ExperimentConfig(experiment="tts-sweep", sizes=tuple(args.sizes),
                              gammas=tuple(args.gammas), num_reads=args.reads,
                              sweep_grid=tuple(args.sweep_grid), seed=args.seed,
                              out_dir=args.out)
    for item in run_tts_sweep(config):
        if item["status"] != "ok":
            print(f"|S|={item['num_states']} gamma={item['gamma']}: {item['status']}")
            continue
        result = item["result"]
        opt = result.optimal
        tts_value = f"{opt.estimate.value:.6g}" if opt else "undefined"
        print(f"|S|={item['num_states']} gamma={item['gamma']} "
              f"K={item['truncation']} vars={item['variables']}: "
              f"n_s*={result.optimal_num_sweeps} TTS*={tts_value}")


if __name__ == "__main__":
    main()
