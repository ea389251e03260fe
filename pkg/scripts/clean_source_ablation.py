#!/usr/bin/env python3
"""Effect of dropping the clean source from training.

The transition matrix is still estimated with the clean-trained baseline;
only the training pool changes. Corrected training keeps the clean data's
guidance when it is present, which matters most for GCE.
"""

import argparse

from weaklab.harness import ExperimentConfig, run_experiment, write_run_dir
from weaklab.losses import LossSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/clean_source_ablation")
    ap.add_argument("--eta", type=float, default=0.3)
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = ap.parse_args()

    combos = [("vanilla", LossSpec("cce")), ("proposed", LossSpec("cce")),
              ("vanilla", LossSpec("gce", q=0.7)), ("proposed", LossSpec("gce", q=0.7))]
    results = {}
    for label, use_clean in (("with_clean", True), ("without_clean", False)):
        config = ExperimentConfig(etas=[args.eta], seeds=args.seeds,
                                  combinations=combos, use_clean_in_training=use_clean)
        report = run_experiment(config)
        write_run_dir(report, f"{args.out}/{label}")
        results[label] = report

    print(f"eta = {args.eta:g}")
    print(f"{'strategy':9s} {'loss':4s} {'with clean':>11s} {'without':>9s} {'delta':>7s}")
    for strategy, spec in combos:
        w = results["with_clean"].row(strategy, spec.family, args.eta).mean_oa
        wo = results["without_clean"].row(strategy, spec.family, args.eta).mean_oa
        print(f"{strategy:9s} {spec.family:4s} {w:11.4f} {wo:9.4f} {w - wo:+7.4f}")
    print(f"\nrun directories under: {args.out}")


if __name__ == "__main__":
    main()
