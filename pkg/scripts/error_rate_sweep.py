#!/usr/bin/env python3
"""Error-rate sweep with a single weak source.

One weak source nine times larger than the clean set, class-dependent
error template, eta from 0.1 to 0.5. Compares the vanilla and corrected
(proposed) strategies under CCE and GCE against the clean-only baseline.
"""

import argparse

from weaklab.harness import ExperimentConfig, run_experiment, write_run_dir
from weaklab.labelspace import TemplateKind
from weaklab.harness import WeakSource
from weaklab.losses import LossSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/error_rate_sweep")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    ap.add_argument("--multiplier", type=float, default=9.0)
    args = ap.parse_args()

    config = ExperimentConfig(
        weak_sources=[WeakSource(TemplateKind.MIXED_CLASS_DEPENDENT, args.multiplier)],
        seeds=args.seeds,
        combinations=[("vanilla", LossSpec("cce")), ("proposed", LossSpec("cce")),
                      ("vanilla", LossSpec("gce", q=0.7)), ("proposed", LossSpec("gce", q=0.7))],
    )
    report = run_experiment(config)
    write_run_dir(report, args.out)

    print(f"{'strategy':9s} {'loss':4s} {'eta':>4s} {'mean OA':>8s} {'std':>7s}  dominance")
    for row in report.rows:
        eta = "-" if row.eta is None else f"{row.eta:g}"
        std = "" if row.std_oa is None else f"{row.std_oa:.4f}"
        dom = "" if row.dominance_ok is None else str(row.dominance_ok).lower()
        print(f"{row.strategy:9s} {row.loss_family:4s} {eta:>4s} {row.mean_oa:8.4f} {std:>7s}  {dom}")
    print(f"\nrun directory: {args.out}")


if __name__ == "__main__":
    main()
