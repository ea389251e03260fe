#!/usr/bin/env python3
"""Three weak sources versus one.

Three sources of distinct error patterns (uniform, land-cover change,
interclass similarity), each three times the clean set, sharing one
balanced error rate. The total weak data matches the single 9x source of
error_rate_sweep.py, so the two runs compare source diversity directly.
"""

import argparse

from weaklab.harness import ExperimentConfig, WeakSource, run_experiment, write_run_dir
from weaklab.labelspace import TemplateKind
from weaklab.losses import LossSpec


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="out/three_source_comparison")
    ap.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    args = ap.parse_args()

    config = ExperimentConfig(
        weak_sources=[WeakSource(TemplateKind.UNIFORM, 3.0),
                      WeakSource(TemplateKind.LAND_COVER_CHANGE, 3.0),
                      WeakSource(TemplateKind.INTERCLASS_SIMILARITY, 3.0)],
        etas=[0.1, 0.2, 0.3, 0.4, 0.5],
        seeds=args.seeds,
        combinations=[("vanilla", LossSpec("cce")), ("proposed", LossSpec("cce")),
                      ("vanilla", LossSpec("gce", q=0.7)), ("proposed", LossSpec("gce", q=0.7))],
    )
    report = run_experiment(config)
    write_run_dir(report, args.out)

    print(f"{'strategy':9s} {'loss':4s} {'eta':>4s} {'mean OA':>8s}  all sources dominant?")
    for row in report.rows:
        eta = "-" if row.eta is None else f"{row.eta:g}"
        dom = "" if row.dominance_ok is None else str(row.dominance_ok).lower()
        print(f"{row.strategy:9s} {row.loss_family:4s} {eta:>4s} {row.mean_oa:8.4f}  {dom}")
    print(f"\nrun directory: {args.out}")


if __name__ == "__main__":
    main()
