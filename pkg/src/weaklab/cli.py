"""Command-line entry points.

Subcommands: `run` executes a configured experiment sweep and writes the
run directory; `gen-template` prints a template transition matrix;
`validate-gradients` checks the closed-form weighting vectors against
finite differences on random cases; `corrupt` rewrites a clean dataset
file as a multisource weak-labelled one.
"""

from __future__ import annotations

import argparse
import configparser
import sys

import numpy as np

from . import correction, datagen, harness, labelspace
from .labelspace import SourceSpec, TemplateKind, identity_matrix, make_template
from .losses import LossSpec


def _cmd_run(args) -> int:
    config = harness.load_config(args.config)
    report = harness.run_experiment(config)
    harness.write_run_dir(report, args.out)
    for row in report.rows:
        eta = "-" if row.eta is None else f"{row.eta:g}"
        mean = "failed" if row.mean_oa is None else f"{row.mean_oa:.4f}"
        std = "" if row.std_oa is None else f" ({row.std_oa:.4f})"
        print(f"{row.strategy:9s} {row.loss_family:4s} eta={eta:4s} best OA {mean}{std}")
    print(f"report written to {args.out}")
    return 0


def _cmd_gen_template(args) -> int:
    kind = TemplateKind(args.kind)
    matrix = make_template(kind, args.classes, args.eta)
    text = labelspace.format_matrix(matrix)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _random_stochastic(rng, c):
    m = rng.random((c, c)) + 1e-3
    return m / m.sum(axis=1, keepdims=True)


def _cmd_validate_gradients(args) -> int:
    """Compare weight_proposed with central finite differences of the
    corrected loss through the softmax, across loss families and sizes."""
    rng = np.random.default_rng(args.seed)
    specs = [LossSpec("cce"), LossSpec("mae"), LossSpec("gce", q=0.7), LossSpec("sl")]
    worst = 0.0
    checked = 0
    while checked < args.cases:
        spec = specs[checked % len(specs)]
        c = int(rng.choice([2, 5, 10]))
        t = _random_stochastic(rng, c)
        h = rng.standard_normal(c)
        k = int(rng.integers(c))
        u = correction.softmax(h)
        if float(correction.forward_correct(t, u)[k]) < 1e-3:
            continue
        analytic = correction.weight_proposed(spec, t, k, u)
        numeric = correction.numerical_score_gradient(spec, t, k, h)
        rel = np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-12)
        worst = max(worst, rel)
        checked += 1
    ok = worst <= args.tolerance
    status = "PASS" if ok else "FAIL"
    print(f"{status}: {checked} cases, max relative gradient error {worst:.3e} "
          f"(tolerance {args.tolerance:g})")
    return 0 if ok else 1


def _parse_corrupt_spec(path):
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path) as fh:
        cp.read_file(fh)
    src = cp["sources"]
    clean_count = src.getint("clean_count", 0)
    weak = []
    for token in src.get("weak", "").split():
        kind_name, eta, count = token.split(":")
        weak.append((TemplateKind(kind_name), float(eta), int(count)))
    return clean_count, weak


def _cmd_corrupt(args) -> int:
    ms_in = datagen.load_dataset(args.load_dataset)
    clean = datagen.as_clean_dataset(ms_in)  # input labels are trusted as true
    clean_count, weak = _parse_corrupt_spec(args.spec)
    specs = [SourceSpec(0, identity_matrix(clean.c), clean_count)]
    for i, (kind, eta, count) in enumerate(weak, start=1):
        specs.append(SourceSpec(i, make_template(kind, clean.c, eta), count))
    ms, _ = datagen.build_multisource(clean, specs, args.seed)
    datagen.save_dataset(args.emit_dataset, ms)
    sizes = ", ".join(f"source {b.source_id}: {len(b)}" for b in ms.sources)
    print(f"wrote {args.emit_dataset} ({sizes})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weaklab")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment sweep from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_gen = sub.add_parser("gen-template", help="print a template transition matrix")
    p_gen.add_argument("--kind", required=True,
                       choices=[k.value for k in TemplateKind])
    p_gen.add_argument("--eta", type=float, required=True)
    p_gen.add_argument("--classes", type=int, default=10)
    p_gen.add_argument("--out")
    p_gen.set_defaults(func=_cmd_gen_template)

    p_val = sub.add_parser("validate-gradients",
                           help="check closed-form gradient weights against finite differences")
    p_val.add_argument("--cases", type=int, default=1000)
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--tolerance", type=float, default=1e-6)
    p_val.set_defaults(func=_cmd_validate_gradients)

    p_cor = sub.add_parser("corrupt",
                           help="corrupt a clean dataset file into a multisource one")
    p_cor.add_argument("--load-dataset", required=True)
    p_cor.add_argument("--spec", required=True, help="sources spec file")
    p_cor.add_argument("--emit-dataset", required=True)
    p_cor.add_argument("--seed", type=int, default=0)
    p_cor.set_defaults(func=_cmd_corrupt)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
