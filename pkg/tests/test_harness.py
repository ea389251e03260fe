import numpy as np
import pytest

from weaklab.harness import (CSV_HEADER, ExperimentConfig, ReportRow, RunReport,
                             SeedResult, WeakSource, emit_csv, emit_curves, load_config,
                             overall_accuracy, run_experiment, write_run_dir)
from weaklab.labelspace import TemplateKind
from weaklab.losses import LossSpec
from weaklab.model import ModelParameters, TrainConfig


def tiny_config(**overrides):
    defaults = dict(
        classes=5, dim=4, n_per_class=75, spread=0.25, clean_count=40,
        weak_sources=[WeakSource(TemplateKind.UNIFORM, 3.0)],
        etas=[0.2], seeds=[0, 1],
        combinations=[("vanilla", LossSpec("cce")), ("proposed", LossSpec("cce"))],
        train=TrainConfig(epochs=4, batch_size=16, hidden=0, learning_rate=0.1),
    )
    defaults.update(overrides)
    return ExperimentConfig(**defaults)


def test_overall_accuracy_counting():
    from weaklab.datagen import Dataset
    params = ModelParameters([np.eye(2)], [np.zeros(2)])  # predicts argmax feature
    feats = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
    labels = np.array([0, 0, 1, 0])
    assert overall_accuracy(params, Dataset(feats, labels, 2)) == 0.75
    assert overall_accuracy(params, Dataset(feats, np.array([0, 0, 1, 1]), 2)) == 1.0
    with pytest.raises(ValueError):
        overall_accuracy(params, Dataset(np.empty((0, 2)), np.empty(0, dtype=int), 2))


def test_config_validation():
    with pytest.raises(ValueError):
        tiny_config(seeds=[])
    with pytest.raises(ValueError):
        tiny_config(combinations=[])


def test_run_experiment_report_shape():
    report = run_experiment(tiny_config())
    assert [r.strategy for r in report.rows] == ["baseline", "vanilla", "proposed"]
    row = report.rows[1]
    assert row.eta == 0.2 and row.source_layout == "uniform:x3"
    assert len(row.per_seed) == 2
    assert row.mean_oa == pytest.approx(np.mean([sr.best_oa for sr in row.per_seed]))
    assert row.std_oa == pytest.approx(np.std([sr.best_oa for sr in row.per_seed], ddof=1))
    assert row.dominance_ok is True
    assert report.rows[0].eta is None and report.rows[0].dominance_ok is None
    assert set(report.estimates) == {(0, 0.2), (1, 0.2)}
    assert set(report.estimates[(0, 0.2)]) == {1, "single"}
    assert set(report.baselines) == {0, 1}


def test_run_experiment_identity_weak_source_reduction():
    # with a perfectly clean weak source and the true (identity) matrices,
    # the corrected objective coincides with the vanilla one
    cfg = tiny_config(etas=[0.0], estimated_vs_true_matrices=True, seeds=[0, 1])
    report = run_experiment(cfg)
    van = report.row("vanilla", "cce", 0.0)
    prop = report.row("proposed", "cce", 0.0)
    assert abs(van.mean_oa - prop.mean_oa) <= 0.02


def test_best_oa_is_running_maximum():
    report = run_experiment(tiny_config(seeds=[0]))
    for row in report.rows:
        for sr in row.per_seed:
            curve = [oa for (s, f, e, seed, ep, oa) in report.curves
                     if s == row.strategy and e == row.eta and seed == sr.seed]
            assert sr.best_oa == max(curve)
            assert sr.best_oa >= curve[0]


def test_dominance_flag_tracks_template():
    report = run_experiment(tiny_config(etas=[0.95], seeds=[0]))
    assert report.row("vanilla", "cce", 0.95).dominance_ok is False


def test_curves_structure():
    cfg = tiny_config(seeds=[0])
    report = run_experiment(cfg)
    baseline_rows = [c for c in report.curves if c[0] == "baseline"]
    assert len(baseline_rows) == cfg.train.epochs
    van_rows = [c for c in report.curves if c[0] == "vanilla"]
    assert [ep for (_, _, _, _, ep, _) in van_rows] == list(range(1, cfg.train.epochs + 1))


def test_emit_csv_empty_report(tmp_path):
    path = tmp_path / "report.csv"
    emit_csv(RunReport([], [], {}, {}), path)
    assert path.read_text() == CSV_HEADER + "\n"


def test_emit_csv_aggregate_std(tmp_path):
    row = ReportRow("vanilla", "cce", 0.1, "uniform:x3",
                    [SeedResult(0, 0.90, 3), SeedResult(1, 0.92, 4), SeedResult(2, 0.94, 2)],
                    0.92, float(np.std([0.90, 0.92, 0.94], ddof=1)), True)
    path = tmp_path / "report.csv"
    emit_csv(RunReport([row], [], {}, {}), path)
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "vanilla,cce,0.1,uniform:x3,0,0.9,3,,,true"
    assert lines[4] == "vanilla,cce,0.1,uniform:x3,all,,,0.92,0.02,true"


def test_emit_csv_deterministic(tmp_path):
    cfg = tiny_config(seeds=[0])
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    emit_csv(run_experiment(cfg), a)
    emit_csv(run_experiment(cfg), b)
    assert a.read_bytes() == b.read_bytes()


def test_write_run_dir_layout(tmp_path):
    cfg = tiny_config(seeds=[0])
    report = run_experiment(cfg)
    out = tmp_path / "run"
    write_run_dir(report, out)
    assert (out / "report.csv").exists()
    assert (out / "curves.csv").exists()
    assert (out / "baseline.params").exists()
    assert (out / "T_hat_source1.txt").exists()
    assert (out / "runs" / "seed0" / "baseline.params").exists()
    assert (out / "runs" / "seed0" / "eta0.2" / "T_hat_source1.txt").exists()
    assert (out / "runs" / "seed0" / "eta0.2" / "T_hat_single.txt").exists()
    from weaklab.labelspace import load_matrix
    t = load_matrix(out / "T_hat_source1.txt")
    assert np.array_equal(t.entries, report.estimates[(0, 0.2)][1].entries)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergent_combination_recorded_as_failure():
    cfg = tiny_config(seeds=[0],
                      train=TrainConfig(epochs=3, batch_size=16, hidden=0,
                                        learning_rate=1e12, weight_decay=1e12))
    report = run_experiment(cfg)
    row = report.row("vanilla", "cce", 0.2)
    assert row.per_seed[0].failed
    assert row.mean_oa is None


def test_use_clean_in_training_flag_changes_data():
    with_clean = run_experiment(tiny_config(seeds=[0]))
    without = run_experiment(tiny_config(seeds=[0], use_clean_in_training=False))
    a = with_clean.row("vanilla", "cce", 0.2)
    b = without.row("vanilla", "cce", 0.2)
    assert a.per_seed[0].best_oa != b.per_seed[0].best_oa or \
        a.per_seed[0].best_epoch != b.per_seed[0].best_epoch


CONFIG_TEXT = """
[dataset]
classes = 5
dim = 4
n_per_class = 75
spread = 0.25

[sources]
clean_count = 40
weak = uniform:3
etas = 0.1 0.3

[loss]
family = gce
q = 0.5
alpha = 2.0
beta = 0.5
A = -2.0

[train]
strategy = proposed
epochs = 4
batch_size = 16
learning_rate = 0.1
momentum = 0.8
weight_decay = 0.0
hidden = 0

[run]
seeds = 0 1
combos = vanilla:cce proposed:gce
use_clean_in_training = true
baseline_epoch_cap = 2
estimated_vs_true_matrices = false
smoothing = 0.25
"""


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "exp.ini"
    path.write_text(CONFIG_TEXT)
    cfg = load_config(path)
    assert cfg.classes == 5 and cfg.dim == 4 and cfg.n_per_class == 75
    assert cfg.spread == 0.25 and cfg.clean_count == 40
    assert cfg.weak_sources[0].kind is TemplateKind.UNIFORM
    assert cfg.weak_sources[0].multiplier == 3.0
    assert cfg.etas == [0.1, 0.3]
    assert cfg.seeds == [0, 1]
    assert cfg.train.epochs == 4 and cfg.train.momentum == 0.8 and cfg.train.hidden == 0
    assert cfg.train.loss.family == "gce" and cfg.train.loss.q == 0.5
    assert cfg.train.loss.alpha == 2.0 and cfg.train.loss.A == -2.0
    assert [(s, l.family) for s, l in cfg.combinations] == [("vanilla", "cce"), ("proposed", "gce")]
    assert cfg.combinations[1][1].q == 0.5  # hyperparameters shared from [loss]
    assert cfg.baseline_epoch_cap == 2 and cfg.smoothing == 0.25
    assert cfg.use_clean_in_training is True


def test_load_config_defaults(tmp_path):
    path = tmp_path / "empty.ini"
    path.write_text("[dataset]\nclasses = 10\n")
    cfg = load_config(path)
    assert cfg.spread == 0.30
    assert cfg.train.epochs == 60
    assert cfg.combinations == [("vanilla", cfg.train.loss)]
