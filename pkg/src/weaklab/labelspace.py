"""Transition-matrix algebra for weak labelling sources.

A labelling source is characterised by a row-stochastic transition matrix
T where T[j, k] is the probability that an instance whose true class is j
receives label k. A clean source has the identity matrix. This module
builds the parametric template family used by the synthetic benchmarks,
computes matrix diagnostics (balanced error rate, mean row entropy,
diagonal dominance) and draws weak labels from a matrix row.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

ROW_SUM_TOL = 1e-9


class TemplateKind(Enum):
    """Error-pattern families for synthetic weak sources.

    MIXED_CLASS_DEPENDENT, LAND_COVER_CHANGE and INTERCLASS_SIMILARITY are
    fixed 10-class layouts; UNIFORM and IDENTITY work for any class count.
    """

    MIXED_CLASS_DEPENDENT = "mixed"
    UNIFORM = "uniform"
    LAND_COVER_CHANGE = "landcover"
    INTERCLASS_SIMILARITY = "interclass"
    IDENTITY = "identity"


@dataclass(eq=False)
class TransitionMatrix:
    """Row-stochastic c x c matrix of label-flip probabilities."""

    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.float64)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {e.shape}")
        if np.any(e < 0.0) or np.any(e > 1.0):
            raise ValueError("transition matrix entries must lie in [0, 1]")
        row_sums = e.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > ROW_SUM_TOL):
            worst = float(np.abs(row_sums - 1.0).max())
            raise ValueError(f"transition matrix rows must sum to 1 (max deviation {worst:g})")
        e.setflags(write=False)
        self.entries = e

    @property
    def c(self) -> int:
        return self.entries.shape[0]

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.entries, np.eye(self.c)))


@dataclass(eq=False)
class SourceSpec:
    """A labelling source: index, transition matrix, sample count, weight.

    Source 0 is by convention the clean source and must carry the identity
    matrix; weak sources have positive indices.
    """

    id: int
    matrix: TransitionMatrix
    count: int
    weight: float = 1.0

    def __post_init__(self):
        if self.id < 0:
            raise ValueError("source id must be nonnegative")
        if self.id == 0 and not self.matrix.is_identity():
            raise ValueError("source 0 is the clean source and must have the identity matrix")
        if self.count < 0:
            raise ValueError("source count must be nonnegative")
        if self.weight <= 0:
            raise ValueError("source weight must be positive")


def identity_matrix(c: int) -> TransitionMatrix:
    return TransitionMatrix(np.eye(c))


# Off-diagonal layouts of the fixed 10-class templates. Each affected row
# maps to a list of (target class, share of the row's off-diagonal mass);
# rows not listed stay clean. The off-diagonal mass of an affected row is
# eta divided by the template's rate constant (the fraction of affected
# rows), which makes the balanced error rate of the matrix equal to eta.
_MIXED_RATE = 0.8
_MIXED_TARGETS = {
    0: [(5, 0.5), (6, 0.5)],
    1: [(2, 1.0)],
    2: [(5, 1.0)],
    3: [(0, 0.5), (1, 0.5)],
    4: [(5, 0.5), (7, 0.5)],
    5: [(2, 1.0)],
    6: [(0, 0.5), (5, 0.5)],
    7: [(1, 0.5), (4, 0.5)],
}

_LANDCOVER_RATE = 0.6
_LANDCOVER_TARGETS = {
    0: [(1, 0.5), (5, 0.5)],
    3: [(1, 0.5), (2, 0.5)],
    4: [(0, 1 / 3), (1, 1 / 3), (5, 1 / 3)],
    5: [(2, 1.0)],
    6: [(1, 0.5), (2, 0.5)],
    7: [(1, 1 / 3), (2, 1 / 3), (5, 1 / 3)],
}

_INTERCLASS_TARGETS = {
    0: [(3, 1 / 3), (5, 1 / 3), (6, 1 / 3)],
    1: [(2, 0.5), (3, 0.5)],
    2: [(1, 1.0)],
    3: [(0, 1 / 3), (1, 1 / 3), (6, 1 / 3)],
    4: [(7, 1.0)],
    5: [(0, 0.5), (6, 0.5)],
    6: [(0, 1 / 3), (3, 1 / 3), (5, 1 / 3)],
    7: [(4, 1.0)],
    8: [(9, 1.0)],
    9: [(8, 1.0)],
}

_ETA_LIMIT = {
    TemplateKind.MIXED_CLASS_DEPENDENT: _MIXED_RATE,
    TemplateKind.LAND_COVER_CHANGE: _LANDCOVER_RATE,
    TemplateKind.UNIFORM: 1.0,
    TemplateKind.INTERCLASS_SIMILARITY: 1.0,
}


def make_template(kind: TemplateKind, c: int, eta: float) -> TransitionMatrix:
    """Build a template transition matrix with balanced error rate eta.

    Raises ValueError if eta falls outside the range where the template's
    diagonal stays nonnegative, or if c is unsupported for the kind.
    """
    if c < 2:
        raise ValueError("templates need at least 2 classes")
    if kind is TemplateKind.IDENTITY:
        if eta != 0.0:
            raise ValueError("identity template requires eta = 0")
        return identity_matrix(c)
    if eta < 0.0 or eta >= _ETA_LIMIT[kind]:
        raise ValueError(f"eta = {eta:g} outside [0, {_ETA_LIMIT[kind]:g}) for {kind.value}")
    if kind is TemplateKind.UNIFORM:
        m = np.full((c, c), eta / (c - 1))
        np.fill_diagonal(m, 1.0 - eta)
        return TransitionMatrix(m)
    if c != 10:
        raise ValueError(f"{kind.value} template is defined only for c = 10")
    targets = _MIXED_TARGETS if kind is TemplateKind.MIXED_CLASS_DEPENDENT else (
        _LANDCOVER_TARGETS if kind is TemplateKind.LAND_COVER_CHANGE else _INTERCLASS_TARGETS
    )
    rate = {
        TemplateKind.MIXED_CLASS_DEPENDENT: _MIXED_RATE,
        TemplateKind.LAND_COVER_CHANGE: _LANDCOVER_RATE,
        TemplateKind.INTERCLASS_SIMILARITY: 1.0,
    }[kind]
    mass = eta / rate
    m = np.eye(c)
    for row, shares in targets.items():
        m[row, row] = 1.0 - mass
        for target, share in shares:
            m[row, target] = share * mass
    return TransitionMatrix(m)


def balanced_error_rate(matrix: TransitionMatrix) -> float:
    """1 minus the mean diagonal entry: the class-balanced flip probability."""
    return float(1.0 - np.trace(matrix.entries) / matrix.c)


def mean_row_entropy(matrix: TransitionMatrix) -> float:
    """Mean Shannon entropy of the rows in nats, with 0 * log 0 = 0."""
    p = matrix.entries[matrix.entries > 0]
    return float(-(p * np.log(p)).sum() / matrix.c)


def satisfies_diagonal_dominance(matrix: TransitionMatrix) -> bool:
    """True iff every diagonal entry strictly exceeds all entries in its row."""
    e = matrix.entries
    diag = np.diag(e)
    off = e.copy()
    np.fill_diagonal(off, -np.inf)
    return bool(np.all(diag > off.max(axis=1)))


def sample_weak_labels(matrix: TransitionMatrix, true_labels: np.ndarray,
                       rng: np.random.Generator) -> np.ndarray:
    """Draw one weak label per true label from the matrix rows."""
    labels = np.asarray(true_labels, dtype=np.int64)
    c = matrix.c
    if labels.size and (labels.min() < 0 or labels.max() >= c):
        raise ValueError("true labels out of range")
    cum = np.cumsum(matrix.entries, axis=1)
    u = rng.random(labels.shape[0])
    drawn = (cum[labels] <= u[:, None]).sum(axis=1)
    return np.minimum(drawn, c - 1)


def sample_weak_label(matrix: TransitionMatrix, true_label: int,
                      rng: np.random.Generator) -> int:
    """Draw a single weak label for one instance."""
    return int(sample_weak_labels(matrix, np.array([true_label]), rng)[0])


def format_matrix(matrix: TransitionMatrix) -> str:
    """Plain-text form: first line c, then c rows of c probabilities."""
    lines = [str(matrix.c)]
    for row in matrix.entries:
        lines.append(" ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> TransitionMatrix:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    c = int(lines[0])
    if len(lines) != c + 1:
        raise ValueError(f"expected {c} matrix rows, found {len(lines) - 1}")
    rows = [[float(v) for v in ln.split()] for ln in lines[1:]]
    return TransitionMatrix(np.array(rows))


def save_matrix(path, matrix: TransitionMatrix) -> None:
    with open(path, "w") as fh:
        fh.write(format_matrix(matrix))


def load_matrix(path) -> TransitionMatrix:
    with open(path) as fh:
        return parse_matrix(fh.read())
