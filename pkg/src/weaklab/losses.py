"""Classification losses as scalar functions of the target-class probability.

Every supported loss depends on the prediction only through the probability
assigned to the labelled class, so each family reduces to a 1-d function
f(u_k) together with its exact derivative f'(u_k). Families: categorical
cross entropy ("cce"), mean absolute error ("mae"), generalized cross
entropy ("gce", exponent q) and symmetric learning ("sl", a cross-entropy
term plus a reverse term weighted by alpha, beta and a negative log-zero
stand-in A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FAMILIES = ("cce", "mae", "gce", "sl")

# floor applied to probabilities inside training loops before evaluating
# f'; the public functions reject out-of-range input instead of clamping
PROB_FLOOR = 1e-12


@dataclass(frozen=True)
class LossSpec:
    """Loss family selector plus hyperparameters (only the relevant ones
    are read: q for gce; alpha, beta, A for sl)."""

    family: str
    q: float = 0.7
    alpha: float = 1.0
    beta: float = 1.0
    A: float = -4.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown loss family {self.family!r}, expected one of {FAMILIES}")
        if not 0.0 < self.q <= 1.0:
            raise ValueError("q must lie in (0, 1]")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.A >= 0:
            raise ValueError("A must be negative")


def _check_range(uk):
    arr = np.asarray(uk, dtype=np.float64)
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise ValueError("target-class probability must lie in (0, 1]")
    return arr


def loss_value(spec: LossSpec, uk):
    """Loss at target-class probability uk; uk may be a scalar or array."""
    u = _check_range(uk)
    if spec.family == "cce":
        out = -np.log(u)
    elif spec.family == "mae":
        out = 2.0 * (1.0 - u)
    elif spec.family == "gce":
        out = (1.0 - u ** spec.q) / spec.q
    else:  # sl
        out = -spec.alpha * np.log(u) - spec.beta * spec.A * (1.0 - u)
    return float(out) if out.ndim == 0 else out


def loss_derivative(spec: LossSpec, uk):
    """d loss / d uk. Negative everywhere on (0, 1] for every family."""
    u = _check_range(uk)
    if spec.family == "cce":
        out = -1.0 / u
    elif spec.family == "mae":
        out = np.full_like(u, -2.0)
    elif spec.family == "gce":
        out = -u ** (spec.q - 1.0)
    else:  # sl
        out = -spec.alpha / u + spec.beta * spec.A
    return float(out) if out.ndim == 0 else out
