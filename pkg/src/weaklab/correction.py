"""Softmax, forward loss correction, and gradient-weighting vectors.

Forward correction replaces the predicted class probabilities u by
u_tilde = T^T u before evaluating the loss, so a model supervised with
weak labels learns the true-label posterior. At gradient level the
corrected per-sample loss contributes f'(u_tilde_k) * sum_j T[j, k] *
grad_h(u_j): a single weak label simultaneously optimises every class j
the source could have flipped into k, weighted by T's k-th column. The
functions here compute those weighting vectors in closed form; training
code contracts them against d h / d theta.
"""

from __future__ import annotations

import numpy as np

from .labelspace import TransitionMatrix
from .losses import LossSpec, loss_derivative, loss_value


class DegenerateColumnError(ValueError):
    """Raised when the corrected probability of the given label is zero:
    column k of T has no mass on any class the model deems possible."""


def _entries(matrix) -> np.ndarray:
    return np.asarray(getattr(matrix, "entries", matrix), dtype=np.float64)


def softmax(scores) -> np.ndarray:
    """Probability vector exp(h_i) / sum_j exp(h_j), max-shifted for stability."""
    h = np.asarray(scores, dtype=np.float64)
    shifted = h - h.max()
    e = np.exp(shifted)
    return e / e.sum()


def softmax_grad(u, j: int) -> np.ndarray:
    """Gradient of softmax component j with respect to the scores:
    u_j * (e^j - u)."""
    u = np.asarray(u, dtype=np.float64)
    g = u[j] * (-u)
    g[j] += u[j]
    return g


def forward_correct(matrix, u) -> np.ndarray:
    """Corrected probabilities u_tilde = T^T u (u_tilde_k = sum_j T[j,k] u_j)."""
    t = _entries(matrix)
    u = np.asarray(u, dtype=np.float64)
    if u.shape[0] != t.shape[0]:
        raise ValueError(f"dimension mismatch: matrix is {t.shape[0]}-class, u has {u.shape[0]}")
    return t.T @ u


def corrected_loss(spec: LossSpec, matrix, k: int, u) -> float:
    """Loss evaluated at the corrected probability of the given label k."""
    ut_k = float(forward_correct(matrix, u)[k])
    if ut_k <= 0.0:
        raise DegenerateColumnError(f"corrected probability of class {k} is zero")
    return float(loss_value(spec, min(ut_k, 1.0)))


def weight_standard(spec: LossSpec, omega: float, k: int, u) -> np.ndarray:
    """Score-gradient of the uncorrected loss, scaled by a source weight:
    f'(u_k) * omega * u_k (e^k - u)."""
    u = np.asarray(u, dtype=np.float64)
    fprime = loss_derivative(spec, u[k])
    return (fprime * omega) * softmax_grad(u, k)


def weight_proposed(spec: LossSpec, matrix, k: int, u) -> np.ndarray:
    """Score-gradient of the forward-corrected loss:
    f'(u_tilde_k) * sum_j T[j, k] * softmax_grad(u, j).

    With the identity matrix this coincides with weight_standard(omega=1).
    """
    t = _entries(matrix)
    u = np.asarray(u, dtype=np.float64)
    ut_k = float(forward_correct(t, u)[k])
    if ut_k <= 0.0:
        raise DegenerateColumnError(f"corrected probability of class {k} is zero")
    acc = np.zeros_like(u)
    for j in range(u.shape[0]):
        acc += t[j, k] * softmax_grad(u, j)
    fprime = loss_derivative(spec, min(ut_k, 1.0))
    return fprime * acc


def gce_weight_closed_form(q: float, matrix, k: int, u) -> np.ndarray:
    """Generalized-cross-entropy weighting vector written directly as
    -u_tilde_k^q * ((T[:,k] * u) / u_tilde_k - u)."""
    t = _entries(matrix)
    u = np.asarray(u, dtype=np.float64)
    col_u = t[:, k] * u
    ut_k = float(col_u.sum())
    if ut_k <= 0.0:
        raise DegenerateColumnError(f"corrected probability of class {k} is zero")
    return -(ut_k ** q) * (col_u / ut_k - u)


def optimized_classes(matrix, k: int, u) -> set:
    """Classes whose score the corrected gradient pushes up:
    { j : u_j > 0 and T[j, k] > u_tilde_k }."""
    t = _entries(matrix)
    u = np.asarray(u, dtype=np.float64)
    ut_k = float(forward_correct(t, u)[k])
    return {int(j) for j in range(u.shape[0]) if u[j] > 0.0 and t[j, k] > ut_k}


def l1_discrepancy(matrix, k: int, u) -> float:
    """L1 distance between the prior-true-label distribution implied by
    label k, (T[:,k] * u) / u_tilde_k, and the prediction u. Lies in [0, 2]."""
    t = _entries(matrix)
    u = np.asarray(u, dtype=np.float64)
    col_u = t[:, k] * u
    ut_k = float(col_u.sum())
    if ut_k <= 0.0:
        raise DegenerateColumnError(f"corrected probability of class {k} is zero")
    val = float(np.abs(col_u / ut_k - u).sum())
    return min(val, 2.0)


def numerical_score_gradient(spec: LossSpec, matrix, k: int, h,
                             step: float = 1e-6) -> np.ndarray:
    """Central finite differences of corrected_loss(softmax(h)) w.r.t. h.

    Diagnostic used by the CLI gradient validator; the test suite keeps its
    own independent differencer.
    """
    h = np.asarray(h, dtype=np.float64)
    grad = np.zeros_like(h)
    for i in range(h.shape[0]):
        hp = h.copy()
        hm = h.copy()
        hp[i] += step
        hm[i] -= step
        fp = corrected_loss(spec, matrix, k, softmax(hp))
        fm = corrected_loss(spec, matrix, k, softmax(hm))
        grad[i] = (fp - fm) / (2.0 * step)
    return grad
