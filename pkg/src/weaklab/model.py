"""Small softmax classifiers with hand-derived backpropagation.

Two architectures: a linear map d -> c, or one ReLU hidden layer
d -> H -> c. The backward pass consumes a per-sample score-space weighting
vector omega (from weight_standard / weight_proposed) and contracts it
against d h / d theta, so the same machinery trains under the vanilla,
forward and proposed strategies. Optimisation is minibatch SGD with
Nesterov momentum: the gradient is evaluated at the lookahead point
theta + mu * v, then v <- mu * v - lr * g and theta <- theta + v.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .losses import PROB_FLOOR, LossSpec, loss_derivative

STRATEGIES = ("vanilla", "forward", "proposed")


class TrainingDiverged(RuntimeError):
    """Parameters became non-finite during training."""


@dataclass(eq=False)
class ModelParameters:
    """Weight matrices (out x in) and bias vectors, one pair per layer."""

    weights: list
    biases: list

    @property
    def d(self) -> int:
        return self.weights[0].shape[1]

    @property
    def c(self) -> int:
        return self.weights[-1].shape[0]

    @property
    def hidden(self) -> int:
        """Hidden width, 0 for the linear architecture."""
        return 0 if len(self.weights) == 1 else self.weights[0].shape[0]

    def copy(self) -> "ModelParameters":
        return ModelParameters([w.copy() for w in self.weights],
                               [b.copy() for b in self.biases])

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(a)) for a in self.weights + self.biases)


@dataclass(eq=False)
class OptimizerState:
    """Velocity buffers plus SGD hyperparameters."""

    vel_w: list
    vel_b: list
    learning_rate: float
    momentum: float = 0.9
    weight_decay: float = 0.0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValueError("weight decay must be nonnegative")


@dataclass
class TrainConfig:
    """Hyperparameters of one training run."""

    epochs: int = 60
    batch_size: int = 32
    learning_rate: float = 0.05
    momentum: float = 0.9
    weight_decay: float = 1e-6
    seed: int = 0
    strategy: str = "vanilla"
    loss: LossSpec = field(default_factory=lambda: LossSpec("cce"))
    hidden: int = 32

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}, expected one of {STRATEGIES}")


def init_parameters(d: int, c: int, hidden: int, rng: np.random.Generator) -> ModelParameters:
    """Uniform [-a, a] weights with a = sqrt(6 / (fan_in + fan_out)), zero biases."""
    dims = [(d, c)] if hidden == 0 else [(d, hidden), (hidden, c)]
    weights, biases = [], []
    for fan_in, fan_out in dims:
        a = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-a, a, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return ModelParameters(weights, biases)


def init_optimizer(params: ModelParameters, learning_rate: float,
                   momentum: float = 0.9, weight_decay: float = 0.0) -> OptimizerState:
    return OptimizerState([np.zeros_like(w) for w in params.weights],
                          [np.zeros_like(b) for b in params.biases],
                          learning_rate, momentum, weight_decay)


def forward(params: ModelParameters, x: np.ndarray) -> np.ndarray:
    """Score vector h(x) for a single feature vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (params.d,):
        raise ValueError(f"expected feature vector of length {params.d}, got shape {x.shape}")
    if params.hidden == 0:
        return params.weights[0] @ x + params.biases[0]
    z = params.weights[0] @ x + params.biases[0]
    a = np.maximum(z, 0.0)
    return params.weights[1] @ a + params.biases[1]


def forward_batch(params: ModelParameters, x: np.ndarray):
    """Scores for a batch (n, d); also returns the activation cache."""
    x = np.asarray(x, dtype=np.float64)
    if params.hidden == 0:
        return x @ params.weights[0].T + params.biases[0], (x,)
    z = x @ params.weights[0].T + params.biases[0]
    a = np.maximum(z, 0.0)
    return a @ params.weights[1].T + params.biases[1], (x, z, a)


def backward(params: ModelParameters, x: np.ndarray, omega: np.ndarray) -> list:
    """Contract a score-space weighting vector against d h / d theta.

    Returns one (dW, db) pair per layer; linear in omega.
    """
    x = np.asarray(x, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (params.c,):
        raise ValueError(f"expected weighting vector of length {params.c}, got shape {omega.shape}")
    if params.hidden == 0:
        return [(np.outer(omega, x), omega.copy())]
    z = params.weights[0] @ x + params.biases[0]
    a = np.maximum(z, 0.0)
    d_hidden = (params.weights[1].T @ omega) * (z > 0.0)
    return [(np.outer(d_hidden, x), d_hidden),
            (np.outer(omega, a), omega.copy())]


def backward_batch(params: ModelParameters, cache, delta: np.ndarray) -> list:
    """Batched version of backward: delta holds one weighting vector per row
    (already divided by the batch size for a mean-loss gradient)."""
    if params.hidden == 0:
        (x,) = cache
        return [(delta.T @ x, delta.sum(axis=0))]
    x, z, a = cache
    d_hidden = (delta @ params.weights[1]) * (z > 0.0)
    return [(d_hidden.T @ x, d_hidden.sum(axis=0)),
            (delta.T @ a, delta.sum(axis=0))]


def step(params: ModelParameters, opt_state: OptimizerState, grads: list):
    """One SGD update: g <- g + wd * theta, v <- mu * v - lr * g,
    theta <- theta + v. The gradient is expected at the lookahead point
    theta + mu * v (see lookahead_parameters); params are updated in place.
    """
    lr = opt_state.learning_rate
    mu = opt_state.momentum
    wd = opt_state.weight_decay
    for i, (dw, db) in enumerate(grads):
        gw = dw + wd * params.weights[i]
        gb = db + wd * params.biases[i]
        opt_state.vel_w[i] = mu * opt_state.vel_w[i] - lr * gw
        opt_state.vel_b[i] = mu * opt_state.vel_b[i] - lr * gb
        params.weights[i] += opt_state.vel_w[i]
        params.biases[i] += opt_state.vel_b[i]
    return params, opt_state


def lookahead_parameters(params: ModelParameters, opt_state: OptimizerState) -> ModelParameters:
    """theta + mu * v, the point where Nesterov momentum takes its gradient."""
    if opt_state.momentum == 0.0:
        return params
    mu = opt_state.momentum
    return ModelParameters(
        [w + mu * v for w, v in zip(params.weights, opt_state.vel_w)],
        [b + mu * v for b, v in zip(params.biases, opt_state.vel_b)],
    )


def predict(params: ModelParameters, x: np.ndarray) -> int:
    """Argmax class; ties break toward the lowest index."""
    return int(np.argmax(forward(params, x)))


def predict_batch(params: ModelParameters, x: np.ndarray) -> np.ndarray:
    scores, _ = forward_batch(params, x)
    return scores.argmax(axis=1)


def _softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def batch_weighting(u: np.ndarray, labels: np.ndarray, spec: LossSpec,
                    strategy: str, cols=None, sample_weights=None) -> np.ndarray:
    """Per-sample score-space weighting vectors for a batch.

    u is the (n, c) softmax output; cols holds one transition-matrix column
    T[:, k_i] per row and is required for the forward/proposed strategies;
    sample_weights scales the vanilla gradient per sample. Probabilities
    are floored at PROB_FLOOR before evaluating f' so early-training
    underflow cannot produce non-finite weights.
    """
    n = u.shape[0]
    rows = np.arange(n)
    if strategy == "vanilla":
        uk = u[rows, labels]
        fprime = loss_derivative(spec, np.clip(uk, PROB_FLOOR, 1.0))
        if sample_weights is not None:
            fprime = fprime * sample_weights
        omega = -(uk * fprime)[:, None] * u
        omega[rows, labels] += fprime * uk
        return omega
    tu = cols * u
    ut = tu.sum(axis=1)
    fprime = loss_derivative(spec, np.clip(ut, PROB_FLOOR, 1.0))
    return fprime[:, None] * (tu - ut[:, None] * u)


def train(features: np.ndarray, labels: np.ndarray, source_ids: np.ndarray,
          c: int, config: TrainConfig, matrices=None, source_weights=None,
          epoch_callback=None) -> ModelParameters:
    """Train a classifier on weak-labelled data.

    matrices maps source id -> TransitionMatrix (or raw entries) and is
    required unless the strategy is vanilla; source_weights optionally maps
    source id -> scalar weight for the vanilla objective. epoch_callback is
    invoked as callback(epoch, params) after each epoch (epochs count from
    1). Bit-deterministic given (config, inputs).
    """
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    source_ids = np.asarray(source_ids, dtype=np.int64)
    n, d = features.shape
    if config.strategy != "vanilla" and matrices is None:
        raise ValueError(f"strategy {config.strategy!r} needs per-source transition matrices")

    rng = np.random.default_rng(config.seed)
    params = init_parameters(d, c, config.hidden, rng)
    state = init_optimizer(params, config.learning_rate, config.momentum, config.weight_decay)

    mats = None
    if config.strategy != "vanilla":
        mats = {int(s): np.asarray(getattr(m, "entries", m), dtype=np.float64)
                for s, m in matrices.items()}
    weights = None
    if config.strategy == "vanilla" and source_weights is not None:
        weights = {int(s): float(w) for s, w in source_weights.items()}

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb, yb, sb = features[idx], labels[idx], source_ids[idx]
            look = lookahead_parameters(params, state)
            scores, cache = forward_batch(look, xb)
            u = _softmax_rows(scores)
            cols = None
            sw = None
            if mats is not None:
                cols = np.empty_like(u)
                for s in np.unique(sb):
                    sel = sb == s
                    cols[sel] = mats[int(s)].T[yb[sel]]
            elif weights is not None:
                sw = np.array([weights.get(int(s), 1.0) for s in sb])
            omega = batch_weighting(u, yb, config.loss, config.strategy, cols, sw)
            grads = backward_batch(look, cache, omega / idx.shape[0])
            step(params, state, grads)
        if not params.all_finite():
            raise TrainingDiverged(f"non-finite parameters after epoch {epoch}")
        if epoch_callback is not None:
            epoch_callback(epoch, params)
    return params


_ARCH_LINEAR, _ARCH_HIDDEN = 0, 1


def save_params(path, params: ModelParameters) -> None:
    """Flat binary checkpoint: little-endian int32 header (arch, d, H, c)
    followed by row-major float64 arrays per layer (W then b)."""
    arch = _ARCH_LINEAR if params.hidden == 0 else _ARCH_HIDDEN
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4i", arch, params.d, params.hidden, params.c))
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_params(path) -> ModelParameters:
    with open(path, "rb") as fh:
        arch, d, hidden, c = struct.unpack("<4i", fh.read(16))
        dims = [(c, d)] if arch == _ARCH_LINEAR else [(hidden, d), (c, hidden)]
        weights, biases = [], []
        for rows, cols in dims:
            weights.append(np.frombuffer(fh.read(8 * rows * cols), dtype="<f8").reshape(rows, cols).copy())
            biases.append(np.frombuffer(fh.read(8 * rows), dtype="<f8").copy())
    return ModelParameters(weights, biases)
