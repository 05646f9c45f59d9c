"""Readouts: map representations to class labels.

The default readout is a closed-form ridge classifier on one-hot targets.
The deep readout is a small MLP (three hidden layers of 20 units, ReLU or
Maxout activations) trained full-batch with adaptive moment updates,
inverted dropout on hidden activations, and an L2 penalty on weights.
Ties in argmax always go to the lowest class index.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import (
    DivergenceError,
    InvalidArgumentError,
    InvalidInputError,
    InvalidLabelError,
)
from .linalg import ridge_solve
from .representation import Representation

ACT_RELU = "relu"
ACT_MAXOUT = "maxout"


def _as_matrix(reps):
    if isinstance(reps, Representation):
        return reps.vectors
    m = np.asarray(reps, dtype=float)
    if m.ndim != 2:
        raise InvalidArgumentError("representation matrix must be 2-d")
    return m


def _check_labels(labels, num_classes):
    labels = np.asarray(labels, dtype=int)
    if num_classes is None:
        num_classes = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=num_classes)
    if labels.min() < 0 or labels.max() >= num_classes:
        raise InvalidLabelError(
            f"labels must lie in [0, {num_classes})")
    missing = np.nonzero(counts == 0)[0]
    if len(missing):
        raise InvalidLabelError(
            f"classes {missing.tolist()} absent from training labels")
    return labels, num_classes


@dataclass(frozen=True)
class RidgeModel:
    """Linear classifier scores = x W + b, one column per class."""

    weights: np.ndarray
    bias: np.ndarray
    lam: float

    @property
    def num_classes(self):
        return self.weights.shape[1]


def fit_ridge_classifier(reps, labels, lam=1.0, num_classes=None):
    """Closed-form ridge fit on one-hot encoded labels.

    Raises:
        InvalidLabelError: a class in [0, C) never occurs in ``labels``.
        InvalidInputError: fewer samples than classes.
    """
    x = _as_matrix(reps)
    if lam <= 0:
        raise InvalidArgumentError(f"lambda must be > 0, got {lam}")
    labels, c = _check_labels(labels, num_classes)
    if c < 2:
        raise InvalidInputError("classification needs at least 2 classes")
    if x.shape[0] < c:
        raise InvalidInputError(
            f"need at least as many samples ({x.shape[0]}) as classes ({c})")
    onehot = np.eye(c)[labels]
    weights, bias = ridge_solve(x, onehot, lam)
    return RidgeModel(weights=weights, bias=bias, lam=float(lam))


def ridge_scores(model, reps):
    """Raw class scores for each row."""
    x = _as_matrix(reps)
    if x.shape[1] != model.weights.shape[0]:
        raise InvalidArgumentError(
            f"representation dim {x.shape[1]} does not match model dim "
            f"{model.weights.shape[0]}")
    return x @ model.weights + model.bias


def predict_ridge(model, reps):
    """Argmax class per row, lowest index on ties."""
    return np.argmax(ridge_scores(model, reps), axis=1)


@dataclass(frozen=True)
class MlpConfig:
    """Hyperparameters of the deep readout.

    Defaults: three hidden layers of 20 units, dropout 0.1, L2 0.001,
    5000 epochs of full-batch adaptive moment descent with step 1e-3.
    ``batch_size`` None means full batch (the default protocol);
    otherwise contiguous minibatches of that size are used in order.
    """

    hidden: tuple = (20, 20, 20)
    activation: str = ACT_RELU
    maxout_k: int = 2
    p_drop: float = 0.1
    l2: float = 0.001
    epochs: int = 5000
    step: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    batch_size: int = None

    def __post_init__(self):
        if self.activation not in (ACT_RELU, ACT_MAXOUT):
            raise InvalidArgumentError(
                f"unknown activation {self.activation!r}")
        if not 0.0 <= self.p_drop < 1.0:
            raise InvalidArgumentError(
                f"p_drop must be in [0, 1), got {self.p_drop}")
        if self.maxout_k < 1:
            raise InvalidArgumentError("maxout_k must be >= 1")
        if self.epochs < 1:
            raise InvalidArgumentError("epochs must be >= 1")
        if self.l2 < 0 or self.step <= 0:
            raise InvalidArgumentError("bad l2 or step size")
        if self.batch_size is not None and self.batch_size < 1:
            raise InvalidArgumentError(
                f"batch_size must be >= 1, got {self.batch_size}")
        if not any(h >= 1 for h in self.hidden) or len(self.hidden) < 1:
            raise InvalidArgumentError("hidden layout must be nonempty")


@dataclass(frozen=True)
class MlpReadout:
    """A trained deep readout.

    ``params`` is a list of (W, b) pairs, one per layer. Hidden Maxout
    layers store W with shape (k, in, out) and b with shape (k, out);
    ReLU hidden layers and the linear output layer store (in, out), (out,).
    """

    params: list
    config: MlpConfig
    input_dim: int
    num_classes: int
    final_loss: float = field(default=float("nan"), compare=False)


def _init_params(cfg, input_dim, num_classes):
    rng = _rng.stream(_rng.OP_MLP_INIT, cfg.seed)
    dims = [input_dim, *cfg.hidden, num_classes]
    params = []
    for li in range(len(dims) - 1):
        fan_in, fan_out = dims[li], dims[li + 1]
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        hidden_maxout = cfg.activation == ACT_MAXOUT and li < len(cfg.hidden)
        if hidden_maxout:
            w = rng.uniform(-limit, limit, (cfg.maxout_k, fan_in, fan_out))
            b = np.zeros((cfg.maxout_k, fan_out))
        else:
            w = rng.uniform(-limit, limit, (fan_in, fan_out))
            b = np.zeros(fan_out)
        params.append((w, b))
    return params


def _forward(params, cfg, x, masks=None):
    """Forward pass; returns (logits, caches) for backprop."""
    a = x
    caches = []
    n_hidden = len(params) - 1
    for li in range(n_hidden):
        w, b = params[li]
        if w.ndim == 3:  # maxout pieces
            z = np.einsum("ni,kio->nko", a, w) + b[None]
            winner = np.argmax(z, axis=1)
            act = np.take_along_axis(z, winner[:, None, :], axis=1)[:, 0, :]
        else:
            z = a @ w + b
            winner = None
            act = np.maximum(z, 0.0)
        mask = None if masks is None else masks[li]
        out = act if mask is None else act * mask
        caches.append((a, z, winner, act, mask))
        a = out
    w, b = params[-1]
    logits = a @ w + b
    caches.append((a,))
    return logits, caches


def _loss_from_logits(logits, onehot, params, l2):
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    ce = np.mean(log_z - (shifted * onehot).sum(axis=1))
    reg = sum(float(np.sum(w * w)) for w, _ in params)
    return ce + l2 * reg


def mlp_loss_and_grads(params, cfg, x, onehot, masks=None):
    """Loss and analytic gradients for one (mini)batch.

    With ``masks`` None, dropout is off; passing fixed masks makes the
    loss a deterministic function of ``params``, which is what the finite
    difference verification uses.

    Returns:
        (loss, grads) with grads matching the structure of ``params``.
    """
    n = x.shape[0]
    logits, caches = _forward(params, cfg, x, masks)
    loss = _loss_from_logits(logits, onehot, params, cfg.l2)
    if not np.isfinite(loss):
        return loss, None

    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    softmax = expz / expz.sum(axis=1, keepdims=True)
    dlogits = (softmax - onehot) / n

    grads = [None] * len(params)
    a_last = caches[-1][0]
    w_out, _ = params[-1]
    grads[-1] = (a_last.T @ dlogits + 2.0 * cfg.l2 * w_out,
                 dlogits.sum(axis=0))
    da = dlogits @ w_out.T

    for li in range(len(params) - 2, -1, -1):
        a_in, z, winner, _act, mask = caches[li]
        if mask is not None:
            da = da * mask
        w, _b = params[li]
        if w.ndim == 3:
            dz = np.zeros_like(z)
            np.put_along_axis(dz, winner[:, None, :], da[:, None, :], axis=1)
            gw = np.einsum("ni,nko->kio", a_in, dz) + 2.0 * cfg.l2 * w
            gb = dz.sum(axis=0)
            da = np.einsum("nko,kio->ni", dz, w)
        else:
            dz = da * (z > 0.0)
            gw = a_in.T @ dz + 2.0 * cfg.l2 * w
            gb = dz.sum(axis=0)
            da = dz @ w.T
        grads[li] = (gw, gb)
    return loss, grads


def fit_mlp(reps, labels, cfg=None, num_classes=None):
    """Train the deep readout; deterministic for a fixed config seed.

    Raises:
        DivergenceError: the loss became non-finite; carries the epoch.
    """
    cfg = cfg or MlpConfig()
    x = _as_matrix(reps)
    if x.shape[0] < 1:
        raise InvalidInputError("fit_mlp needs at least one sample")
    labels, c = _check_labels(labels, num_classes)
    if c < 2:
        raise InvalidInputError("classification needs at least 2 classes")
    onehot = np.eye(c)[labels]

    params = _init_params(cfg, x.shape[1], c)
    moments = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
    velocities = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
    drop_rng = _rng.stream(_rng.OP_MLP_DROPOUT, cfg.seed)
    n = x.shape[0]
    batch = n if cfg.batch_size is None else min(cfg.batch_size, n)
    step_count = 0
    loss = float("nan")
    for epoch in range(cfg.epochs):
        for start in range(0, n, batch):
            xb = x[start:start + batch]
            yb = onehot[start:start + batch]
            masks = None
            if cfg.p_drop > 0:
                keep = 1.0 - cfg.p_drop
                masks = [
                    (drop_rng.random((xb.shape[0], h)) < keep) / keep
                    for h in cfg.hidden
                ]
            loss, grads = mlp_loss_and_grads(params, cfg, xb, yb, masks)
            if not np.isfinite(loss):
                raise DivergenceError(
                    f"non-finite loss at epoch {epoch}", epoch=epoch)
            step_count += 1
            correct1 = 1.0 - cfg.beta1**step_count
            correct2 = 1.0 - cfg.beta2**step_count
            new_params = []
            for (w, b), (gw, gb), (mw, mb), (vw, vb) in zip(
                    params, grads, moments, velocities):
                mw = cfg.beta1 * mw + (1 - cfg.beta1) * gw
                mb = cfg.beta1 * mb + (1 - cfg.beta1) * gb
                vw = cfg.beta2 * vw + (1 - cfg.beta2) * gw**2
                vb = cfg.beta2 * vb + (1 - cfg.beta2) * gb**2
                w = w - cfg.step * (mw / correct1) / (
                    np.sqrt(vw / correct2) + cfg.eps)
                b = b - cfg.step * (mb / correct1) / (
                    np.sqrt(vb / correct2) + cfg.eps)
                new_params.append((w, b))
                moments[len(new_params) - 1] = (mw, mb)
                velocities[len(new_params) - 1] = (vw, vb)
            params = new_params
    return MlpReadout(params=params, config=cfg, input_dim=x.shape[1],
                      num_classes=c, final_loss=float(loss))


def mlp_scores(model, reps):
    """Logits with dropout disabled."""
    x = _as_matrix(reps)
    if x.shape[1] != model.input_dim:
        raise InvalidArgumentError(
            f"representation dim {x.shape[1]} does not match model input "
            f"dim {model.input_dim}")
    logits, _ = _forward(model.params, model.config, x, masks=None)
    return logits


def predict_mlp(model, reps):
    """Argmax class per row with dropout disabled, lowest index on ties."""
    return np.argmax(mlp_scores(model, reps), axis=1)
