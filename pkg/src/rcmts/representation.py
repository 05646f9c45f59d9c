"""Fixed-size vector representations of encoded MTS.

Three kinds, all computed per sample from the state tensor:

  - last-state: the state at the true final step, dim R (2R bidirectional).
  - output-model: parameters of a per-sample ridge model predicting the
    next input from the current (reduced) state, dim F(D+1).
  - reservoir-model: parameters of a per-sample ridge model predicting the
    next (reduced) state from the current one, dim D(D+1), or 2D(2D+1) for
    bidirectional states.

Model fits use only the true length of each sample; rows produced by zero
padding never enter a fit. Each parameter vector is [vec(weights); bias]
with row-major vec.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidInputError, SampleTooShortError
from .linalg import ridge_solve

KIND_LAST_STATE = "last-state"
KIND_OUTPUT_MODEL = "output-model"
KIND_RESERVOIR_MODEL = "reservoir-model"


@dataclass(frozen=True)
class Representation:
    """N fixed-size vectors, one per sample.

    Attributes:
        kind: one of the KIND_* constants.
        vectors: (N, dim) array.
        bidirectional: whether the source states were bidirectional.
    """

    kind: str
    vectors: np.ndarray
    bidirectional: bool = False

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def dim(self):
        return self.vectors.shape[1]


def last_state(states, bidirectional=False):
    """Representation from the state at each sample's true final step."""
    if states.n < 1:
        raise InvalidInputError("empty state tensor")
    idx = states.lengths - 1
    vectors = states.data[np.arange(states.n), idx, :].copy()
    return Representation(kind=KIND_LAST_STATE, vectors=vectors,
                          bidirectional=bidirectional)


def _fit_rows(states, targets_fn, lam, out_dim, threads, kind, bidirectional):
    n = states.n
    vectors = np.empty((n, out_dim))

    def fit_one(i):
        t_len = int(states.lengths[i])
        if t_len < 2:
            raise SampleTooShortError(
                f"sample {i} has length {t_len}; model fits need T >= 2",
                sample_index=i)
        design = states.data[i, : t_len - 1, :]
        targets = targets_fn(i, t_len)
        weights, bias = ridge_solve(design, targets, lam)
        vectors[i] = np.concatenate([weights.ravel(), bias])

    if threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fit_one, range(n)))
    else:
        for i in range(n):
            fit_one(i)
    return Representation(kind=kind, vectors=vectors,
                          bidirectional=bidirectional)


def output_model(states, inputs, lam, threads=1, bidirectional=False):
    """Per-sample ridge models state(t) -> input(t+1), stacked parameters.

    Args:
        states: (reduced) StateTensor with feature dim D.
        inputs: the dataset that produced the states, normally the
            normalized one fed to the encoder; supplies the targets.
        lam: ridge penalty for the per-sample fits, > 0.

    Returns:
        Representation of dim F(D+1), F(2D+1) for bidirectional states.
    """
    if lam <= 0:
        raise InvalidArgumentError(f"model lambda must be > 0, got {lam}")
    if len(inputs) != states.n:
        raise InvalidArgumentError(
            f"dataset has {len(inputs)} samples, states have {states.n}")
    f_dim = inputs.feature_dim
    d = states.features
    if not np.array_equal(inputs.lengths, states.lengths):
        raise InvalidArgumentError(
            "dataset lengths do not match state tensor lengths")

    def targets(i, t_len):
        return inputs.samples[i].values[1:t_len, :]

    return _fit_rows(states, targets, lam, f_dim * (d + 1), threads,
                     KIND_OUTPUT_MODEL, bidirectional)


def reservoir_model(states, lam, threads=1, bidirectional=False):
    """Per-sample ridge models state(t) -> state(t+1), stacked parameters.

    Returns:
        Representation of dim D(D+1) where D is the state feature dim.
    """
    if lam <= 0:
        raise InvalidArgumentError(f"model lambda must be > 0, got {lam}")
    d = states.features

    def targets(i, t_len):
        return states.data[i, 1:t_len, :]

    return _fit_rows(states, targets, lam, d * (d + 1), threads,
                     KIND_RESERVOIR_MODEL, bidirectional)


def reservoir_model_bidirectional(states, lam, threads=1):
    """reservoir_model on concatenated forward/backward states.

    Structurally identical to reservoir_model with the 2D concatenated
    features treated as one state vector; kept as its own entry point
    because the dimension formula 2D(2D+1) is part of the contract.
    """
    return reservoir_model(states, lam, threads=threads, bidirectional=True)
