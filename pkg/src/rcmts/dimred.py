"""Dimensionality reduction of state tensors, R features down to D.

Two covariance estimators feed the same eigendecomposition. The flattened
variant unfolds the (N, T, R) tensor along the feature mode into an
(N*T, R) matrix and takes the ordinary covariance of its rows. The
per-sample variant treats each sample's full (T, R) slice as one
observation:

    S = sum_n (H_n - Hbar)^T (H_n - Hbar) / (N - 1),

which preserves within-sample temporal structure and is the default in the
classification pipeline. Projection applies E^T to every state vector with
no centering; the fitted mean is stored so a centered variant can be
toggled for comparison runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidInputError
from .linalg import sym_eig_top_d
from .reservoir import StateTensor

MODE_FLATTENED = "flattened"
MODE_PER_SAMPLE = "per-sample"


@dataclass(frozen=True)
class Projection:
    """A fitted linear projection R -> D.

    Attributes:
        matrix: (R, D) orthonormal columns, leading eigenvectors.
        eigenvalues: (D,) descending.
        mode: "flattened" or "per-sample".
        fitted_feature_dim: R at fit time.
        mean: fitted mean, (R,) for flattened mode or (T_max, R) for
            per-sample mode; unused unless a centered apply is requested.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    mode: str
    fitted_feature_dim: int
    mean: np.ndarray


def flattened_covariance(states):
    """Covariance of all state vectors across samples and timesteps."""
    data = states.data
    n, t_max, r = data.shape
    rows = n * t_max
    if rows < 2:
        raise InvalidInputError(
            f"flattened covariance needs at least 2 state rows, got {rows}")
    flat = data.reshape(rows, r)
    mean = flat.mean(axis=0)
    centered = flat - mean
    return centered.T @ centered / (rows - 1)


def sample_covariance(states):
    """Per-sample covariance; each (T, R) slice is one observation."""
    data = states.data
    n = data.shape[0]
    if n < 2:
        raise InvalidInputError(
            f"per-sample covariance needs at least 2 samples, got {n}")
    mean_slice = data.mean(axis=0)
    centered = data - mean_slice
    # sum_n C_n^T C_n equals the Gram matrix of all centered rows
    flat = centered.reshape(-1, data.shape[2])
    return flat.T @ flat / (n - 1)


def fit_projection(states, d, mode=MODE_PER_SAMPLE):
    """Eigendecompose the chosen covariance and keep the top d directions."""
    if mode == MODE_FLATTENED:
        cov = flattened_covariance(states)
        mean = states.data.reshape(-1, states.features).mean(axis=0)
    elif mode == MODE_PER_SAMPLE:
        cov = sample_covariance(states)
        mean = states.data.mean(axis=0)
    else:
        raise InvalidArgumentError(f"unknown projection mode {mode!r}")
    eig = sym_eig_top_d(cov, d)
    return Projection(matrix=eig.eigenvectors, eigenvalues=eig.eigenvalues,
                      mode=mode, fitted_feature_dim=states.features,
                      mean=mean)


def apply_projection(states, proj, centered=False):
    """Replace every state vector h by E^T h (optionally E^T (h - mean)).

    The default applies the projection with no centering. Lengths are
    preserved.
    """
    if states.features != proj.fitted_feature_dim:
        raise InvalidArgumentError(
            f"tensor has {states.features} features, projection was fitted "
            f"on {proj.fitted_feature_dim}")
    data = states.data
    if centered:
        if proj.mode == MODE_PER_SAMPLE:
            if proj.mean.shape[0] != states.t_max:
                raise InvalidArgumentError(
                    "centered per-sample apply needs matching t_max")
            data = data - proj.mean[None]
        else:
            data = data - proj.mean
    reduced = data @ proj.matrix
    return StateTensor(data=reduced, lengths=states.lengths.copy())
