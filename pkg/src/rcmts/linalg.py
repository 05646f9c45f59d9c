"""Deterministic numerical kernels used by every other module.

Three operations live here: multi-output ridge regression with an
unpenalized bias, the top-d symmetric eigendecomposition with a fixed sign
convention, and a spectral radius estimator for sparse matrices.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from . import _rng
from .errors import (
    ConvergenceError,
    InvalidArgumentError,
    InvalidInputError,
    SingularityError,
)


@dataclass(frozen=True)
class EigResult:
    """Top-d symmetric eigendecomposition.

    Attributes:
        eigenvalues: shape (d,), descending.
        eigenvectors: shape (R, d), orthonormal columns, one per eigenvalue.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def ridge_solve(design, targets, lam):
    """Solve min ||X W + b - Y||^2 + lam ||W||^2 with unpenalized bias b.

    The bias is absorbed by centering the columns of X and Y; the weights
    then solve the centered normal equations and b = mean(Y) - mean(X) W.
    When the feature count exceeds the row count the algebraically identical
    Gram form (X Xt + lam I) is solved instead, which is much smaller.

    Args:
        design: (N, P) matrix.
        targets: (N, Q) matrix or (N,) vector.
        lam: ridge penalty, >= 0. With lam = 0 the centered normal equations
            must be nonsingular.

    Returns:
        (weights, bias): weights (P, Q), bias (Q,).

    Raises:
        InvalidInputError: non-finite entries or empty design.
        InvalidArgumentError: negative lam or mismatched row counts.
        SingularityError: singular system with lam = 0.
    """
    x = np.asarray(design, dtype=float)
    y = np.asarray(targets, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if x.ndim != 2 or y.ndim != 2:
        raise InvalidArgumentError("design and targets must be 2-d")
    if x.shape[0] != y.shape[0]:
        raise InvalidArgumentError(
            f"row mismatch: design has {x.shape[0]} rows, targets {y.shape[0]}"
        )
    if x.shape[0] < 1:
        raise InvalidInputError("ridge_solve needs at least one row")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise InvalidInputError("ridge_solve: non-finite entries in input")
    lam = float(lam)
    if lam < 0:
        raise InvalidArgumentError(f"lambda must be >= 0, got {lam}")

    n, p = x.shape
    x_mean = x.mean(axis=0)
    y_mean = y.mean(axis=0)
    xc = x - x_mean
    yc = y - y_mean

    try:
        if p <= n:
            gram = xc.T @ xc
            if lam == 0.0:
                # Cholesky can sneak past an exactly singular PSD matrix on
                # rounding alone, so rank-check explicitly in this case.
                evals = scipy.linalg.eigvalsh(gram, check_finite=False)
                if evals[-1] <= 0.0 or evals[0] <= 1e-12 * evals[-1]:
                    raise scipy.linalg.LinAlgError("rank-deficient gram")
            gram[np.diag_indices_from(gram)] += lam
            cf = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
            weights = scipy.linalg.cho_solve(cf, xc.T @ yc, check_finite=False)
        else:
            if lam == 0.0:
                # more features than rows: the centered normal equations are
                # rank deficient no matter the data
                raise scipy.linalg.LinAlgError("underdetermined system")
            # Gram trick: (Xc Xct + lam I)^-1 applied to Yc, then lift by Xct.
            gram = xc @ xc.T
            gram[np.diag_indices_from(gram)] += lam
            cf = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
            weights = xc.T @ scipy.linalg.cho_solve(cf, yc, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise SingularityError(
            f"centered normal equations are singular (lambda={lam})"
        ) from exc

    bias = y_mean - x_mean @ weights
    return weights, bias


def sym_eig_top_d(matrix, d):
    """Top-d eigenpairs of a symmetric matrix, deterministic sign.

    Eigenvalues come back in descending order. Each eigenvector is flipped
    so its largest-magnitude entry is positive; on a magnitude tie the first
    such entry decides. Among exactly equal eigenvalues the solver's order
    is kept, so those columns are only unique up to that order.

    Args:
        matrix: (R, R) symmetric within 1e-10.
        d: number of leading eigenpairs, 1 <= d <= R.

    Returns:
        EigResult with eigenvalues (d,) and eigenvectors (R, d).

    Raises:
        InvalidInputError: asymmetric or non-finite input.
        InvalidArgumentError: d out of range.
    """
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InvalidInputError("sym_eig_top_d expects a square matrix")
    if not np.isfinite(s).all():
        raise InvalidInputError("sym_eig_top_d: non-finite entries")
    if np.max(np.abs(s - s.T), initial=0.0) > 1e-10:
        raise InvalidInputError("sym_eig_top_d: matrix is not symmetric")
    d = int(d)
    r = s.shape[0]
    if not 1 <= d <= r:
        raise InvalidArgumentError(f"d must be in [1, {r}], got {d}")

    vals, vecs = scipy.linalg.eigh(s, check_finite=False)
    vals = vals[::-1][:d]
    vecs = vecs[:, ::-1][:, :d].copy()
    for j in range(d):
        i = int(np.argmax(np.abs(vecs[:, j])))  # first index on ties
        if vecs[i, j] < 0:
            vecs[:, j] = -vecs[:, j]
    return EigResult(eigenvalues=vals, eigenvectors=vecs)


def spectral_radius(w, tol=1e-8, max_iter=10000, window=8):
    """Largest eigenvalue magnitude of a square (sparse) matrix.

    Power iteration from a fixed deterministic start vector. The dominant
    eigenvalue of a random recurrent matrix is usually a complex pair, so a
    single normalized iterate never settles; instead the estimate at each
    step is the largest Ritz value magnitude over a short window of recent
    iterates, which converges for complex pairs as well. Iteration stops
    once successive estimates agree to ``tol`` (relative) twice in a row.
    A zero iterate means the radius is exactly 0 and returns directly.

    Args:
        w: (R, R) scipy sparse matrix or ndarray.
        tol: successive-estimate tolerance, default 1e-8.
        max_iter: iteration cap, default 10000.
        window: number of recent iterates kept for the Ritz extraction.

    Returns:
        Nonnegative float estimate of the spectral radius.

    Raises:
        InvalidInputError: non-square input.
        ConvergenceError: iteration cap reached; carries ``last_estimate``.
    """
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise InvalidInputError("spectral_radius expects a square matrix")
    r = w.shape[0]
    if r == 0:
        raise InvalidInputError("spectral_radius: empty matrix")
    if sp.issparse(w):
        w = w.tocsr()
    else:
        w = np.asarray(w, dtype=float)

    m = min(int(window), r)
    us = [_rng.spectral_start_vector(r)]
    growth = []
    prev = np.inf
    hits = 0
    for _ in range(max_iter):
        v = w @ us[-1]
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            return 0.0
        us.append(v / norm)
        growth.append(norm)
        if len(us) > m + 1:
            us.pop(0)
            growth.pop(0)

        # Ritz values on the window span: with U = [u_j] and A U known
        # column-wise from the recurrence A u_j = growth[j+1] u_{j+1},
        # solve the small projected system (Ut U) C = Ut A U.
        u_mat = np.stack(us[:-1], axis=1)
        au_mat = np.stack([g * u for g, u in zip(growth, us[1:])], axis=1)
        g_mat = u_mat.T @ u_mat
        h_mat = u_mat.T @ au_mat
        p = g_mat.shape[0]
        while p > 1:
            ev = np.linalg.eigvalsh(g_mat)
            if ev[0] > 1e-10 * ev[-1]:
                break
            # drop the oldest direction when the window degenerates
            g_mat = g_mat[1:, 1:]
            h_mat = h_mat[1:, 1:]
            p -= 1
        c_mat = np.linalg.solve(g_mat, h_mat)
        est = float(np.max(np.abs(np.linalg.eigvals(c_mat))))

        if abs(est - prev) < tol * max(est, 1e-300):
            hits += 1
            if hits >= 2:
                return est
        else:
            hits = 0
        prev = est

    raise ConvergenceError(
        f"spectral radius did not converge in {max_iter} iterations",
        last_estimate=prev,
    )
