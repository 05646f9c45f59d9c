"""Frozen random reservoirs and state encoding for MTS datasets.

A reservoir is a fixed random recurrent layer. Its input weights are
uniform on [-omega, omega]; its recurrent matrix has entries that are
nonzero with probability beta, uniform on [-1, 1], and is rescaled once so
its spectral radius equals rho. States follow

    h(t) = tanh(W_in x(t) + W_r h(t-1) + eps(t)),   h(0) = 0,

with eps(t) i.i.d. Gaussian of standard deviation xi drawn from a stream
keyed by (seed, sample index), so results cannot depend on processing
order or thread count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _rng
from .dataset import zero_pad
from .errors import (
    DegenerateReservoirError,
    InvalidArgumentError,
    InvalidInputError,
)
from .linalg import spectral_radius

_ENCODE_CHUNK = 128  # fixed batch width keeps results independent of threads


@dataclass(frozen=True)
class ReservoirConfig:
    """Hyperparameters of a reservoir.

    Defaults are the benchmark settings used throughout: 800 units,
    spectral radius 0.99, 25% connectivity, input scaling 0.15, state
    noise 0.01.
    """

    units: int = 800
    rho: float = 0.99
    connectivity: float = 0.25
    input_scaling: float = 0.15
    noise: float = 0.01
    seed: int = 0
    bidirectional: bool = False

    def __post_init__(self):
        if self.units < 1:
            raise InvalidArgumentError(f"units must be >= 1, got {self.units}")
        if not 0.0 < self.connectivity <= 1.0:
            raise InvalidArgumentError(
                f"connectivity must be in (0, 1], got {self.connectivity}")
        if self.rho < 0.0:
            raise InvalidArgumentError(f"rho must be >= 0, got {self.rho}")
        if self.noise < 0.0:
            raise InvalidArgumentError(f"noise must be >= 0, got {self.noise}")
        if self.input_scaling <= 0.0:
            raise InvalidArgumentError(
                f"input_scaling must be > 0, got {self.input_scaling}")


@dataclass(frozen=True)
class Reservoir:
    """A built reservoir: dense input weights plus sparse recurrent weights."""

    w_in: np.ndarray
    w_r: sp.csr_array
    config: ReservoirConfig
    input_dim: int


@dataclass(frozen=True)
class StateTensor:
    """Stacked state sequences of a dataset.

    Attributes:
        data: (N, T_max, features) array; features is R, 2R, or D after a
            projection.
        lengths: (N,) true sample lengths; rows at or beyond a sample's
            length were driven by zero padding.
    """

    data: np.ndarray
    lengths: np.ndarray = field(repr=False)

    @property
    def n(self):
        return self.data.shape[0]

    @property
    def t_max(self):
        return self.data.shape[1]

    @property
    def features(self):
        return self.data.shape[2]


def build_reservoir(config, input_dim):
    """Draw reservoir weights from the seed stream and rescale to rho.

    The recurrent draw is resampled up to 5 times if it comes out with
    spectral radius zero while rho > 0 (realistic only for tiny units or
    connectivity); after that a degenerate-reservoir error is raised.
    """
    if input_dim < 1:
        raise InvalidArgumentError(f"input_dim must be >= 1, got {input_dim}")
    r = config.units
    rng = _rng.stream(_rng.OP_RESERVOIR_BUILD, config.seed)
    w_in = rng.uniform(-config.input_scaling, config.input_scaling,
                       (r, input_dim))

    last_exc = None
    for _ in range(5):
        keep = rng.random((r, r)) < config.connectivity
        vals = rng.uniform(-1.0, 1.0, (r, r))
        w = np.where(keep, vals, 0.0)
        if config.rho == 0.0:
            return Reservoir(w_in=w_in, w_r=sp.csr_array((r, r)),
                             config=config, input_dim=input_dim)
        measured = spectral_radius(sp.csr_array(w))
        if measured == 0.0:
            last_exc = DegenerateReservoirError(
                "sampled recurrent matrix has spectral radius 0")
            continue
        w_r = sp.csr_array(w * (config.rho / measured))
        verified = spectral_radius(w_r)
        if abs(verified - config.rho) > 1e-6:
            raise DegenerateReservoirError(
                f"rescaled radius {verified} misses target {config.rho}")
        return Reservoir(w_in=w_in, w_r=w_r, config=config,
                         input_dim=input_dim)
    raise last_exc


def _state_noise(config, sample_index, t, backward=False):
    op = _rng.OP_STATE_NOISE_BWD if backward else _rng.OP_STATE_NOISE_FWD
    rng = _rng.stream(op, config.seed, sample_index)
    return rng.standard_normal((t, config.units)) * config.noise


def _run_batch(res, x_batch, noise_batch):
    """Shared recurrence for a (B, T, F) input batch."""
    b, t_len, _ = x_batch.shape
    r = res.config.units
    w_r_t = res.w_r.T.tocsr()
    states = np.empty((b, t_len, r))
    h = np.zeros((b, r))
    for t in range(t_len):
        pre = x_batch[:, t, :] @ res.w_in.T + h @ w_r_t
        if noise_batch is not None:
            pre += noise_batch[:, t, :]
        h = np.tanh(pre)
        states[:, t, :] = h
    return states


def run_states(res, mts, sample_index=0):
    """Encode one MTS into its (T, R) state sequence.

    ``sample_index`` selects the per-sample noise stream; encode_dataset
    passes each sample's position so batch results match sample-at-a-time
    results exactly.
    """
    x = np.asarray(mts.values, dtype=float)
    if x.ndim != 2 or x.shape[1] != res.input_dim:
        raise InvalidInputError(
            f"sample has feature dim {x.shape[-1] if x.ndim == 2 else '?'}, "
            f"reservoir expects {res.input_dim}")
    if not np.isfinite(x).all():
        raise InvalidInputError("non-finite values in input sequence")
    noise = None
    if res.config.noise > 0:
        noise = _state_noise(res.config, sample_index, x.shape[0])[None]
    return _run_batch(res, x[None], noise)[0]


def _reverse_rows(x, length):
    """Time-reverse the true sequence, leaving trailing padding in place."""
    out = x.copy()
    out[:length] = x[length - 1::-1]
    return out


def run_states_bidirectional(res, mts, sample_index=0):
    """Encode one MTS with forward and backward passes, rows (T, 2R).

    The backward pass feeds the time-reversed sequence through the same
    reservoir with its own noise stream. For padded samples only the true
    prefix is reversed; trailing zero rows stay where they are, so the
    backward state at the true final step has seen the whole sequence.
    """
    x = np.asarray(mts.values, dtype=float)
    if x.ndim != 2 or x.shape[1] != res.input_dim:
        raise InvalidInputError(
            f"sample has feature dim {x.shape[-1] if x.ndim == 2 else '?'}, "
            f"reservoir expects {res.input_dim}")
    if not np.isfinite(x).all():
        raise InvalidInputError("non-finite values in input sequence")
    length = getattr(mts, "length", x.shape[0])
    fwd_noise = bwd_noise = None
    if res.config.noise > 0:
        fwd_noise = _state_noise(res.config, sample_index, x.shape[0])[None]
        bwd_noise = _state_noise(res.config, sample_index, x.shape[0],
                                 backward=True)[None]
    fwd = _run_batch(res, x[None], fwd_noise)[0]
    bwd = _run_batch(res, _reverse_rows(x, length)[None], bwd_noise)[0]
    return np.concatenate([fwd, bwd], axis=1)


def encode_dataset(res, ds, threads=1):
    """Encode every sample of a dataset into one StateTensor.

    Samples are zero padded at the end to the dataset's t_max, then
    encoded in fixed-size chunks. Chunks may run on a thread pool; each
    chunk's arithmetic is independent of the pool size, so the result is
    bitwise identical for any thread count.
    """
    if len(ds) == 0:
        raise InvalidInputError("cannot encode an empty dataset")
    if ds.feature_dim != res.input_dim:
        raise InvalidInputError(
            f"dataset feature dim {ds.feature_dim} does not match reservoir "
            f"input dim {res.input_dim}")
    padded = zero_pad(ds)
    n = len(padded)
    t_max = ds.t_max
    r = res.config.units
    lengths = padded.lengths

    x_all = np.stack([s.values for s in padded.samples])
    if not np.isfinite(x_all).all():
        raise InvalidInputError("non-finite values in dataset")

    feat = 2 * r if res.config.bidirectional else r
    out = np.empty((n, t_max, feat))

    def encode_chunk(start):
        stop = min(start + _ENCODE_CHUNK, n)
        xb = x_all[start:stop]
        if res.config.bidirectional:
            fwd_noise = bwd_noise = None
            if res.config.noise > 0:
                fwd_noise = np.stack([
                    _state_noise(res.config, i, t_max)
                    for i in range(start, stop)])
                bwd_noise = np.stack([
                    _state_noise(res.config, i, t_max, backward=True)
                    for i in range(start, stop)])
            rev = np.stack([
                _reverse_rows(x_all[i], lengths[i])
                for i in range(start, stop)])
            out[start:stop, :, :r] = _run_batch(res, xb, fwd_noise)
            out[start:stop, :, r:] = _run_batch(res, rev, bwd_noise)
        else:
            noise = None
            if res.config.noise > 0:
                noise = np.stack([
                    _state_noise(res.config, i, t_max)
                    for i in range(start, stop)])
            out[start:stop] = _run_batch(res, xb, noise)

    starts = list(range(0, n, _ENCODE_CHUNK))
    if threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(encode_chunk, starts))
    else:
        for s in starts:
            encode_chunk(s)
    return StateTensor(data=out, lengths=lengths)
