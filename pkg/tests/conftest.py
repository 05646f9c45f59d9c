"""Shared fixtures and small builders for the test suite."""

import pathlib

import numpy as np
import pytest

from rcmts import Dataset, Mts, StateTensor

DATA_DIR = pathlib.Path(__file__).resolve().parents[1] / "data"


def make_states(n, t, r, seed=0, lengths=None):
    """Random state tensor with optional ragged true lengths."""
    rng = np.random.default_rng(seed)
    data = rng.standard_normal((n, t, r))
    if lengths is None:
        lengths = np.full(n, t, dtype=int)
    else:
        lengths = np.asarray(lengths, dtype=int)
        for i, ln in enumerate(lengths):
            data[i, ln:] = 0.0
    return StateTensor(data=data, lengths=lengths)


def make_dataset(n=6, t=8, f=2, c=2, seed=0, ragged=False):
    """Random labeled dataset, optionally with varying lengths."""
    rng = np.random.default_rng(seed)
    arrays = []
    labels = []
    for i in range(n):
        ln = int(rng.integers(max(2, t - 3), t + 1)) if ragged else t
        arrays.append(rng.standard_normal((ln, f)))
        labels.append(i % c)
    return Dataset.from_arrays(arrays, labels, num_classes=c,
                               t_max=t if ragged else None)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
