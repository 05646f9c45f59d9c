import numpy as np
import pytest

from rcmts import (
    Dataset,
    KIND_LAST_STATE,
    KIND_OUTPUT_MODEL,
    KIND_RESERVOIR_MODEL,
    StateTensor,
    last_state,
    output_model,
    reservoir_model,
    reservoir_model_bidirectional,
)
from rcmts.errors import (
    InvalidArgumentError,
    InvalidInputError,
    SampleTooShortError,
)
from conftest import make_states


def ridge_oracle(x, y, lam):
    # centered ridge with an unpenalized bias, solved densely
    xm = x.mean(axis=0)
    ym = y.mean(axis=0)
    xc = x - xm
    yc = y - ym
    w = np.linalg.solve(xc.T @ xc + lam * np.eye(x.shape[1]), xc.T @ yc)
    return w, ym - xm @ w


def model_dataset(lengths, f, t_max, seed=0):
    rng = np.random.default_rng(seed)
    arrays = [rng.standard_normal((ln, f)) for ln in lengths]
    labels = [i % 2 for i in range(len(lengths))]
    return Dataset.from_arrays(arrays, labels, num_classes=2, t_max=t_max)


class TestLastState:
    def test_picks_true_final_step(self):
        states = make_states(3, 6, 4, seed=0, lengths=[6, 2, 4])
        rep = last_state(states)
        for i, ln in enumerate([6, 2, 4]):
            assert np.array_equal(rep.vectors[i], states.data[i, ln - 1])
        assert rep.kind == KIND_LAST_STATE
        assert (rep.n, rep.dim) == (3, 4)

    def test_vectors_are_a_copy(self):
        states = make_states(2, 3, 2)
        rep = last_state(states)
        rep.vectors[0, 0] = 99.0
        assert states.data[0, 2, 0] != 99.0

    def test_bidirectional_flag(self):
        states = make_states(2, 3, 4)
        assert last_state(states, bidirectional=True).bidirectional

    def test_empty_tensor(self):
        empty = StateTensor(data=np.zeros((0, 3, 2)),
                            lengths=np.zeros(0, dtype=int))
        with pytest.raises(InvalidInputError):
            last_state(empty)


class TestConstantDynamics:
    # constant states carry no transition information: every model must
    # come out as zero weights plus a bias equal to the target mean

    def test_reservoir_model_zero_weights(self):
        c = np.array([0.5, -1.25, 2.0])
        data = np.tile(c, (2, 5, 1))
        states = StateTensor(data=data, lengths=np.full(2, 5))
        rep = reservoir_model(states, lam=5.0)
        d = 3
        weights = rep.vectors[:, : d * d]
        bias = rep.vectors[:, d * d:]
        assert np.abs(weights).max() == 0.0
        assert np.array_equal(bias, np.tile(c, (2, 1)))

    def test_output_model_bias_is_target_mean(self):
        c = np.array([1.0, 2.0])
        data = np.tile(c, (1, 5, 1))
        states = StateTensor(data=data, lengths=np.array([5]))
        ds = model_dataset([5], f=3, t_max=5, seed=1)
        rep = output_model(states, ds, lam=5.0)
        weights = rep.vectors[0, : 3 * 2].reshape(2, 3)
        bias = rep.vectors[0, 3 * 2:]
        assert np.abs(weights).max() == 0.0
        expect = ds.samples[0].values[1:5].mean(axis=0)
        assert np.array_equal(bias, expect)


class TestModelOracles:
    def test_reservoir_model_matches_dense_ridge(self):
        lengths = [4, 2, 3]
        states = make_states(3, 4, 2, seed=3, lengths=lengths)
        rep = reservoir_model(states, lam=5.0)
        assert rep.kind == KIND_RESERVOIR_MODEL
        assert rep.dim == 2 * 3
        for i, ln in enumerate(lengths):
            x = states.data[i, : ln - 1]
            y = states.data[i, 1:ln]
            w, b = ridge_oracle(x, y, 5.0)
            expect = np.concatenate([w.ravel(), b])
            assert np.abs(rep.vectors[i] - expect).max() < 1e-10

    def test_output_model_matches_dense_ridge(self):
        lengths = [4, 3, 4]
        states = make_states(3, 4, 3, seed=4, lengths=lengths)
        ds = model_dataset(lengths, f=2, t_max=4, seed=5)
        rep = output_model(states, ds, lam=5.0)
        assert rep.kind == KIND_OUTPUT_MODEL
        assert rep.dim == 2 * 4
        for i, ln in enumerate(lengths):
            x = states.data[i, : ln - 1]
            y = ds.samples[i].values[1:ln]
            w, b = ridge_oracle(x, y, 5.0)
            # layout check: leading block is the row-major weight matrix
            got_w = rep.vectors[i][: 3 * 2].reshape(3, 2)
            got_b = rep.vectors[i][3 * 2:]
            assert np.abs(got_w - w).max() < 1e-10
            assert np.abs(got_b - b).max() < 1e-10

    def test_fit_beats_or_ties_the_zero_model(self):
        states = make_states(4, 8, 3, seed=6)
        rep = reservoir_model(states, lam=5.0)
        for i in range(4):
            x = states.data[i, :7]
            y = states.data[i, 1:8]
            w = rep.vectors[i][:9].reshape(3, 3)
            b = rep.vectors[i][9:]
            fitted = (np.linalg.norm(x @ w + b - y) ** 2
                      + 5.0 * np.linalg.norm(w) ** 2)
            zero = np.linalg.norm(y - y.mean(axis=0)) ** 2
            assert fitted <= zero + 1e-10


class TestDimensionFormulas:
    def test_output_model_dim(self):
        states = make_states(2, 3, 75, seed=7)
        ds = model_dataset([3, 3], f=12, t_max=3, seed=8)
        assert output_model(states, ds, lam=5.0).dim == 912

    def test_reservoir_model_dim(self):
        states = make_states(2, 3, 75, seed=9)
        assert reservoir_model(states, lam=5.0).dim == 5700

    def test_reservoir_model_bidirectional_dim(self):
        states = make_states(2, 3, 150, seed=10)
        rep = reservoir_model_bidirectional(states, lam=5.0)
        assert rep.dim == 22650
        assert rep.bidirectional

    def test_bidirectional_entry_point_matches_plain(self):
        states = make_states(3, 5, 6, seed=11)
        a = reservoir_model_bidirectional(states, lam=5.0)
        b = reservoir_model(states, lam=5.0)
        assert np.array_equal(a.vectors, b.vectors)


class TestValidationAndThreads:
    def test_short_sample_reports_index(self):
        states = make_states(3, 4, 2, seed=12, lengths=[4, 1, 3])
        with pytest.raises(SampleTooShortError) as err:
            reservoir_model(states, lam=5.0)
        assert err.value.sample_index == 1

    @pytest.mark.parametrize("lam", [0.0, -1.0])
    def test_nonpositive_lambda(self, lam):
        states = make_states(2, 4, 2)
        with pytest.raises(InvalidArgumentError):
            reservoir_model(states, lam=lam)
        ds = model_dataset([4, 4], f=2, t_max=4)
        with pytest.raises(InvalidArgumentError):
            output_model(states, ds, lam=lam)

    def test_output_model_length_mismatch(self):
        states = make_states(2, 4, 2, lengths=[4, 3])
        ds = model_dataset([4, 4], f=2, t_max=4)
        with pytest.raises(InvalidArgumentError):
            output_model(states, ds, lam=5.0)

    def test_output_model_count_mismatch(self):
        states = make_states(3, 4, 2)
        ds = model_dataset([4, 4], f=2, t_max=4)
        with pytest.raises(InvalidArgumentError):
            output_model(states, ds, lam=5.0)

    def test_padding_rows_never_enter_fits(self):
        lengths = [3, 2]
        states = make_states(2, 4, 3, seed=13, lengths=lengths)
        junk = states.data.copy()
        junk[0, 3:] = 7.7
        junk[1, 2:] = -3.3
        dirty = StateTensor(data=junk, lengths=np.asarray(lengths))
        a = reservoir_model(states, lam=5.0)
        b = reservoir_model(dirty, lam=5.0)
        assert np.array_equal(a.vectors, b.vectors)

    def test_threads_do_not_change_vectors(self):
        states = make_states(6, 5, 3, seed=14)
        a = reservoir_model(states, lam=5.0, threads=1)
        b = reservoir_model(states, lam=5.0, threads=4)
        assert np.array_equal(a.vectors, b.vectors)

    def test_permutation_equivariance(self):
        states = make_states(5, 4, 3, seed=15, lengths=[4, 3, 4, 2, 3])
        perm = np.array([3, 0, 4, 1, 2])
        shuffled = StateTensor(data=states.data[perm],
                               lengths=states.lengths[perm])
        a = reservoir_model(states, lam=5.0)
        b = reservoir_model(shuffled, lam=5.0, threads=2)
        assert np.array_equal(b.vectors, a.vectors[perm])


class TestSeparability:
    def test_model_space_separates_dynamics(self):
        # two linear systems; model parameters should cluster by system
        rng = np.random.default_rng(16)
        rot = np.array([[0.8, -0.4], [0.4, 0.8]])
        damp = np.array([[0.9, 0.0], [0.3, 0.5]])
        data = np.zeros((4, 20, 2))
        for i, mat in enumerate([rot, rot, damp, damp]):
            h = np.array([1.0, 0.2])
            for t in range(20):
                data[i, t] = h
                h = mat @ h + 1e-3 * rng.standard_normal(2)
        states = StateTensor(data=data, lengths=np.full(4, 20))
        vec = reservoir_model(states, lam=1e-4).vectors
        within = max(np.linalg.norm(vec[0] - vec[1]),
                     np.linalg.norm(vec[2] - vec[3]))
        across = min(np.linalg.norm(vec[i] - vec[j])
                     for i in (0, 1) for j in (2, 3))
        assert across > 10 * within
