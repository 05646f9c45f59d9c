from dataclasses import replace

import numpy as np
import pytest

from rcmts import (
    Dataset,
    KIND_LAST_STATE,
    KIND_OUTPUT_MODEL,
    KIND_RESERVOIR_MODEL,
    MlpConfig,
    PipelineConfig,
    ReservoirConfig,
    crossval_d_sweep,
    f1_scores,
    fit_pipeline,
    generate_synthetic,
    predict_pipeline,
    repeat_trials,
    run_pipeline,
    to_bytes,
    transform_pipeline,
)
from rcmts.errors import InvalidArgumentError, InvalidLabelError

SMALL = ReservoirConfig(units=30, seed=0)


def small_config(**kwargs):
    kwargs.setdefault("reservoir", SMALL)
    kwargs.setdefault("d", 10)
    return PipelineConfig(**kwargs)


@pytest.fixture(scope="module")
def train_ds():
    return generate_synthetic(classes=2, per_class=10, t=30, f=2,
                              noise=0.1, seed=0)


@pytest.fixture(scope="module")
def test_ds():
    return generate_synthetic(classes=2, per_class=10, t=30, f=2,
                              noise=0.1, seed=7)


class TestF1Scores:
    def test_worked_example(self):
        true = [0, 0, 1, 1, 2]
        pred = [0, 1, 1, 1, 0]
        out = f1_scores(true, pred, 3)
        assert np.abs(out - [0.5, 0.8, 0.0]).max() < 1e-12

    def test_perfect_predictions(self):
        out = f1_scores([0, 1, 2], [0, 1, 2], 3)
        assert np.array_equal(out, np.ones(3))

    def test_absent_class_scores_zero(self):
        out = f1_scores([0, 0], [0, 0], 2)
        assert out.tolist() == [1.0, 0.0]


class TestRunPipeline:
    def test_metrics_shape_and_bounds(self, train_ds, test_ds):
        metrics, fitted = run_pipeline(small_config(), train_ds, test_ds)
        assert 0.0 <= metrics.accuracy <= 1.0
        assert metrics.per_class_f1.shape == (2,)
        assert abs(metrics.macro_f1 - metrics.per_class_f1.mean()) < 1e-12
        assert metrics.seconds > 0.0
        assert metrics.seed == SMALL.seed
        assert fitted.num_classes == 2

    def test_small_reservoir_model_is_accurate(self, train_ds, test_ds):
        metrics, _ = run_pipeline(small_config(), train_ds, test_ds)
        assert metrics.accuracy >= 0.95

    def test_identical_runs_identical_results(self, train_ds, test_ds):
        a, fitted_a = run_pipeline(small_config(), train_ds, test_ds)
        b, fitted_b = run_pipeline(small_config(), train_ds, test_ds)
        assert a.accuracy == b.accuracy
        assert np.array_equal(a.per_class_f1, b.per_class_f1)
        assert to_bytes(fitted_a) == to_bytes(fitted_b)

    def test_fit_never_sees_the_test_set(self, train_ds, test_ds):
        _, with_test = run_pipeline(small_config(), train_ds, test_ds)
        _, with_train = run_pipeline(small_config(), train_ds, train_ds)
        assert to_bytes(with_test) == to_bytes(with_train)

    def test_representations_share_reservoir_and_projection(self, train_ds):
        fits = [
            fit_pipeline(small_config(representation=kind), train_ds)
            for kind in (KIND_LAST_STATE, KIND_OUTPUT_MODEL,
                         KIND_RESERVOIR_MODEL)
        ]
        base = fits[0]
        for other in fits[1:]:
            assert np.array_equal(base.reservoir.w_in, other.reservoir.w_in)
            assert np.array_equal(base.reservoir.w_r.toarray(),
                                  other.reservoir.w_r.toarray())
            assert np.array_equal(base.projection.matrix,
                                  other.projection.matrix)

    @pytest.mark.parametrize("kind,expect", [
        (KIND_LAST_STATE, 10),
        (KIND_OUTPUT_MODEL, 2 * 11),
        (KIND_RESERVOIR_MODEL, 10 * 11),
    ])
    def test_representation_dims(self, train_ds, kind, expect):
        fitted = fit_pipeline(small_config(representation=kind), train_ds)
        assert transform_pipeline(fitted, train_ds).dim == expect

    @pytest.mark.parametrize("kind,expect", [
        (KIND_LAST_STATE, 2 * 5),
        (KIND_OUTPUT_MODEL, 2 * 11),
        (KIND_RESERVOIR_MODEL, 10 * 11),
    ])
    def test_bidirectional_dims_count_per_direction(self, train_ds, kind,
                                                    expect):
        cfg = small_config(reservoir=replace(SMALL, bidirectional=True),
                           d=5, representation=kind)
        fitted = fit_pipeline(cfg, train_ds)
        assert transform_pipeline(fitted, train_ds).dim == expect

    def test_last_state_without_dimred_keeps_full_width(self, train_ds):
        cfg = small_config(representation=KIND_LAST_STATE,
                           dimred_enabled=False)
        fitted = fit_pipeline(cfg, train_ds)
        assert fitted.projection is None
        assert transform_pipeline(fitted, train_ds).dim == 30

    def test_predictions_are_class_indices(self, train_ds, test_ds):
        fitted = fit_pipeline(small_config(), train_ds)
        pred = predict_pipeline(fitted, test_ds)
        assert pred.shape == (len(test_ds),)
        assert np.issubdtype(pred.dtype, np.integer)
        assert pred.min() >= 0 and pred.max() < 2

    def test_mlp_readout_end_to_end(self, train_ds, test_ds):
        cfg = small_config(readout="mlp",
                           mlp=MlpConfig(epochs=150, seed=5))
        metrics, fitted = run_pipeline(cfg, train_ds, test_ds)
        assert metrics.accuracy >= 0.8
        assert fitted.readout_model.config.seed == 5

    def test_default_mlp_seed_follows_reservoir(self, train_ds):
        cfg = small_config(reservoir=replace(SMALL, seed=42), readout="mlp")
        fitted = fit_pipeline(replace(cfg, mlp=None), train_ds)
        assert fitted.readout_model.config.seed == 42

    def test_stage_name_prefixes_readout_errors(self, train_ds):
        # claim 3 classes while the data only has 2
        bad = Dataset(samples=train_ds.samples, labels=train_ds.labels,
                      num_classes=3, feature_dim=train_ds.feature_dim,
                      t_max=train_ds.t_max, class_names=None)
        with pytest.raises(InvalidLabelError, match=r"\[stage readout\]"):
            fit_pipeline(small_config(), bad)

    def test_stage_name_prefixes_normalize_errors(self, train_ds):
        fitted = fit_pipeline(small_config(), train_ds)
        other = generate_synthetic(classes=2, per_class=2, t=10, f=5, seed=1)
        with pytest.raises(InvalidArgumentError,
                           match=r"\[stage normalize\]"):
            predict_pipeline(fitted, other)


class TestThreadInvariance:
    def test_threads_do_not_change_fit_or_metrics(self):
        # more samples than one encoder chunk, so threads actually split work
        train = generate_synthetic(classes=2, per_class=75, t=20, f=2, seed=3)
        test = generate_synthetic(classes=2, per_class=10, t=20, f=2, seed=4)
        cfg_1 = small_config(d=8, threads=1)
        cfg_4 = small_config(d=8, threads=4)
        a, fitted_a = run_pipeline(cfg_1, train, test)
        b, fitted_b = run_pipeline(cfg_4, train, test)
        assert a.accuracy == b.accuracy
        assert np.array_equal(a.per_class_f1, b.per_class_f1)
        blob_a = to_bytes(fitted_a)
        blob_b = to_bytes(fitted_b)
        # configs differ only in the threads field inside the meta json
        assert blob_a.replace(b'"threads": 1', b'"threads": 4') == blob_b


class TestRepeatTrials:
    def test_single_run_has_zero_std(self, train_ds, test_ds):
        result = repeat_trials(small_config(), train_ds, test_ds, 1)
        assert len(result.runs) == 1
        assert result.accuracy_std == 0.0
        assert result.accuracy_mean == result.runs[0].accuracy

    def test_aggregates_recompute_from_runs(self, train_ds, test_ds):
        result = repeat_trials(small_config(), train_ds, test_ds, 3)
        acc = np.array([m.accuracy for m in result.runs])
        assert abs(result.accuracy_mean - acc.mean()) < 1e-12
        assert abs(result.accuracy_std - acc.std()) < 1e-12
        f1 = np.array([m.macro_f1 for m in result.runs])
        assert abs(result.f1_mean - f1.mean()) < 1e-12

    def test_seeds_count_up_from_reservoir_seed(self, train_ds, test_ds):
        cfg = small_config(reservoir=replace(SMALL, seed=5))
        result = repeat_trials(cfg, train_ds, test_ds, 3)
        assert [m.seed for m in result.runs] == [5, 6, 7]

    def test_explicit_seed_list_is_honored(self, train_ds, test_ds):
        cfg = small_config(seeds=(11, 29, 3))
        result = repeat_trials(cfg, train_ds, test_ds, 2)
        assert [m.seed for m in result.runs] == [11, 29]

    def test_insufficient_seed_list(self, train_ds, test_ds):
        cfg = small_config(seeds=(1,))
        with pytest.raises(InvalidArgumentError):
            repeat_trials(cfg, train_ds, test_ds, 2)

    def test_zero_runs_rejected(self, train_ds, test_ds):
        with pytest.raises(InvalidArgumentError):
            repeat_trials(small_config(), train_ds, test_ds, 0)

    def test_pooled_runs_match_sequential(self, train_ds, test_ds):
        seq = repeat_trials(small_config(threads=1), train_ds, test_ds, 2)
        pooled = repeat_trials(small_config(threads=4), train_ds, test_ds, 2)
        assert [m.accuracy for m in pooled.runs] \
            == [m.accuracy for m in seq.runs]
        assert pooled.accuracy_mean == seq.accuracy_mean


class TestDSweep:
    def test_basic_sweep(self, train_ds):
        result = crossval_d_sweep(small_config(), train_ds, [2, 5, 8], 3)
        assert [r.d for r in result.rows] == [2, 5, 8]
        for row in result.rows:
            assert 0.0 <= row.accuracy <= 1.0
            assert row.seconds >= 0.0
        assert max(r.accuracy for r in result.rows) >= 0.95
        joined = np.sort(np.concatenate(result.folds))
        assert np.array_equal(joined, np.arange(len(train_ds)))

    def test_folds_shared_and_deterministic(self, train_ds):
        a = crossval_d_sweep(small_config(), train_ds, [2, 5], 3)
        b = crossval_d_sweep(small_config(), train_ds, [5], 3)
        for fa, fb in zip(a.folds, b.folds):
            assert np.array_equal(fa, fb)

    def test_slicing_matches_direct_fit(self, train_ds):
        # accuracy at d must not depend on the other d values in the sweep
        both = crossval_d_sweep(small_config(), train_ds, [3, 6], 3)
        alone = crossval_d_sweep(small_config(), train_ds, [3], 3)
        assert both.rows[0].accuracy == alone.rows[0].accuracy

    def test_bidirectional_sweep_runs(self, train_ds):
        cfg = small_config(reservoir=replace(SMALL, bidirectional=True), d=4)
        result = crossval_d_sweep(cfg, train_ds, [2, 4], 2)
        assert [r.d for r in result.rows] == [2, 4]

    def test_last_state_rejected(self, train_ds):
        cfg = small_config(representation=KIND_LAST_STATE)
        with pytest.raises(InvalidArgumentError):
            crossval_d_sweep(cfg, train_ds, [2], 2)

    def test_bad_arguments(self, train_ds):
        with pytest.raises(InvalidArgumentError):
            crossval_d_sweep(small_config(), train_ds, [2], 1)
        with pytest.raises(InvalidArgumentError):
            crossval_d_sweep(small_config(), train_ds, [], 2)
        with pytest.raises(InvalidArgumentError):
            crossval_d_sweep(small_config(), train_ds, [0], 2)
        with pytest.raises(InvalidArgumentError):
            crossval_d_sweep(small_config(), train_ds, [31], 2)


class TestConfigValidation:
    @pytest.mark.parametrize("kwargs", [
        {"d": 31},
        {"d": 0},
        {"representation": "mean-state"},
        {"readout": "tree"},
        {"model_lam": 0.0},
        {"readout_lam": -1.0},
        {"threads": 0},
    ])
    def test_bad_config(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            small_config(**kwargs)

    def test_large_d_allowed_without_dimred(self):
        cfg = small_config(d=31, dimred_enabled=False)
        assert cfg.d == 31


@pytest.fixture(scope="module")
def synth_pair():
    return generate_synthetic(seed=0), generate_synthetic(seed=1)


class TestDefaultSyntheticBaselines:
    # full-size defaults on the canonical synthetic pair: train seed 0,
    # test seed 1, reservoir seed 0

    def test_reservoir_model_solves_the_task(self, synth_pair):
        train, test = synth_pair
        cfg = PipelineConfig(reservoir=ReservoirConfig(seed=0), threads=4)
        metrics, _ = run_pipeline(cfg, train, test)
        assert metrics.accuracy >= 0.95

    def test_last_state_regression_floor(self, synth_pair):
        # measured baseline at seed 0 is 0.55; kept as a regression floor
        # with margin, not a quality target
        train, test = synth_pair
        cfg = PipelineConfig(reservoir=ReservoirConfig(seed=0), threads=4,
                             representation=KIND_LAST_STATE)
        metrics, _ = run_pipeline(cfg, train, test)
        assert metrics.accuracy >= 0.5
