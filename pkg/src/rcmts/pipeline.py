"""End-to-end classification pipeline and experiment harness.

A pipeline run composes: normalization -> reservoir encoding -> optional
dimensionality reduction -> representation -> readout. Everything is
fitted on the training set only; the fitted transforms are then applied
to the test set. Wall-clock metrics cover the fit and evaluation work,
not file I/O.

Three canonical model names recur in the experiments:

  - lESN: last-state representation.
  - omESN: output-model representation.
  - rmESN: reservoir-model representation.

All three share the reservoir (and, when enabled, the projection) for a
given seed, so comparisons isolate the representation itself.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import dataset as ds_mod
from . import dimred, readout, representation
from .errors import InvalidArgumentError, RcmtsError
from .reservoir import ReservoirConfig, build_reservoir, encode_dataset


@dataclass(frozen=True)
class PipelineConfig:
    """Everything needed to reproduce a pipeline run.

    Attributes:
        reservoir: reservoir hyperparameters (its seed is the run seed).
        dimred_enabled: project states from R to d before representations.
        d: projection dimension, default 75.
        dimred_mode: "per-sample" (default) or "flattened".
        dimred_centered: subtract the fitted mean when projecting.
        representation: "last-state", "output-model", or "reservoir-model".
        model_lam: ridge penalty of the per-sample model fits, default 5.0.
        readout: "ridge" or "mlp".
        readout_lam: ridge readout penalty, default 1.0.
        mlp: deep readout hyperparameters when readout == "mlp".
        seeds: explicit seed list for repeated trials (optional).
        threads: worker threads for the parallel stages.
    """

    reservoir: ReservoirConfig = field(default_factory=ReservoirConfig)
    dimred_enabled: bool = True
    d: int = 75
    dimred_mode: str = dimred.MODE_PER_SAMPLE
    dimred_centered: bool = False
    representation: str = representation.KIND_RESERVOIR_MODEL
    model_lam: float = 5.0
    readout: str = "ridge"
    readout_lam: float = 1.0
    mlp: readout.MlpConfig = None
    seeds: tuple = ()
    threads: int = 1

    def __post_init__(self):
        if self.dimred_enabled and self.d > self.reservoir.units:
            raise InvalidArgumentError(
                f"d={self.d} exceeds reservoir units {self.reservoir.units}")
        if self.dimred_enabled and self.d < 1:
            raise InvalidArgumentError("d must be >= 1")
        if self.representation not in (
                representation.KIND_LAST_STATE,
                representation.KIND_OUTPUT_MODEL,
                representation.KIND_RESERVOIR_MODEL):
            raise InvalidArgumentError(
                f"unknown representation {self.representation!r}")
        if self.readout not in ("ridge", "mlp"):
            raise InvalidArgumentError(f"unknown readout {self.readout!r}")
        if self.model_lam <= 0 or self.readout_lam <= 0:
            raise InvalidArgumentError("penalties must be > 0")
        if self.threads < 1:
            raise InvalidArgumentError("threads must be >= 1")


@dataclass(frozen=True)
class Metrics:
    """Scores of one run.

    Attributes:
        accuracy: fraction correct on the evaluated set.
        macro_f1: unweighted mean of per-class F1.
        per_class_f1: (C,) array.
        seconds: wall-clock train+test time, file I/O excluded.
        seed: run seed.
    """

    accuracy: float
    macro_f1: float
    per_class_f1: np.ndarray
    seconds: float
    seed: int


@dataclass(frozen=True)
class FittedPipeline:
    """All fitted stages of a pipeline, ready to score new data."""

    config: PipelineConfig
    stats: ds_mod.ZscoreStats
    reservoir: object
    projection: object  # Projection or None
    readout_model: object
    num_classes: int


def f1_scores(true, pred, num_classes):
    """Per-class F1 with the 0-when-undefined convention."""
    true = np.asarray(true)
    pred = np.asarray(pred)
    out = np.zeros(num_classes)
    for c in range(num_classes):
        tp = np.sum((pred == c) & (true == c))
        fp = np.sum((pred == c) & (true != c))
        fn = np.sum((pred != c) & (true == c))
        denom = 2 * tp + fp + fn
        out[c] = 2 * tp / denom if denom > 0 else 0.0
    return out


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RcmtsError as exc:
        prefix = f"[stage {name}] "
        if exc.args and isinstance(exc.args[0], str) \
                and not exc.args[0].startswith("[stage "):
            exc.args = (prefix + exc.args[0],) + exc.args[1:]
        raise


def _represent(config, states, inputs):
    kind = config.representation
    bidir = config.reservoir.bidirectional
    if kind == representation.KIND_LAST_STATE:
        return representation.last_state(states, bidirectional=bidir)
    if kind == representation.KIND_OUTPUT_MODEL:
        return representation.output_model(
            states, inputs, config.model_lam, threads=config.threads,
            bidirectional=bidir)
    if bidir:
        return representation.reservoir_model_bidirectional(
            states, config.model_lam, threads=config.threads)
    return representation.reservoir_model(
        states, config.model_lam, threads=config.threads)


def _fit_readout(config, reps, labels, num_classes):
    if config.readout == "ridge":
        return readout.fit_ridge_classifier(
            reps, labels, lam=config.readout_lam, num_classes=num_classes)
    mlp_cfg = config.mlp or readout.MlpConfig(seed=config.reservoir.seed)
    return readout.fit_mlp(reps, labels, mlp_cfg, num_classes=num_classes)


def _predict_readout(model, reps):
    if isinstance(model, readout.RidgeModel):
        return readout.predict_ridge(model, reps)
    return readout.predict_mlp(model, reps)


def fit_pipeline(config, train):
    """Fit every stage on the training set only."""
    stats = _stage("normalize", ds_mod.zscore_fit, train)
    train_n = _stage("normalize", ds_mod.zscore_apply, train, stats)
    res = _stage("reservoir", build_reservoir, config.reservoir,
                 train.feature_dim)
    states = _stage("encode", encode_dataset, res, train_n,
                    threads=config.threads)
    proj = None
    if config.dimred_enabled:
        # d counts components per direction, so bidirectional tensors
        # (feature dim 2R) are reduced to 2d to keep the representation
        # size formulas in D.
        proj_dim = 2 * config.d if config.reservoir.bidirectional else config.d
        proj = _stage("dimred", dimred.fit_projection, states, proj_dim,
                      config.dimred_mode)
        states = _stage("dimred", dimred.apply_projection, states, proj,
                        centered=config.dimred_centered)
    reps = _stage("representation", _represent, config, states, train_n)
    model = _stage("readout", _fit_readout, config, reps, train.labels,
                   train.num_classes)
    return FittedPipeline(config=config, stats=stats, reservoir=res,
                          projection=proj, readout_model=model,
                          num_classes=train.num_classes)


def transform_pipeline(fitted, ds):
    """Apply the fitted stages up to the representation."""
    config = fitted.config
    ds_n = _stage("normalize", ds_mod.zscore_apply, ds, fitted.stats)
    states = _stage("encode", encode_dataset, fitted.reservoir, ds_n,
                    threads=config.threads)
    if fitted.projection is not None:
        states = _stage("dimred", dimred.apply_projection, states,
                        fitted.projection, centered=config.dimred_centered)
    return _stage("representation", _represent, config, states, ds_n)


def predict_pipeline(fitted, ds):
    """Predicted class indices for a dataset."""
    reps = transform_pipeline(fitted, ds)
    return _stage("readout", _predict_readout, fitted.readout_model, reps)


def run_pipeline(config, train, test):
    """Fit on train, score on test, return (Metrics, FittedPipeline)."""
    t0 = time.perf_counter()
    fitted = fit_pipeline(config, train)
    pred = predict_pipeline(fitted, test)
    seconds = time.perf_counter() - t0
    per_class = f1_scores(test.labels, pred, test.num_classes)
    metrics = Metrics(
        accuracy=float(np.mean(pred == test.labels)),
        macro_f1=float(per_class.mean()),
        per_class_f1=per_class,
        seconds=seconds,
        seed=config.reservoir.seed,
    )
    return metrics, fitted


@dataclass(frozen=True)
class TrialsResult:
    """Aggregate of repeated independent-seed runs."""

    runs: list
    accuracy_mean: float
    accuracy_std: float
    f1_mean: float
    f1_std: float
    seconds_mean: float
    seconds_std: float


def repeat_trials(config, train, test, n_runs):
    """Run the pipeline under n_runs independent seeds and aggregate.

    Seeds come from config.seeds when given (must cover n_runs), else
    they count up from the reservoir seed. Standard deviations are
    population standard deviations, so a single run reports 0.
    """
    if n_runs < 1:
        raise InvalidArgumentError(f"n_runs must be >= 1, got {n_runs}")
    if config.seeds:
        if len(config.seeds) < n_runs:
            raise InvalidArgumentError(
                f"config lists {len(config.seeds)} seeds, need {n_runs}")
        seeds = list(config.seeds[:n_runs])
    else:
        seeds = [config.reservoir.seed + i for i in range(n_runs)]

    def one(seed):
        cfg = replace(config, reservoir=replace(config.reservoir, seed=seed),
                      threads=1 if config.threads > 1 else config.threads)
        metrics, _ = run_pipeline(cfg, train, test)
        return metrics

    if config.threads > 1 and n_runs > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            runs = list(pool.map(one, seeds))
    else:
        runs = [one(s) for s in seeds]

    acc = np.array([m.accuracy for m in runs])
    f1 = np.array([m.macro_f1 for m in runs])
    sec = np.array([m.seconds for m in runs])
    return TrialsResult(
        runs=runs,
        accuracy_mean=float(acc.mean()), accuracy_std=float(acc.std()),
        f1_mean=float(f1.mean()), f1_std=float(f1.std()),
        seconds_mean=float(sec.mean()), seconds_std=float(sec.std()),
    )


@dataclass(frozen=True)
class DSweepRow:
    d: int
    accuracy: float
    seconds: float


@dataclass(frozen=True)
class DSweepResult:
    rows: list
    folds: list  # index arrays, identical for every d value


def crossval_d_sweep(config, ds, d_values, k):
    """K-fold CV accuracy and wall time per projection dimension.

    The fold partition is fixed once from the config seed and shared by
    every d. Within a fold, the states and the covariance spectrum do not
    depend on d, so they are computed once to max(d_values) and sliced;
    the reported time per d covers the d-dependent work (projection,
    representation fits, readout train and test).
    """
    if k < 2:
        raise InvalidArgumentError(f"cross validation needs k >= 2, got {k}")
    d_values = [int(d) for d in d_values]
    if not d_values:
        raise InvalidArgumentError("d_values must be nonempty")
    for d in d_values:
        if not 1 <= d <= config.reservoir.units:
            raise InvalidArgumentError(f"d={d} out of range")
    if config.representation == representation.KIND_LAST_STATE:
        raise InvalidArgumentError(
            "the d sweep varies the projection; last-state does not use it")
    # d counts per-direction components, as in fit_pipeline
    width = 2 if config.reservoir.bidirectional else 1
    d_max = max(d_values)
    folds = ds_mod.kfold_indices(len(ds), k, config.reservoir.seed)

    prepared = []
    for i in range(k):
        test_idx = folds[i]
        train_idx = np.sort(np.concatenate(
            [folds[j] for j in range(k) if j != i]))
        tr = ds_mod.take(ds, train_idx)
        te = ds_mod.take(ds, test_idx)
        stats = ds_mod.zscore_fit(tr)
        tr_n = ds_mod.zscore_apply(tr, stats)
        te_n = ds_mod.zscore_apply(te, stats)
        res = build_reservoir(config.reservoir, ds.feature_dim)
        st_tr = encode_dataset(res, tr_n, threads=config.threads)
        st_te = encode_dataset(res, te_n, threads=config.threads)
        proj = dimred.fit_projection(st_tr, width * d_max, config.dimred_mode)
        prepared.append((tr_n, te_n, st_tr, st_te, proj, tr.labels, te.labels))

    rows = []
    for d in d_values:
        accs = []
        elapsed = 0.0
        for tr_n, te_n, st_tr, st_te, proj, y_tr, y_te in prepared:
            sliced = dimred.Projection(
                matrix=proj.matrix[:, :width * d],
                eigenvalues=proj.eigenvalues[:width * d],
                mode=proj.mode,
                fitted_feature_dim=proj.fitted_feature_dim,
                mean=proj.mean)
            t0 = time.perf_counter()
            red_tr = dimred.apply_projection(st_tr, sliced,
                                             centered=config.dimred_centered)
            red_te = dimred.apply_projection(st_te, sliced,
                                             centered=config.dimred_centered)
            reps_tr = _represent(config, red_tr, tr_n)
            reps_te = _represent(config, red_te, te_n)
            model = _fit_readout(config, reps_tr, y_tr, ds.num_classes)
            pred = _predict_readout(model, reps_te)
            elapsed += time.perf_counter() - t0
            accs.append(float(np.mean(pred == y_te)))
        rows.append(DSweepRow(d=d, accuracy=float(np.mean(accs)),
                              seconds=elapsed))
    return DSweepResult(rows=rows, folds=folds)
