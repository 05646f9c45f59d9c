"""Command line interface.

Subcommands: synth, convert, fit, eval, trials, dsweep, repr. Exit codes:
0 on success, 2 for parse/config/input problems, 3 for numerical errors.
Tables are CSV with a header row and 6 significant digits.
"""

import argparse
import sys

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python 3.10
    import tomli as tomllib

from . import dataset as ds_mod
from . import pipeline as pl
from . import serialize
from .errors import NumericalError, ParseError, RcmtsError
from .readout import MlpConfig
from .reservoir import ReservoirConfig

_REPRESENTATION_ALIASES = {
    "last-state": "last-state",
    "output-model": "output-model",
    "reservoir-model": "reservoir-model",
    "lesn": "last-state",
    "omesn": "output-model",
    "rmesn": "reservoir-model",
}


def _fmt(v):
    """6 significant digits for CSV cells."""
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _pop(table, key, default):
    return table.pop(key, default)


def _require_empty(table, context):
    if table:
        raise ParseError(f"unknown {context} keys: {sorted(table)}")


def load_config(path=None, seed=None, threads=None):
    """Build a PipelineConfig from a TOML file plus CLI overrides.

    Every key is optional; omitted keys fall back to the benchmark
    defaults. Unknown keys are rejected so typos do not silently
    reconfigure a run.
    """
    raw = {}
    if path is not None:
        with open(path, "rb") as fh:
            try:
                raw = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ParseError(f"bad config file: {exc}")

    res_t = dict(raw.pop("reservoir", {}))
    res = ReservoirConfig(
        units=_pop(res_t, "units", 800),
        rho=_pop(res_t, "rho", 0.99),
        connectivity=_pop(res_t, "connectivity", 0.25),
        input_scaling=_pop(res_t, "input_scaling", 0.15),
        noise=_pop(res_t, "noise", 0.01),
        seed=_pop(res_t, "seed", 0),
        bidirectional=_pop(res_t, "bidirectional", False),
    )
    _require_empty(res_t, "reservoir")

    dim_t = dict(raw.pop("dimred", {}))
    dim_enabled = _pop(dim_t, "enabled", True)
    dim_d = _pop(dim_t, "d", 75)
    dim_mode = _pop(dim_t, "mode", "per-sample")
    dim_centered = _pop(dim_t, "centered", False)
    _require_empty(dim_t, "dimred")

    rep_t = dict(raw.pop("representation", {}))
    rep_kind = str(_pop(rep_t, "kind", "reservoir-model")).lower()
    model_lam = _pop(rep_t, "model_lambda", 5.0)
    _require_empty(rep_t, "representation")
    if rep_kind not in _REPRESENTATION_ALIASES:
        raise ParseError(f"unknown representation kind {rep_kind!r}")
    rep_kind = _REPRESENTATION_ALIASES[rep_kind]

    ro_t = dict(raw.pop("readout", {}))
    mlp_t = dict(ro_t.pop("mlp", {}))
    ro_kind = _pop(ro_t, "kind", "ridge")
    ro_lam = _pop(ro_t, "lambda", 1.0)
    _require_empty(ro_t, "readout")
    mlp = None
    if ro_kind == "mlp" or mlp_t:
        mlp = MlpConfig(
            hidden=tuple(_pop(mlp_t, "hidden", (20, 20, 20))),
            activation=_pop(mlp_t, "activation", "relu"),
            maxout_k=_pop(mlp_t, "maxout_k", 2),
            p_drop=_pop(mlp_t, "p_drop", 0.1),
            l2=_pop(mlp_t, "l2", 0.001),
            epochs=_pop(mlp_t, "epochs", 5000),
            step=_pop(mlp_t, "step", 1e-3),
            seed=_pop(mlp_t, "seed", res.seed),
            batch_size=_pop(mlp_t, "batch_size", None),
        )
        _require_empty(mlp_t, "readout.mlp")

    run_t = dict(raw.pop("run", {}))
    seeds = tuple(_pop(run_t, "seeds", ()))
    cfg_threads = _pop(run_t, "threads", 1)
    _require_empty(run_t, "run")
    _require_empty(raw, "config")

    if seed is not None:
        res = ReservoirConfig(units=res.units, rho=res.rho,
                              connectivity=res.connectivity,
                              input_scaling=res.input_scaling,
                              noise=res.noise, seed=seed,
                              bidirectional=res.bidirectional)
    if threads is not None:
        cfg_threads = threads
    return pl.PipelineConfig(
        reservoir=res, dimred_enabled=dim_enabled, d=dim_d,
        dimred_mode=dim_mode, dimred_centered=dim_centered,
        representation=rep_kind, model_lam=model_lam, readout=ro_kind,
        readout_lam=ro_lam, mlp=mlp, seeds=seeds, threads=cfg_threads)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_synth(args):
    ds = ds_mod.generate_synthetic(
        classes=args.classes, per_class=args.per_class, t=args.steps,
        f=args.features, noise=args.noise, seed=args.seed)
    ds_mod.save_dataset(ds, args.out)
    return 0


def _cmd_convert(args):
    if args.format == "ts":
        if len(args.out) != len(args.inputs):
            raise ParseError(
                f"{len(args.inputs)} inputs need {len(args.inputs)} --out "
                f"paths, got {len(args.out)}")
        datasets = ds_mod.convert_ts(args.inputs)
        for ds, out in zip(datasets, args.out):
            ds_mod.save_dataset(ds, out)
        return 0
    # wide table, one file in, one file out
    if len(args.inputs) != 1 or len(args.out) != 1:
        raise ParseError("wide format converts exactly one input to one --out")
    if args.steps is None or args.features is None:
        raise ParseError("wide format needs --steps and --features")
    ds = ds_mod.convert_wide_table(
        args.inputs[0], steps=args.steps, features=args.features,
        delimiter=args.delimiter, layout=args.layout,
        has_header=not args.no_header)
    ds_mod.save_dataset(ds, args.out[0])
    return 0


def _cmd_fit(args):
    config = load_config(args.config, seed=args.seed, threads=args.threads)
    train = ds_mod.load_dataset(args.train)
    fitted = pl.fit_pipeline(config, train)
    serialize.save_model(fitted, args.out)
    return 0


def _metrics_rows(metrics):
    header = ["accuracy", "macro_f1"]
    row = [metrics.accuracy, metrics.macro_f1]
    for i, v in enumerate(metrics.per_class_f1):
        header.append(f"f1_class{i}")
        row.append(float(v))
    header += ["seconds", "seed"]
    row += [metrics.seconds, metrics.seed]
    return header, row


def _cmd_eval(args):
    import time
    fitted = serialize.load_model(args.model)
    test = ds_mod.load_dataset(args.test)
    t0 = time.perf_counter()
    pred = pl.predict_pipeline(fitted, test)
    seconds = time.perf_counter() - t0
    per_class = pl.f1_scores(test.labels, pred, test.num_classes)
    metrics = pl.Metrics(
        accuracy=float(np.mean(pred == test.labels)),
        macro_f1=float(per_class.mean()), per_class_f1=per_class,
        seconds=seconds, seed=fitted.config.reservoir.seed)
    header, row = _metrics_rows(metrics)
    _write_csv(args.out, header, [row])
    return 0


def _cmd_trials(args):
    config = load_config(args.config, seed=args.seed, threads=args.threads)
    train = ds_mod.load_dataset(args.train)
    test = ds_mod.load_dataset(args.test)
    result = pl.repeat_trials(config, train, test, args.runs)
    rows = [
        ["accuracy", result.accuracy_mean, result.accuracy_std],
        ["macro_f1", result.f1_mean, result.f1_std],
        ["seconds", result.seconds_mean, result.seconds_std],
    ]
    _write_csv(args.out, ["metric", "mean", "std"], rows)
    return 0


def _cmd_dsweep(args):
    config = load_config(args.config, seed=args.seed, threads=args.threads)
    ds = ds_mod.load_dataset(args.data)
    d_values = [int(v) for v in args.d_values.split(",") if v.strip()]
    result = pl.crossval_d_sweep(config, ds, d_values, args.folds)
    rows = [[r.d, r.accuracy, r.seconds] for r in result.rows]
    _write_csv(args.out, ["d", "accuracy", "seconds"], rows)
    return 0


def _cmd_repr(args):
    config = load_config(args.config, seed=args.seed, threads=args.threads)
    train = ds_mod.load_dataset(args.train)
    data = ds_mod.load_dataset(args.data) if args.data else train
    fitted = pl.fit_pipeline(config, train)
    reps = pl.transform_pipeline(fitted, data)
    arrays = [row[None, :] for row in reps.vectors]
    out_ds = ds_mod.Dataset.from_arrays(
        arrays, data.labels, num_classes=data.num_classes)
    ds_mod.save_dataset(out_ds, args.out)
    return 0


def _add_common(p, config=True):
    if config:
        p.add_argument("--config", default=None,
                       help="TOML pipeline config file")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads for parallel stages")
    p.add_argument("--seed", type=int, default=None, help="run seed")
    p.add_argument("--out", default=None, help="output path")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rcmts",
        description="Reservoir-based MTS classification toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="emit a synthetic dataset file")
    p.add_argument("--classes", type=int, default=2)
    p.add_argument("--per-class", type=int, default=50)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--features", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("convert", help="convert external exports to the "
                                       "native dataset format")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--format", choices=["ts", "wide"], required=True)
    p.add_argument("--out", action="append", required=True,
                   help="one output path per input (repeatable)")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--features", type=int, default=None)
    p.add_argument("--layout", choices=["interleaved", "blocked"],
                   default="interleaved")
    p.add_argument("--delimiter", default=None)
    p.add_argument("--no-header", action="store_true")
    p.set_defaults(fn=_cmd_convert)

    p = sub.add_parser("fit", help="train a pipeline, save the model")
    p.add_argument("--train", required=True)
    _add_common(p)
    p.set_defaults(fn=_cmd_fit)
    p._actions[[a.dest for a in p._actions].index("out")].required = True

    p = sub.add_parser("eval", help="score a saved model on a test file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("trials", help="repeated independent-seed runs")
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--runs", type=int, default=10)
    _add_common(p)
    p.set_defaults(fn=_cmd_trials)

    p = sub.add_parser("dsweep", help="cross-validated projection size sweep")
    p.add_argument("--data", required=True)
    p.add_argument("--d-values", default="10,25,50,75,100,150")
    p.add_argument("--folds", type=int, default=5)
    _add_common(p)
    p.set_defaults(fn=_cmd_dsweep)

    p = sub.add_parser("repr", help="export the representation matrix")
    p.add_argument("--train", required=True)
    p.add_argument("--data", default=None,
                   help="dataset to transform (default: the train file)")
    _add_common(p)
    p._actions[[a.dest for a in p._actions].index("out")].required = True
    p.set_defaults(fn=_cmd_repr)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except RcmtsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
