"""Reservoir computing toolkit for multivariate time series classification.

The package builds fixed random recurrent encoders, compresses the
resulting state tensors, derives unsupervised sequence representations,
and classifies them with ridge or feedforward readouts. See the README
for a walkthrough and the ``rcmts`` command line entry point.
"""

from .dataset import (
    Dataset,
    Mts,
    ZscoreStats,
    convert_ts,
    convert_wide_table,
    generate_synthetic,
    kfold_indices,
    load_dataset,
    save_dataset,
    split,
    take,
    zero_pad,
    zscore_apply,
    zscore_fit,
    zscore_invert,
)
from .dimred import (
    MODE_FLATTENED,
    MODE_PER_SAMPLE,
    Projection,
    apply_projection,
    fit_projection,
    flattened_covariance,
    sample_covariance,
)
from .errors import (
    ConvergenceError,
    DegenerateReservoirError,
    DivergenceError,
    InvalidArgumentError,
    InvalidInputError,
    InvalidLabelError,
    NumericalError,
    ParseError,
    RcmtsError,
    SampleTooShortError,
    SingularityError,
)
from .linalg import EigResult, ridge_solve, spectral_radius, sym_eig_top_d
from .pipeline import (
    DSweepResult,
    DSweepRow,
    FittedPipeline,
    Metrics,
    PipelineConfig,
    TrialsResult,
    crossval_d_sweep,
    f1_scores,
    fit_pipeline,
    predict_pipeline,
    repeat_trials,
    run_pipeline,
    transform_pipeline,
)
from .readout import (
    ACT_MAXOUT,
    ACT_RELU,
    MlpConfig,
    MlpReadout,
    RidgeModel,
    fit_mlp,
    fit_ridge_classifier,
    mlp_loss_and_grads,
    mlp_scores,
    predict_mlp,
    predict_ridge,
    ridge_scores,
)
from .representation import (
    KIND_LAST_STATE,
    KIND_OUTPUT_MODEL,
    KIND_RESERVOIR_MODEL,
    Representation,
    last_state,
    output_model,
    reservoir_model,
    reservoir_model_bidirectional,
)
from .reservoir import (
    Reservoir,
    ReservoirConfig,
    StateTensor,
    build_reservoir,
    encode_dataset,
    run_states,
    run_states_bidirectional,
)
from .serialize import from_bytes, load_model, save_model, to_bytes

__version__ = "0.1.0"

__all__ = [
    "ACT_MAXOUT",
    "ACT_RELU",
    "ConvergenceError",
    "DSweepResult",
    "DSweepRow",
    "Dataset",
    "DegenerateReservoirError",
    "DivergenceError",
    "EigResult",
    "FittedPipeline",
    "InvalidArgumentError",
    "InvalidInputError",
    "InvalidLabelError",
    "KIND_LAST_STATE",
    "KIND_OUTPUT_MODEL",
    "KIND_RESERVOIR_MODEL",
    "MODE_FLATTENED",
    "MODE_PER_SAMPLE",
    "Metrics",
    "MlpConfig",
    "MlpReadout",
    "Mts",
    "NumericalError",
    "ParseError",
    "PipelineConfig",
    "Projection",
    "RcmtsError",
    "Representation",
    "Reservoir",
    "ReservoirConfig",
    "RidgeModel",
    "SampleTooShortError",
    "SingularityError",
    "StateTensor",
    "TrialsResult",
    "ZscoreStats",
    "apply_projection",
    "build_reservoir",
    "convert_ts",
    "convert_wide_table",
    "crossval_d_sweep",
    "encode_dataset",
    "f1_scores",
    "fit_mlp",
    "fit_pipeline",
    "fit_projection",
    "fit_ridge_classifier",
    "flattened_covariance",
    "from_bytes",
    "generate_synthetic",
    "kfold_indices",
    "last_state",
    "load_dataset",
    "load_model",
    "mlp_loss_and_grads",
    "mlp_scores",
    "output_model",
    "predict_mlp",
    "predict_pipeline",
    "predict_ridge",
    "repeat_trials",
    "reservoir_model",
    "reservoir_model_bidirectional",
    "ridge_scores",
    "ridge_solve",
    "run_pipeline",
    "run_states",
    "run_states_bidirectional",
    "sample_covariance",
    "save_dataset",
    "save_model",
    "spectral_radius",
    "split",
    "sym_eig_top_d",
    "take",
    "to_bytes",
    "transform_pipeline",
    "zero_pad",
    "zscore_apply",
    "zscore_fit",
    "zscore_invert",
]
