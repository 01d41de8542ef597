"""Feed-forward networks with amplifying and attenuating neurons.

Amplifying neurons square their activated value; attenuating neurons map it
through a bounded reciprocal. Both are realized as secondary activation
functions composed onto an ordinary neuron, which raises the functional
order of the network without changing its training algorithm.
"""

from .activations import (
    ActivationKind,
    Amplify,
    Attenuate,
    Identity,
    ParametricSoftplus,
    ReLU,
    SecondaryKind,
    composite_activate,
    primary_activate,
    primary_derivative,
    secondary_activate,
    secondary_derivative,
)
from .datasets import (
    Dataset,
    generate_1d_dataset,
    generate_2d_dataset,
    load_dataset,
    save_dataset,
)
from .evaluation import EvalReport, evaluate, evaluation_grid, extrapolation_gap
from .exceptions import (
    AllRunsDivergedError,
    ConfigError,
    DataValidationError,
    DomainError,
    NonFinitePropagationError,
    TrainingDivergedError,
)
from .experiments import (
    NetworkPreset,
    ReproRow,
    ordering_outcomes,
    preset,
    reproduce_table,
    table_presets,
)
from .model_io import ModelFile, load_model, save_model
from .network import (
    ForwardTrace,
    Gradient,
    LayerSpec,
    Network,
    NetworkConfig,
    NeuronRole,
    backward,
    build_multiplier_network,
    build_network,
    forward,
    forward_with_trace,
    predict_batch,
)
from .targets import (
    TARGET_1D,
    TARGET_ACKLEY,
    TargetFunction,
    target_1d,
    target_ackley,
    target_by_name,
)
from .training import (
    AdamState,
    RunFailure,
    RunResult,
    TrainingConfig,
    adam_step,
    best_of_n,
    l2_penalty,
    mse_loss,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationKind",
    "AdamState",
    "AllRunsDivergedError",
    "Amplify",
    "Attenuate",
    "ConfigError",
    "DataValidationError",
    "Dataset",
    "DomainError",
    "EvalReport",
    "ForwardTrace",
    "Gradient",
    "Identity",
    "LayerSpec",
    "ModelFile",
    "Network",
    "NetworkConfig",
    "NetworkPreset",
    "NeuronRole",
    "NonFinitePropagationError",
    "ParametricSoftplus",
    "ReLU",
    "ReproRow",
    "RunFailure",
    "RunResult",
    "SecondaryKind",
    "TARGET_1D",
    "TARGET_ACKLEY",
    "TargetFunction",
    "TrainingConfig",
    "TrainingDivergedError",
    "adam_step",
    "backward",
    "best_of_n",
    "build_multiplier_network",
    "build_network",
    "composite_activate",
    "evaluate",
    "evaluation_grid",
    "extrapolation_gap",
    "forward",
    "forward_with_trace",
    "generate_1d_dataset",
    "generate_2d_dataset",
    "l2_penalty",
    "load_dataset",
    "load_model",
    "mse_loss",
    "ordering_outcomes",
    "predict_batch",
    "preset",
    "primary_activate",
    "primary_derivative",
    "reproduce_table",
    "save_dataset",
    "save_model",
    "secondary_activate",
    "secondary_derivative",
    "table_presets",
    "target_1d",
    "target_ackley",
    "target_by_name",
    "train",
]
