"""Edge-energy models: analytic oracles, GPR, and an MLP baseline."""

from .base import (
    EdgeEnergyModel,
    as_batch,
    finite_difference_gradient,
    hessian_at_origin,
)
from .gpr import (
    ConditioningError,
    GprHyperparams,
    GprModel,
    fit_gpr,
    log_marginal_likelihood,
    optimize_hyperparams,
    se_kernel,
    train_gpr,
)
from .mlp import (
    STANDARD_ARCHITECTURES,
    MlpArchitecture,
    MlpModel,
    TrainingDivergedError,
    TrainingHistory,
    init_mlp,
    train_mlp,
)
from .oracle import AnalyticOracle

__all__ = [
    "AnalyticOracle",
    "ConditioningError",
    "EdgeEnergyModel",
    "GprHyperparams",
    "GprModel",
    "MlpArchitecture",
    "MlpModel",
    "STANDARD_ARCHITECTURES",
    "TrainingDivergedError",
    "TrainingHistory",
    "as_batch",
    "finite_difference_gradient",
    "fit_gpr",
    "hessian_at_origin",
    "init_mlp",
    "log_marginal_likelihood",
    "optimize_hyperparams",
    "se_kernel",
    "train_gpr",
    "train_mlp",
]
