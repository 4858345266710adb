from .core import (
    FEATURES,
    LOG_COLUMNS,
    ContactEstimate,
    ContactRadiusEstimator,
    ContactSampleLog,
    ExplorationConfig,
    FrictionEstimator,
    estimate_contact,
    estimate_friction,
    estimate_radius,
    linear_regression,
)
from .exploration import ExplorationResult, exploration_scenario, run_exploration

__all__ = [
    "FEATURES", "LOG_COLUMNS", "ContactEstimate", "ContactRadiusEstimator",
    "ContactSampleLog", "ExplorationConfig", "ExplorationResult", "FrictionEstimator",
    "estimate_contact", "estimate_friction", "estimate_radius", "exploration_scenario",
    "linear_regression", "run_exploration",
]
