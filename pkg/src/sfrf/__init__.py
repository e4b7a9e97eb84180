"""Spectral fault receptive fields for bearing condition monitoring and RUL prognosis."""

from .bearing import (
    LDK_UER204,
    BearingParameters,
    CharacteristicFrequencies,
    FaultMode,
    OperatingMode,
    characteristic_frequencies,
    fault_frequency_set,
)
from .masks import ReceptiveFieldParams, build_dog_mask, dog_response, gaussian_mask, receptive_field_gain
from .metrics import ObjectiveVector, monotonicity, objective_vector, rul_mse, smoothness_mad, spearman
from .pipeline import IndicatorTrajectory, buffered_indicator, compute_sfrf_vector, compute_trajectory
from .regressor import BaggingEnsemble, RegressorConfig, fit_bagging, fit_tree, order_sweep, resubstitution_loss
from .signals import RunToFailureRecord, Snapshot, load_run, load_snapshot, magnitude_spectrum

__version__ = "0.1.0"
