"""Prognostic quality of an indicator trajectory.

Three objectives, all in minimisation orientation:

* ``rul_mse``          mean squared error of the surrogate's normalised RUL
* ``neg_monotonicity`` minus the geometric mean of |Spearman(feature, time)|
* ``smoothness_mad``   geometric mean over features of the median absolute
                       deviation of first differences (jitter; smaller is smoother)
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bearing import LDK_UER204, BearingParameters
from .masks import ReceptiveFieldParams
from .pipeline import IndicatorTrajectory, build_fault_masks, record_spectra, trajectory_from_spectra
from .regressor import RegressorConfig, fit_bagging, resubstitution_loss, training_rows
from .signals import RunToFailureRecord


class MetricError(ValueError):
    pass


def rankdata(x) -> np.ndarray:
    """1-based ranks, ties receive the mean of the ranks they span."""
    x = np.asarray(x, dtype=float)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ranks = np.empty(x.size)
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], x.size]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = 0.5 * (s + e - 1) + 1.0
    return ranks


def spearman(x, t=None) -> float:
    """Rank correlation of ``x`` with ``t`` (default: position in the series).

    A constant series has no trend and scores 0.
    """
    x = np.asarray(x, dtype=float)
    t = np.arange(x.size, dtype=float) if t is None else np.asarray(t, dtype=float)
    if x.shape != t.shape or x.ndim != 1:
        raise MetricError("series must be 1-D and of equal length")
    if x.size < 2:
        raise MetricError("spearman needs at least 2 points")
    rx = rankdata(x) - (x.size + 1) / 2.0
    rt = rankdata(t) - (x.size + 1) / 2.0
    denom = np.sqrt(np.dot(rx, rx) * np.dot(rt, rt))
    if denom == 0:
        return 0.0
    return float(np.clip(np.dot(rx, rt) / denom, -1.0, 1.0))


def _geometric_mean(values) -> float:
    v = np.asarray(values, dtype=float)
    if np.any(v == 0):
        return 0.0
    return float(np.exp(np.mean(np.log(v))))


def _as_columns(trajectory) -> np.ndarray:
    m = trajectory.matrix if isinstance(trajectory, IndicatorTrajectory) else np.asarray(trajectory, dtype=float)
    if m.ndim == 1:
        m = m[:, None]
    return m


def monotonicity(trajectory) -> float:
    m = _as_columns(trajectory)
    if m.shape[0] < 2 or m.shape[1] < 1:
        raise MetricError("monotonicity needs K >= 2 snapshots and F >= 1 features")
    t = np.arange(m.shape[0], dtype=float)
    return _geometric_mean([abs(spearman(m[:, j], t)) for j in range(m.shape[1])])


def smoothness_mad(trajectory) -> float:
    m = _as_columns(trajectory)
    if m.shape[0] < 3:
        raise MetricError("smoothness needs K >= 3 snapshots (two first differences)")
    d = np.diff(m, axis=0)
    mad = np.median(np.abs(d - np.median(d, axis=0)), axis=0)
    return _geometric_mean(mad)


def rul_mse(predicted, observed) -> float:
    p = np.asarray(predicted, dtype=float)
    o = np.asarray(observed, dtype=float)
    if p.shape != o.shape:
        raise MetricError(f"length mismatch: {p.shape} vs {o.shape}")
    if p.size == 0:
        raise MetricError("empty series")
    return float(np.mean((p - o) ** 2))


@dataclass(frozen=True)
class ObjectiveVector:
    rul_mse: float
    neg_monotonicity: float
    smoothness_mad: float

    @property
    def monotonicity(self) -> float:
        return -self.neg_monotonicity

    def as_tuple(self, maximize_smoothness: bool = False) -> tuple:
        """Values handed to the minimiser."""
        s = -self.smoothness_mad if maximize_smoothness else self.smoothness_mad
        return (self.rul_mse, self.neg_monotonicity, s)

    def to_json(self) -> str:
        return json.dumps(
            {"rul_mse": self.rul_mse, "monotonicity": self.monotonicity, "smoothness_mad": self.smoothness_mad}
        )


@dataclass(frozen=True)
class SurrogateConfig:
    regressor: RegressorConfig = RegressorConfig()
    order: int = 0
    expansion: tuple = (2, 2)
    window: str = "rectangular"
    maximize_smoothness: bool = False


class ObjectiveEvaluator:
    """Scores receptive-field parameters on one run.

    Spectra are computed once; each evaluation only rebuilds the masks.
    ``columns`` restricts scoring to a subset of the 8 features (used when
    optimising one fault mode at a time).
    """

    def __init__(
        self,
        record: RunToFailureRecord,
        surrogate: SurrogateConfig = SurrogateConfig(),
        base_params: ReceptiveFieldParams = ReceptiveFieldParams(),
        bearing: BearingParameters = LDK_UER204,
        columns: Optional[Sequence[int]] = None,
    ):
        self.record = record
        self.surrogate = surrogate
        self.base_params = base_params
        self.bearing = bearing
        self.columns = None if columns is None else list(columns)
        self.spectra = record_spectra(record, surrogate.window)
        self.indices = [s.snapshot_index for s in record.snapshots]
        self.n_samples = record.snapshots[0].sample_count

    def trajectory(self, params: ReceptiveFieldParams) -> IndicatorTrajectory:
        masks = build_fault_masks(
            params, self.record.operating_mode, self.n_samples, self.bearing, *self.surrogate.expansion
        )
        return trajectory_from_spectra(self.spectra, masks, self.indices, self.record.bearing_id)

    def evaluate(self, params: ReceptiveFieldParams, seed: int) -> ObjectiveVector:
        traj = self.trajectory(params)
        cols = traj.matrix if self.columns is None else traj.matrix[:, self.columns]
        reg = self.surrogate.regressor
        X, y = training_rows(traj, self.surrogate.order, reg.stride, self.columns)
        model = fit_bagging(X, y, reg, seed)
        return ObjectiveVector(
            rul_mse=resubstitution_loss(model, X, y),
            neg_monotonicity=-monotonicity(cols),
            smoothness_mad=smoothness_mad(cols),
        )

    def __call__(self, genome, seed: int) -> tuple:
        """Genome (kappa_c, kappa_s, kappa_h) -> minimisation tuple; used by the optimiser."""
        ov = self.evaluate(self.base_params.with_kappas(*genome), seed)
        return ov.as_tuple(self.surrogate.maximize_smoothness)


def objective_vector(
    params: ReceptiveFieldParams,
    record: RunToFailureRecord,
    surrogate: SurrogateConfig = SurrogateConfig(),
    seed: int = 0,
    bearing: BearingParameters = LDK_UER204,
) -> ObjectiveVector:
    return ObjectiveEvaluator(record, surrogate, params, bearing).evaluate(params, seed)
