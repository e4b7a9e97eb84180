"""Snapshot -> 8 SFRF values -> trajectories and buffered indicators."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bearing import FAULT_MODES, LDK_UER204, BearingParameters, OperatingMode, characteristic_frequencies, fault_frequency_set
from .masks import DoGMask, GridMismatchError, ReceptiveFieldParams, build_dog_mask, dog_responses, frequency_grid
from .signals import RunToFailureRecord, Snapshot, magnitude_spectrum

FEATURE_NAMES = ("h_outer", "h_inner", "h_ball", "h_cage", "v_outer", "v_inner", "v_ball", "v_cage")
N_FEATURES = len(FEATURE_NAMES)
TRAJECTORY_HEADER = ("snapshot",) + FEATURE_NAMES + ("rul_norm",)


class PipelineError(ValueError):
    pass


class EmptyHistoryError(PipelineError):
    pass


@dataclass(frozen=True, eq=False)
class SfrfVector:
    values: np.ndarray
    snapshot_index: int = 1


@dataclass(frozen=True, eq=False)
class BufferedIndicator:
    order: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class IndicatorTrajectory:
    matrix: np.ndarray  # K x 8
    rul_labels: np.ndarray
    snapshot_indices: np.ndarray
    bearing_id: str = ""

    def __len__(self):
        return self.matrix.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_HEADER)
            for idx, row, rul in zip(self.snapshot_indices.tolist(), self.matrix.tolist(), self.rul_labels.tolist()):
                w.writerow([str(idx)] + [repr(v) for v in row] + [repr(rul)])

    @classmethod
    def from_csv(cls, path, bearing_id: str = "") -> "IndicatorTrajectory":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or tuple(h.strip() for h in header) != TRAJECTORY_HEADER:
                raise PipelineError(f"{path}: expected header {','.join(TRAJECTORY_HEADER)}")
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(TRAJECTORY_HEADER):
                    raise PipelineError(f"{path}:{lineno}: expected {len(TRAJECTORY_HEADER)} fields")
                try:
                    rows.append([float(c) for c in row])
                except ValueError as exc:
                    raise PipelineError(f"{path}:{lineno}: {exc}") from None
        if not rows:
            raise PipelineError(f"{path}: no trajectory rows")
        data = np.array(rows)
        return cls(data[:, 1:-1].copy(), data[:, -1].copy(), data[:, 0].astype(int), bearing_id)


def rul_labels(snapshot_indices) -> np.ndarray:
    """Linear remaining life normalised to 1 at the first snapshot and 0 at failure."""
    idx = np.asarray(snapshot_indices, dtype=float)
    span = idx[-1] - idx[0]
    if span == 0:
        return np.zeros(idx.size)
    return (idx[-1] - idx) / span


def build_fault_masks(
    params: ReceptiveFieldParams,
    operating_mode: OperatingMode,
    n_samples: int,
    bearing: BearingParameters = LDK_UER204,
    n_harmonics: int = 2,
    n_sidebands: int = 2,
) -> tuple[DoGMask, ...]:
    """One DoG mask per fault mode (outer, inner, ball, cage) on the snapshot's FFT grid."""
    grid = frequency_grid(operating_mode.sampling_frequency, n_samples)
    cf = characteristic_frequencies(bearing, operating_mode)
    return tuple(
        build_dog_mask(fault_frequency_set(m, cf, operating_mode.shaft_frequency, n_harmonics, n_sidebands), params, grid)
        for m in FAULT_MODES
    )


def _gain_matrix(masks: Sequence[DoGMask]) -> np.ndarray:
    return np.stack([m.signed_gains for m in masks])


def compute_sfrf_vector(snapshot: Snapshot, masks: Sequence[DoGMask], window: str = "rectangular") -> SfrfVector:
    if len(masks) != 4:
        raise PipelineError(f"expected 4 fault-mode masks, got {len(masks)}")
    values = []
    for channel in snapshot.channels():
        spec = magnitude_spectrum(channel, snapshot.sampling_frequency, window)
        for m in masks:
            if m.signed_gains.shape != spec.magnitudes.shape:
                raise GridMismatchError(
                    f"mask has {m.signed_gains.size} bins, snapshot spectrum has {spec.magnitudes.size}"
                )
            values.append(dog_responses(m.signed_gains, spec.magnitudes, m.df))
    return SfrfVector(np.array(values, dtype=float), snapshot.snapshot_index)


def buffered_indicator(prefix: Sequence[SfrfVector], order: int) -> BufferedIndicator:
    """Current vector followed by the ``order`` previous ones, most recent first.

    Missing history at the start of life is filled with the earliest vector.
    """
    if not prefix:
        raise EmptyHistoryError("buffered indicator needs at least one vector")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    k = len(prefix) - 1
    parts = [np.asarray(prefix[max(k - lag, 0)].values, dtype=float) for lag in range(order + 1)]
    return BufferedIndicator(order, np.concatenate(parts))


def buffered_matrix(matrix: np.ndarray, order: int) -> np.ndarray:
    """Row t is ``buffered_indicator(rows[:t+1], order)`` for every t."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape[0] == 0:
        raise EmptyHistoryError("empty trajectory")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    t = np.arange(matrix.shape[0])
    return np.hstack([matrix[np.maximum(t - lag, 0)] for lag in range(order + 1)])


def record_spectra(record: RunToFailureRecord, window: str = "rectangular") -> np.ndarray:
    """Magnitude spectra of every snapshot, shape (K, 2, bins)."""
    if len(record) == 0:
        raise PipelineError("empty record")
    return np.stack(
        [
            [magnitude_spectrum(ch, s.sampling_frequency, window).magnitudes for ch in s.channels()]
            for s in record.snapshots
        ]
    )


def trajectory_from_spectra(
    spectra: np.ndarray, masks: Sequence[DoGMask], snapshot_indices, bearing_id: str = ""
) -> IndicatorTrajectory:
    """Same numbers as :func:`compute_sfrf_vector` per snapshot, from cached spectra."""
    gains = _gain_matrix(masks)
    if gains.shape[1] != spectra.shape[-1]:
        raise GridMismatchError(f"masks have {gains.shape[1]} bins, spectra have {spectra.shape[-1]}")
    df = masks[0].df
    cols = [dog_responses(g, spectra[:, c, :], df) for c in range(2) for g in gains]
    idx = np.asarray(snapshot_indices, dtype=int)
    return IndicatorTrajectory(np.column_stack(cols), rul_labels(idx), idx, bearing_id)


def compute_trajectory(
    record: RunToFailureRecord,
    params: ReceptiveFieldParams,
    expansion: tuple[int, int] = (2, 2),
    bearing: BearingParameters = LDK_UER204,
    window: str = "rectangular",
) -> IndicatorTrajectory:
    if len(record) == 0:
        raise PipelineError("empty record")
    n = record.snapshots[0].sample_count
    masks = build_fault_masks(params, record.operating_mode, n, bearing, *expansion)
    rows = [compute_sfrf_vector(s, masks, window).values for s in record.snapshots]
    idx = [s.snapshot_index for s in record.snapshots]
    return IndicatorTrajectory(np.vstack(rows), rul_labels(idx), np.asarray(idx, dtype=int), record.bearing_id)
