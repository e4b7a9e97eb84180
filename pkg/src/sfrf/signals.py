"""Vibration snapshots in the XJTU-SY layout and their magnitude spectra.

Each snapshot is a CSV with two columns (horizontal, vertical acceleration),
optionally headed ``Horizontal_vibration_signals,Vertical_vibration_signals``.
A run is a directory of ``1.csv .. K.csv``, one snapshot per minute.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bearing import OperatingMode

log = logging.getLogger(__name__)

XJTU_HEADER = ("Horizontal_vibration_signals", "Vertical_vibration_signals")


class SignalError(ValueError):
    pass


class ParseError(SignalError):
    pass


class EmptyRunError(SignalError):
    pass


@dataclass(frozen=True, eq=False)
class Snapshot:
    horizontal: np.ndarray
    vertical: np.ndarray
    sampling_frequency: float = 25600.0
    snapshot_index: int = 1

    def __post_init__(self):
        if self.horizontal.shape != self.vertical.shape or self.horizontal.ndim != 1:
            raise SignalError("horizontal and vertical channels must be 1-D and of equal length")

    @property
    def sample_count(self) -> int:
        return int(self.horizontal.size)

    @property
    def duration(self) -> float:
        return self.sample_count / self.sampling_frequency

    @property
    def df(self) -> float:
        return self.sampling_frequency / self.sample_count

    def channels(self):
        return (self.horizontal, self.vertical)


@dataclass(frozen=True, eq=False)
class MagnitudeSpectrum:
    frequency_grid: np.ndarray
    magnitudes: np.ndarray

    @property
    def df(self) -> float:
        return float(self.frequency_grid[1] - self.frequency_grid[0])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("frequency_hz", "magnitude"))
            for f, m in zip(self.frequency_grid.tolist(), self.magnitudes.tolist()):
                w.writerow((repr(f), repr(m)))


@dataclass(frozen=True, eq=False)
class RunToFailureRecord:
    bearing_id: str
    snapshots: tuple
    operating_mode: OperatingMode
    warnings: tuple = field(default=())

    def __len__(self):
        return len(self.snapshots)


def load_snapshot(path, sampling_frequency: float = 25600.0, snapshot_index: int | None = None) -> Snapshot:
    path = Path(path)
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, found {len(row)}")
            try:
                h = float(row[0])
            except ValueError:
                h = None
            try:
                v = float(row[1])
            except ValueError:
                v = None
            if h is None or v is None:
                if not rows and h is None and v is None:
                    continue  # header line
                col = 1 if h is None else 2
                raise ParseError(f"{path}:{lineno}: column {col} is not numeric: {row[col - 1]!r}")
            rows.append((h, v))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    if len(rows) < 2:
        raise ParseError(f"{path}: window too short ({len(rows)} sample)")
    data = np.array(rows, dtype=float)
    if snapshot_index is None:
        snapshot_index = int(path.stem) if path.stem.isdigit() else 1
    return Snapshot(data[:, 0].copy(), data[:, 1].copy(), float(sampling_frequency), snapshot_index)


def save_snapshot(snapshot: Snapshot, path) -> None:
    """Write an XJTU-SY style CSV; values use shortest round-trip formatting."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(XJTU_HEADER) + "\n")
        fh.writelines(f"{h!r},{v!r}\n" for h, v in zip(snapshot.horizontal.tolist(), snapshot.vertical.tolist()))


def magnitude_spectrum(channel, sampling_frequency: float, window: str = "rectangular") -> MagnitudeSpectrum:
    """One-sided amplitude spectrum: a sinusoid of amplitude a reads as a at its bin."""
    x = np.asarray(channel, dtype=float)
    n = x.size
    if n < 2:
        raise SignalError(f"need at least 2 samples, got {n}")
    if window == "hann":
        w = np.hanning(n)
        x = x * w
        scale = 1.0 / w.sum()
    elif window == "rectangular":
        scale = 1.0 / n
    else:
        raise ValueError(f"unknown window {window!r}")
    mags = np.abs(np.fft.rfft(x)) * scale
    if n % 2 == 0:
        mags[1:-1] *= 2.0
    else:
        mags[1:] *= 2.0
    return MagnitudeSpectrum(np.fft.rfftfreq(n, d=1.0 / sampling_frequency), mags)


_NUMERIC_CSV = re.compile(r"^(\d+)\.csv$")


def load_run(directory, operating_mode: OperatingMode, bearing_id: str | None = None) -> RunToFailureRecord:
    directory = Path(directory)
    if not directory.is_dir():
        raise EmptyRunError(f"{directory} is not a directory")
    indexed = []
    for p in directory.iterdir():
        m = _NUMERIC_CSV.match(p.name)
        if m:
            indexed.append((int(m.group(1)), p))
    if not indexed:
        raise EmptyRunError(f"{directory} contains no <k>.csv snapshots")
    indexed.sort()
    warnings = []
    for (a, _), (b, _) in zip(indexed, indexed[1:]):
        if b != a + 1:
            msg = f"gap in snapshot indices: {a} -> {b}"
            log.warning("%s: %s", directory, msg)
            warnings.append(msg)
    snaps = tuple(load_snapshot(p, operating_mode.sampling_frequency, k) for k, p in indexed)
    return RunToFailureRecord(bearing_id or directory.name, snaps, operating_mode, tuple(warnings))
