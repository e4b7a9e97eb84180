"""Gaussian spectral masks and difference-of-Gaussians receptive fields.

A mask is a gain in [0, 1] sampled on the one-sided FFT grid. Several masks
combine by pointwise maximum. A receptive field for one fault mode is the
narrow "center" mask minus ``inhibition_factor`` times the wide "surround"
mask, both anchored on the same set of fault frequencies.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class MaskError(ValueError):
    pass


class DegenerateBandError(MaskError):
    pass


class EmptyDisjunctionError(MaskError):
    pass


class GridMismatchError(MaskError):
    pass


SIGMA_RULE_BOUNDS = (1.0 / 9.0, 9.0)


@dataclass(frozen=True)
class FrequencyBand:
    f_min: float
    f_max: float

    def __post_init__(self):
        if self.f_min < 0:
            raise DegenerateBandError(f"f_min must be >= 0, got {self.f_min}")
        if not self.f_max > self.f_min:
            raise DegenerateBandError(f"band [{self.f_min}, {self.f_max}] has no width")

    @property
    def center(self) -> float:
        return 0.5 * (self.f_min + self.f_max)

    def sigma(self, sigma_rule: float) -> float:
        return (self.f_max - self.f_min) / (2.0 * sigma_rule)


@dataclass(frozen=True)
class ReceptiveFieldParams:
    """Shape of a center-surround receptive field.

    Defaults are the hand-picked values for the XJTU-SY data: a 4 Hz center,
    a 12 Hz surround, both two sigmas to the band edge, surround weighted 1/3.
    """

    center_bandwidth: float = 4.0
    surround_bandwidth: float = 12.0
    sigma_rule_center: float = 2.0
    sigma_rule_surround: float = 2.0
    inhibition_factor: float = 1.0 / 3.0

    def __post_init__(self):
        if not self.center_bandwidth > 0 or not self.surround_bandwidth > 0:
            raise MaskError("bandwidths must be > 0")
        lo, hi = SIGMA_RULE_BOUNDS
        for name in ("sigma_rule_center", "sigma_rule_surround"):
            v = getattr(self, name)
            # small slack so that bounds written as decimals still validate
            if not (lo - 1e-12 <= v <= hi + 1e-12):
                raise MaskError(f"{name}={v} outside [{lo}, {hi}]")
        if not 0.0 <= self.inhibition_factor <= 1.0:
            raise MaskError(f"inhibition_factor={self.inhibition_factor} outside [0, 1]")

    def with_kappas(self, kappa_c: float, kappa_s: float, kappa_h: float) -> "ReceptiveFieldParams":
        return ReceptiveFieldParams(
            self.center_bandwidth, self.surround_bandwidth, float(kappa_c), float(kappa_s), float(kappa_h)
        )

    @property
    def kappas(self) -> tuple[float, float, float]:
        return (self.sigma_rule_center, self.sigma_rule_surround, self.inhibition_factor)


def frequency_grid(sampling_frequency: float, n_samples: int) -> np.ndarray:
    """One-sided FFT bin frequencies k*fs/N, k = 0..N//2."""
    return np.fft.rfftfreq(int(n_samples), d=1.0 / sampling_frequency)


def _spacing(grid: np.ndarray) -> float:
    if grid.size < 2:
        raise GridMismatchError("frequency grid needs at least two bins")
    return float(grid[1] - grid[0])


@dataclass(frozen=True, eq=False)
class SpectralMask:
    frequency_grid: np.ndarray
    gains: np.ndarray

    @property
    def df(self) -> float:
        return _spacing(self.frequency_grid)

    def to_csv(self, path) -> None:
        _write_two_columns(path, ("frequency_hz", "gain"), self.frequency_grid, self.gains)


@dataclass(frozen=True, eq=False)
class DoGMask:
    frequency_grid: np.ndarray
    signed_gains: np.ndarray
    center: SpectralMask
    surround: SpectralMask
    inhibition_factor: float

    @property
    def df(self) -> float:
        return _spacing(self.frequency_grid)

    def to_csv(self, path) -> None:
        _write_two_columns(path, ("frequency_hz", "gain"), self.frequency_grid, self.signed_gains)


def _write_two_columns(path, header, xs, ys) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for x, y in zip(xs.tolist(), ys.tolist()):
            w.writerow((repr(x), repr(y)))


def gaussian_mask(band: FrequencyBand, sigma_rule: float, grid: np.ndarray) -> SpectralMask:
    """Gaussian gain centred on the band, ``sigma_rule`` sigmas to each edge."""
    if not sigma_rule > 0:
        raise MaskError(f"sigma_rule must be > 0, got {sigma_rule}")
    grid = np.asarray(grid, dtype=float)
    z = (grid - band.center) / band.sigma(sigma_rule)
    return SpectralMask(grid, np.exp(-0.5 * z * z))


def disjunction(masks: Sequence[SpectralMask]) -> SpectralMask:
    """Pointwise maximum of masks sharing one grid."""
    masks = list(masks)
    if not masks:
        raise EmptyDisjunctionError("disjunction of an empty set of masks")
    grid = masks[0].frequency_grid
    for m in masks[1:]:
        if m.frequency_grid.shape != grid.shape or not np.array_equal(m.frequency_grid, grid):
            raise GridMismatchError("masks are defined on different frequency grids")
    if len(masks) == 1:
        return masks[0]
    return SpectralMask(grid, np.maximum.reduce([m.gains for m in masks]))


def receptive_field_gain(
    frequencies: Sequence[float], bandwidth: float, sigma_rule: float, grid: np.ndarray
) -> SpectralMask:
    """Disjunction of Gaussian masks over bands of width ``bandwidth`` around each frequency.

    Bands are clipped to the grid's [0, f_max]; bands lying entirely outside
    are dropped.
    """
    if not bandwidth > 0:
        raise MaskError(f"bandwidth must be > 0, got {bandwidth}")
    grid = np.asarray(grid, dtype=float)
    lo_edge, hi_edge = 0.0, float(grid[-1])
    masks = []
    for f in frequencies:
        lo = max(f - bandwidth / 2.0, lo_edge)
        hi = min(f + bandwidth / 2.0, hi_edge)
        if hi <= lo:
            continue
        masks.append(gaussian_mask(FrequencyBand(lo, hi), sigma_rule, grid))
    if not masks:
        raise EmptyDisjunctionError("every band lies outside the frequency grid")
    return disjunction(masks)


def build_dog_mask(fault_frequencies: Sequence[float], params: ReceptiveFieldParams, grid: np.ndarray) -> DoGMask:
    center = receptive_field_gain(fault_frequencies, params.center_bandwidth, params.sigma_rule_center, grid)
    surround = receptive_field_gain(fault_frequencies, params.surround_bandwidth, params.sigma_rule_surround, grid)
    signed = center.gains - params.inhibition_factor * surround.gains
    return DoGMask(center.frequency_grid, signed, center, surround, params.inhibition_factor)


def dog_responses(signed_gains: np.ndarray, spectra: np.ndarray, df: float) -> np.ndarray:
    """Left Riemann sum of gain * spectrum along the last axis.

    Works row-wise, so one spectrum or a stack of them give bit-identical
    per-row results.
    """
    return (spectra * signed_gains).sum(axis=-1) * df


def dog_response(mask: DoGMask, magnitude_spectrum) -> float:
    """Integrated response to a magnitude spectrum (array or ``MagnitudeSpectrum``)."""
    spectrum = np.asarray(getattr(magnitude_spectrum, "magnitudes", magnitude_spectrum), dtype=float)
    if spectrum.shape != mask.signed_gains.shape:
        raise GridMismatchError(
            f"spectrum has {spectrum.shape[-1] if spectrum.ndim else 0} bins, mask has {mask.signed_gains.size}"
        )
    return float(dog_responses(mask.signed_gains, spectrum, mask.df))


def gaussian_area_fraction(sigma_rule: float) -> float:
    """Share of a Gaussian's area inside +/- ``sigma_rule`` sigmas (closed form)."""
    return math.erf(sigma_rule / math.sqrt(2.0))
