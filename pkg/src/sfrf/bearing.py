"""Bearing characteristic frequencies and per-fault-mode frequency sets.

Standard rolling-element kinematics:

    BPFO = f_r * N_B/2 * (1 - D_B/D_P * cos(phi))
    BPFI = f_r * N_B/2 * (1 + D_B/D_P * cos(phi))
    BSF  = f_r * D_P/(2 D_B) * (1 - (D_B/D_P * cos(phi))**2)
    FTF  = f_r/2 * (1 - D_B/D_P * cos(phi))
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

DUPLICATE_TOL_HZ = 1e-9


class GeometryError(ValueError):
    pass


class FaultMode(enum.Enum):
    OUTER_RACE = "outer"
    INNER_RACE = "inner"
    BALL = "ball"
    CAGE = "cage"


# Fixed serialization order for indicator vectors.
FAULT_MODES = (FaultMode.OUTER_RACE, FaultMode.INNER_RACE, FaultMode.BALL, FaultMode.CAGE)


@dataclass(frozen=True)
class BearingParameters:
    """Bearing geometry in millimetres and degrees.

    ``pitch_diameter`` may be omitted when both raceway diameters are given;
    it is then their mean.
    """

    ball_diameter: float
    pitch_diameter: Optional[float] = None
    contact_angle: float = 0.0
    ball_count: int = 8
    inner_raceway_diameter: Optional[float] = None
    outer_raceway_diameter: Optional[float] = None

    def __post_init__(self):
        di, do = self.inner_raceway_diameter, self.outer_raceway_diameter
        if self.pitch_diameter is None:
            if di is None or do is None:
                raise GeometryError("pitch_diameter requires both raceway diameters when omitted")
            object.__setattr__(self, "pitch_diameter", (di + do) / 2.0)
        for name in ("ball_diameter", "pitch_diameter", "inner_raceway_diameter", "outer_raceway_diameter"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise GeometryError(f"{name} must be > 0, got {value}")
        if self.ball_diameter >= self.pitch_diameter:
            raise GeometryError(
                f"ball_diameter ({self.ball_diameter}) must be < pitch_diameter ({self.pitch_diameter})"
            )
        if di is not None and do is not None and abs((di + do) / 2.0 - self.pitch_diameter) > 1e-6:
            raise GeometryError(
                f"pitch_diameter {self.pitch_diameter} != mean of raceway diameters {(di + do) / 2.0}"
            )
        if int(self.ball_count) != self.ball_count or self.ball_count < 1:
            raise GeometryError(f"ball_count must be a positive integer, got {self.ball_count}")


# LDK UER204, the bearing of the XJTU-SY testbed. Ball count is not tabulated
# with the other dimensions; 8 reproduces the published BPFO at 35 Hz.
LDK_UER204 = BearingParameters(
    inner_raceway_diameter=29.30,
    outer_raceway_diameter=39.80,
    pitch_diameter=34.55,
    ball_diameter=7.92,
    contact_angle=0.0,
    ball_count=8,
)


@dataclass(frozen=True)
class OperatingMode:
    shaft_frequency: float = 35.0
    sampling_frequency: float = 25600.0

    def __post_init__(self):
        if not self.shaft_frequency > 0:
            raise GeometryError(f"shaft_frequency must be > 0, got {self.shaft_frequency}")
        if not self.sampling_frequency > 0:
            raise GeometryError(f"sampling_frequency must be > 0, got {self.sampling_frequency}")


@dataclass(frozen=True)
class CharacteristicFrequencies:
    bpfo: float
    bpfi: float
    bsf: float
    ftf: float


def characteristic_frequencies(params: BearingParameters, shaft_frequency) -> CharacteristicFrequencies:
    """BPFO, BPFI, BSF and FTF in Hz.

    ``shaft_frequency`` is either an :class:`OperatingMode` or a plain number
    of Hz (a bare number may be 0, which yields all-zero frequencies).
    """
    f_r = shaft_frequency.shaft_frequency if isinstance(shaft_frequency, OperatingMode) else float(shaft_frequency)
    if f_r < 0:
        raise GeometryError(f"shaft frequency must be >= 0, got {f_r}")
    ratio = params.ball_diameter / params.pitch_diameter * math.cos(math.radians(params.contact_angle))
    half_balls = params.ball_count / 2.0
    return CharacteristicFrequencies(
        bpfo=f_r * half_balls * (1.0 - ratio),
        bpfi=f_r * half_balls * (1.0 + ratio),
        bsf=f_r * params.pitch_diameter / (2.0 * params.ball_diameter) * (1.0 - ratio * ratio),
        ftf=f_r / 2.0 * (1.0 - ratio),
    )


def fault_frequency_set(
    mode: FaultMode,
    cf: CharacteristicFrequencies,
    shaft_frequency: float,
    n_harmonics: int = 2,
    n_sidebands: int = 2,
) -> list[float]:
    """Harmonics (and modulation sidebands) of one fault mode's frequency.

    Inner race is modulated by the shaft frequency, ball spin by the cage
    frequency; outer race and cage carry harmonics only. Result is ascending,
    strictly positive and free of duplicates.
    """
    if n_harmonics < 1:
        raise ValueError(f"n_harmonics must be >= 1, got {n_harmonics}")
    if n_sidebands < 0:
        raise ValueError(f"n_sidebands must be >= 0, got {n_sidebands}")
    mode = FaultMode(mode)
    harmonics = range(1, n_harmonics + 1)
    sidebands = range(-n_sidebands, n_sidebands + 1)
    if mode is FaultMode.OUTER_RACE:
        raw = [n * cf.bpfo for n in harmonics]
    elif mode is FaultMode.CAGE:
        raw = [n * cf.ftf for n in harmonics]
    elif mode is FaultMode.INNER_RACE:
        raw = [n * cf.bpfi + s * shaft_frequency for n in harmonics for s in sidebands]
    else:
        raw = [n * cf.bsf + s * cf.ftf for n in harmonics for s in sidebands]

    out: list[float] = []
    for f in sorted(raw):
        if f <= 0:
            continue
        if out and f - out[-1] <= DUPLICATE_TOL_HZ:
            continue
        out.append(f)
    return out
