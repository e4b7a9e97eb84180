"""Synthetic run-to-failure vibration data with known fault content.

A fault injection adds sinusoids at every member of a fault mode's frequency
set. The tone for harmonic n and sideband s has amplitude
``a * 0.5**(n-1) * 0.5**|s|``, so the expected spectrum is known exactly.
White Gaussian noise is added independently to each channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np

from .bearing import LDK_UER204, BearingParameters, CharacteristicFrequencies, FaultMode, OperatingMode, characteristic_frequencies
from .signals import RunToFailureRecord, Snapshot, save_snapshot

HARMONIC_DECAY = 0.5

Amplitude = Union[float, Callable[[int], float]]


@dataclass(frozen=True)
class FaultInjection:
    fault_mode: FaultMode
    amplitude: Amplitude = 1.0  # constant, or snapshot_index -> amplitude
    include_sidebands: bool = True
    noise_floor: float = 0.0
    n_harmonics: int = 2
    n_sidebands: int = 2

    def amplitude_at(self, index: int) -> float:
        a = self.amplitude(index) if callable(self.amplitude) else self.amplitude
        if a < 0:
            raise ValueError(f"negative amplitude {a} at snapshot {index}")
        return float(a)


def tone_table(injection: FaultInjection, cf: CharacteristicFrequencies, shaft_frequency: float, amplitude: float):
    """(frequency, amplitude) pairs for one injection; non-positive frequencies dropped."""
    mode = FaultMode(injection.fault_mode)
    n_s = injection.n_sidebands if injection.include_sidebands else 0
    if mode is FaultMode.OUTER_RACE:
        base, mod, n_s = cf.bpfo, 0.0, 0
    elif mode is FaultMode.CAGE:
        base, mod, n_s = cf.ftf, 0.0, 0
    elif mode is FaultMode.INNER_RACE:
        base, mod = cf.bpfi, shaft_frequency
    else:
        base, mod = cf.bsf, cf.ftf
    tones = []
    for n in range(1, injection.n_harmonics + 1):
        for s in range(-n_s, n_s + 1):
            f = n * base + s * mod
            if f > 0:
                tones.append((f, amplitude * HARMONIC_DECAY ** (n - 1) * HARMONIC_DECAY ** abs(s)))
    return tones


def noise_std_for_snr(amplitude: float, snr: float) -> float:
    """Noise sigma giving power ratio ``snr`` against a sinusoid of ``amplitude``."""
    return amplitude / math.sqrt(2.0 * snr)


def synth_snapshot(
    cf: CharacteristicFrequencies,
    injections: Sequence[FaultInjection],
    mode: OperatingMode,
    n_samples: int,
    rng: np.random.Generator,
    snapshot_index: int = 1,
    noise_std: float = 0.0,
) -> Snapshot:
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    fs = mode.sampling_frequency
    t = np.arange(n_samples) / fs
    channels = []
    sigma = math.sqrt(noise_std**2 + sum(inj.noise_floor**2 for inj in injections))
    for _ in range(2):
        x = np.zeros(n_samples)
        for inj in injections:
            a = inj.amplitude_at(snapshot_index)
            for f, amp in tone_table(inj, cf, mode.shaft_frequency, a):
                phase = rng.uniform(0.0, 2.0 * np.pi)
                if f < fs / 2.0 and amp > 0:
                    x += amp * np.sin(2.0 * np.pi * f * t + phase)
        if sigma > 0:
            x = x + rng.normal(0.0, sigma, n_samples)
        channels.append(x)
    return Snapshot(channels[0], channels[1], fs, snapshot_index)


@dataclass(frozen=True)
class Stage:
    duration: int
    injections: tuple = ()


def synth_run(
    stages: Sequence,
    mode: OperatingMode = OperatingMode(),
    seed: int = 0,
    n_samples: int | None = None,
    noise_std: float = 0.01,
    bearing: BearingParameters = LDK_UER204,
    bearing_id: str = "synthetic",
) -> RunToFailureRecord:
    """Concatenate stages of (duration, injections) into a run.

    Injection amplitude callables receive the 1-based index *within their
    stage*, so a stage can ramp from its own start.
    """
    stages = [s if isinstance(s, Stage) else Stage(int(s[0]), tuple(s[1])) for s in stages]
    total = sum(s.duration for s in stages)
    if total < 3 or any(s.duration < 0 for s in stages):
        raise ValueError(f"a run needs at least 3 snapshots, got {total}")
    if n_samples is None:
        n_samples = int(round(1.28 * mode.sampling_frequency))
    cf = characteristic_frequencies(bearing, mode)
    snaps = []
    k = 0
    for stage in stages:
        for local in range(1, stage.duration + 1):
            k += 1
            rng = np.random.default_rng(np.random.SeedSequence([int(seed), k]))
            local_inj = [
                FaultInjection(
                    inj.fault_mode,
                    inj.amplitude_at(local),
                    inj.include_sidebands,
                    inj.noise_floor,
                    inj.n_harmonics,
                    inj.n_sidebands,
                )
                for inj in stage.injections
            ]
            snaps.append(synth_snapshot(cf, local_inj, mode, n_samples, rng, k, noise_std))
    return RunToFailureRecord(bearing_id, tuple(snaps), mode)


def linear_ramp(peak: float, duration: int, start: float = 0.0) -> Callable[[int], float]:
    """Amplitude rising linearly from ``start`` (exclusive) to ``peak`` at the stage's last snapshot."""
    return lambda i: start + (peak - start) * i / duration


def degradation_run(
    n_healthy: int,
    n_degraded: int,
    fault_mode: FaultMode = FaultMode.OUTER_RACE,
    peak: float = 1.0,
    noise_std: float = 0.05,
    seed: int = 0,
    mode: OperatingMode = OperatingMode(),
    n_samples: int | None = None,
    baseline: float = 0.0,
) -> RunToFailureRecord:
    """Healthy plateau followed by a linearly growing fault.

    ``baseline`` is a small constant fault amplitude present from the start.
    """
    healthy = (FaultInjection(fault_mode, baseline),) if baseline > 0 else ()
    stages = [
        Stage(n_healthy, healthy),
        Stage(n_degraded, (FaultInjection(fault_mode, linear_ramp(peak, n_degraded, baseline)),)),
    ]
    return synth_run(stages, mode, seed, n_samples, noise_std)


def parse_stage_spec(spec: str, peak: float = 1.0) -> list[Stage]:
    """``"10 healthy,10 outer"`` -> stages. Fault stages ramp from 0 to ``peak``."""
    stages = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        fields = part.split()
        if len(fields) != 2:
            raise ValueError(f"stage {part!r} must look like '<count> <healthy|outer|inner|ball|cage>'")
        count, kind = int(fields[0]), fields[1].lower()
        if count <= 0:
            raise ValueError(f"stage {part!r} has non-positive duration")
        if kind == "healthy":
            stages.append(Stage(count))
        else:
            try:
                fm = FaultMode(kind)
            except ValueError:
                raise ValueError(f"unknown stage kind {kind!r}") from None
            stages.append(Stage(count, (FaultInjection(fm, linear_ramp(peak, count)),)))
    if not stages:
        raise ValueError("empty stage spec")
    return stages


def write_run(record: RunToFailureRecord, out_dir) -> list[Path]:
    """Write ``1.csv .. K.csv`` in the XJTU-SY layout."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for s in record.snapshots:
        p = out / f"{s.snapshot_index}.csv"
        save_snapshot(s, p)
        paths.append(p)
    return paths
