import numpy as np
import pytest

from sfrf.bearing import LDK_UER204, FaultMode, characteristic_frequencies, fault_frequency_set
from sfrf.masks import ReceptiveFieldParams
from sfrf.metrics import monotonicity
from sfrf.pipeline import compute_trajectory
from sfrf.signals import load_run, magnitude_spectrum
from sfrf.synthetic import (
    FaultInjection,
    Stage,
    degradation_run,
    parse_stage_spec,
    synth_run,
    synth_snapshot,
    write_run,
)

from conftest import SMALL_MODE, SMALL_N

CF = characteristic_frequencies(LDK_UER204, SMALL_MODE)


def peaks(mags, k=None, floor=1e-3):
    """Local maxima above ``floor``; the independent peak-picking oracle."""
    idx = [i for i in range(1, mags.size - 1) if mags[i] >= mags[i - 1] and mags[i] > mags[i + 1] and mags[i] > floor]
    return idx


def test_silent_snapshot(rng):
    s = synth_snapshot(CF, [], SMALL_MODE, 256, rng)
    assert not s.horizontal.any() and not s.vertical.any()


def test_outer_injection_spectrum(rng):
    s = synth_snapshot(CF, [FaultInjection(FaultMode.OUTER_RACE, 1.0)], SMALL_MODE, SMALL_N, rng)
    m = magnitude_spectrum(s.horizontal, 6400.0).magnitudes
    df = 0.78125
    found = [i * df for i in peaks(m, floor=0.05)]
    assert len(found) == 2
    for f_true, f_peak in zip([CF.bpfo, 2 * CF.bpfo], found):
        assert abs(f_peak - f_true) <= df
    # far from the tones only leakage remains
    assert m[(np.arange(m.size) * df > 300)].max() < 0.01


def test_inner_injection_sidebands(rng):
    s = synth_snapshot(CF, [FaultInjection(FaultMode.INNER_RACE, 1.0)], SMALL_MODE, SMALL_N, rng)
    m = magnitude_spectrum(s.vertical, 6400.0).magnitudes
    df = 0.78125
    found = np.array(peaks(m, floor=0.03)) * df
    expected = fault_frequency_set(FaultMode.INNER_RACE, CF, 35.0, 2, 2)
    assert len(found) == len(expected) == 10
    assert np.all(np.abs(found - np.array(expected)) <= df)
    # carrier at BPFI with sidebands spaced by the shaft frequency
    assert np.allclose(np.diff(found[:5]), 35.0, atol=2 * df)


def test_sideband_amplitudes_halve(rng):
    mode = SMALL_MODE
    s = synth_snapshot(CF, [FaultInjection(FaultMode.BALL, 1.0, n_harmonics=1, n_sidebands=1)], mode, SMALL_N, rng)
    m = magnitude_spectrum(s.horizontal, 6400.0).magnitudes
    carrier = m[int(round(CF.bsf / 0.78125)) - 1 : int(round(CF.bsf / 0.78125)) + 2].max()
    side = m[int(round((CF.bsf + CF.ftf) / 0.78125)) - 1 : int(round((CF.bsf + CF.ftf) / 0.78125)) + 2].max()
    assert side / carrier == pytest.approx(0.5, rel=0.4)


def test_deterministic():
    a = degradation_run(3, 3, seed=11, mode=SMALL_MODE, n_samples=512)
    b = degradation_run(3, 3, seed=11, mode=SMALL_MODE, n_samples=512)
    for x, y in zip(a.snapshots, b.snapshots):
        assert np.array_equal(x.horizontal, y.horizontal) and np.array_equal(x.vertical, y.vertical)


def test_independent_channel_noise():
    rec = synth_run([Stage(3)], SMALL_MODE, seed=1, n_samples=256, noise_std=1.0)
    s = rec.snapshots[0]
    assert not np.array_equal(s.horizontal, s.vertical)


def test_too_short():
    with pytest.raises(ValueError):
        synth_run([Stage(2)], SMALL_MODE, n_samples=64)


def test_healthy_then_outer_trajectory():
    rec = degradation_run(10, 10, FaultMode.OUTER_RACE, noise_std=0.05, seed=3, mode=SMALL_MODE, n_samples=SMALL_N)
    h = compute_trajectory(rec, ReceptiveFieldParams()).matrix[:, 0]
    assert np.ptp(h[:10]) < 0.05 * np.ptp(h[10:])
    assert np.all(np.diff(h[10:]) > 0)


def test_all_healthy_low_monotonicity():
    scores = []
    for seed in range(20):
        rec = synth_run([Stage(12)], SMALL_MODE, seed=seed, n_samples=2048, noise_std=0.1)
        scores.append(monotonicity(compute_trajectory(rec, ReceptiveFieldParams())))
    assert max(scores) < 0.4


def test_stage_spec():
    stages = parse_stage_spec("10 healthy, 10 outer")
    assert [s.duration for s in stages] == [10, 10]
    assert stages[0].injections == ()
    assert stages[1].injections[0].fault_mode is FaultMode.OUTER_RACE
    assert stages[1].injections[0].amplitude_at(10) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        parse_stage_spec("0 healthy")
    with pytest.raises(ValueError):
        parse_stage_spec("3 wobble")


def test_write_run_layout(tmp_path):
    rec = synth_run(parse_stage_spec("2 healthy,2 cage"), SMALL_MODE, seed=2, n_samples=128)
    write_run(rec, tmp_path / "run")
    assert sorted(p.name for p in (tmp_path / "run").iterdir()) == ["1.csv", "2.csv", "3.csv", "4.csv"]
    back = load_run(tmp_path / "run", SMALL_MODE)
    for a, b in zip(rec.snapshots, back.snapshots):
        assert np.array_equal(a.horizontal, b.horizontal)
