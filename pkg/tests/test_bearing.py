import math

import pytest
from hypothesis import given, strategies as st

from sfrf.bearing import (
    LDK_UER204,
    BearingParameters,
    CharacteristicFrequencies,
    FaultMode,
    GeometryError,
    OperatingMode,
    characteristic_frequencies,
    fault_frequency_set,
)

PUBLISHED = CharacteristicFrequencies(bpfo=107.9074, bpfi=172.0926, bsf=72.3300, ftf=13.4884)


class TestCharacteristicFrequencies:
    def test_published_values_at_35_hz(self):
        cf = characteristic_frequencies(LDK_UER204, OperatingMode(35.0))
        assert cf.bpfo == pytest.approx(107.9074, abs=1e-3)
        assert cf.bpfi == pytest.approx(172.0926, abs=1e-3)
        assert cf.ftf == pytest.approx(13.4884, abs=1e-3)
        assert cf.bsf == pytest.approx(72.3300, abs=1e-3)

    def test_ball_count_recovered_from_bpfo(self):
        g = LDK_UER204
        ratio = g.ball_diameter / g.pitch_diameter * math.cos(math.radians(g.contact_angle))
        n_b = 2 * 107.9074 / (35.0 * (1 - ratio))
        assert n_b == pytest.approx(8.0, abs=0.01)

    def test_zero_shaft_speed(self):
        cf = characteristic_frequencies(LDK_UER204, 0.0)
        assert (cf.bpfo, cf.bpfi, cf.bsf, cf.ftf) == (0.0, 0.0, 0.0, 0.0)

    def test_ordering(self):
        cf = characteristic_frequencies(LDK_UER204, 35.0)
        assert cf.bpfi > cf.bpfo > cf.bsf > cf.ftf > 0

    def test_right_angle_contact(self):
        g = BearingParameters(ball_diameter=7.92, pitch_diameter=34.55, contact_angle=90.0, ball_count=8)
        cf = characteristic_frequencies(g, 35.0)
        assert cf.bpfo == pytest.approx(35.0 * 8 / 2)
        assert cf.bpfi == pytest.approx(35.0 * 8 / 2)
        assert cf.ftf == pytest.approx(35.0 / 2)

    @given(st.floats(0.1, 500.0), st.floats(0.1, 10.0))
    def test_homogeneous_in_shaft_speed(self, f_r, c):
        a = characteristic_frequencies(LDK_UER204, f_r)
        b = characteristic_frequencies(LDK_UER204, c * f_r)
        for name in ("bpfo", "bpfi", "bsf", "ftf"):
            assert getattr(b, name) == pytest.approx(c * getattr(a, name), rel=1e-12)


class TestGeometryValidation:
    def test_pitch_from_raceways(self):
        g = BearingParameters(ball_diameter=7.92, inner_raceway_diameter=29.30, outer_raceway_diameter=39.80)
        assert g.pitch_diameter == pytest.approx(34.55, abs=1e-9)

    @pytest.mark.parametrize(
        "kw",
        [
            dict(ball_diameter=0.0, pitch_diameter=34.55),
            dict(ball_diameter=-1.0, pitch_diameter=34.55),
            dict(ball_diameter=40.0, pitch_diameter=34.55),
            dict(ball_diameter=7.92, pitch_diameter=34.55, ball_count=0),
            dict(ball_diameter=7.92, pitch_diameter=35.0, inner_raceway_diameter=29.3, outer_raceway_diameter=39.8),
        ],
    )
    def test_rejects_bad_geometry(self, kw):
        with pytest.raises(GeometryError):
            BearingParameters(**kw)

    def test_operating_mode_positive(self):
        with pytest.raises(GeometryError):
            OperatingMode(0.0)
        with pytest.raises(GeometryError):
            OperatingMode(35.0, -1.0)


def test_ball_set_first_sidebands():
    got = fault_frequency_set(FaultMode.BALL, PUBLISHED, 35.0, 1, 1)
    assert got == pytest.approx([72.33 - 13.4884, 72.33, 72.33 + 13.4884])
    assert got == pytest.approx([58.8416, 72.3300, 85.8184], abs=1e-4)


def test_cage_ignores_sidebands():
    assert fault_frequency_set(FaultMode.CAGE, PUBLISHED, 35.0, 1, 3) == [13.4884]


def test_outer_harmonics():
    assert fault_frequency_set(FaultMode.OUTER_RACE, PUBLISHED, 35.0, 2, 2) == pytest.approx([107.9074, 215.8148])


def test_inner_race_cartesian_product():
    got = fault_frequency_set(FaultMode.INNER_RACE, PUBLISHED, 35.0, 2, 2)
    by_hand = sorted(n * 172.0926 + s * 35.0 for n in (1, 2) for s in (-2, -1, 0, 1, 2))
    assert len(got) == 10
    assert got == pytest.approx(by_hand)
    assert any(abs(f - 274.1852) < 1e-9 for f in got)


def test_non_positive_members_dropped():
    cf = CharacteristicFrequencies(bpfo=1.0, bpfi=10.0, bsf=5.0, ftf=4.0)
    got = fault_frequency_set(FaultMode.INNER_RACE, cf, 35.0, 1, 1)
    assert got == [10.0, 45.0]


def test_duplicates_collapsed():
    cf = CharacteristicFrequencies(bpfo=1.0, bpfi=10.0, bsf=10.0, ftf=5.0)
    # 2*10 - 2*5 == 10 collides with the first harmonic
    got = fault_frequency_set(FaultMode.BALL, cf, 1.0, 2, 2)
    assert got == sorted(set(got))
    assert len(got) == len({round(f, 9) for f in got})


@given(
    st.sampled_from(list(FaultMode)),
    st.floats(1.0, 80.0),
    st.integers(1, 4),
    st.integers(0, 4),
)
def test_frequency_set_properties(mode, f_r, n_h, n_s):
    cf = characteristic_frequencies(LDK_UER204, f_r)
    got = fault_frequency_set(mode, cf, f_r, n_h, n_s)
    assert all(f > 0 for f in got)
    assert all(b > a for a, b in zip(got, got[1:]))
    assert len(got) <= n_h * (2 * n_s + 1)


def test_rejects_zero_harmonics():
    with pytest.raises(ValueError):
        fault_frequency_set(FaultMode.OUTER_RACE, PUBLISHED, 35.0, 0, 0)
