"""Phase encodings (argument and bleached real part) and the unit lift."""

import math

import numpy as np
import pytest

from holoscale import (
    ComplexField,
    Encoding,
    PhaseHologram,
    amplitude,
    encode_bleached,
    encode_phase_only,
    lift,
    phase_of,
)

_GEOM = dict(pitch_y=10e-6, pitch_x=10e-6, wavelength=532e-9)


def _field(samples):
    return ComplexField(np.asarray(samples, dtype=np.complex128), 10e-6, 10e-6, 532e-9)


def _random_field(seed=0, shape=(16, 16)):
    rng = np.random.default_rng(seed)
    return _field(rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


class TestEncodePhaseOnly:
    def test_diagonal_unit_sample(self):
        holo = encode_phase_only(_field(np.full((4, 4), (1 + 1j) / math.sqrt(2))))
        np.testing.assert_allclose(holo.phase, np.pi / 4, rtol=1e-14)
        assert holo.encoding is Encoding.PHASE_ONLY
        assert holo.alpha is None

    def test_positive_reals_map_to_zero(self):
        holo = encode_phase_only(_field([[1.0, 2.5], [0.3, 7.0]]))
        np.testing.assert_array_equal(holo.phase, 0.0)

    def test_matches_unit_direction(self):
        f = _random_field()
        holo = encode_phase_only(f)
        direction = f.samples / np.abs(f.samples)
        assert np.abs(np.exp(1j * holo.phase) - direction).max() <= 1e-12

    def test_scale_invariance(self):
        f = _random_field(3)
        base = encode_phase_only(f).phase
        # power-of-two scaling keeps every intermediate exact
        doubled = encode_phase_only(_field(4.0 * f.samples)).phase
        np.testing.assert_array_equal(doubled, base)
        arbitrary = encode_phase_only(_field(2.7 * f.samples)).phase
        np.testing.assert_allclose(arbitrary, base, atol=1e-12)

    def test_carries_geometry(self):
        holo = encode_phase_only(_random_field())
        assert (holo.pitch_y, holo.pitch_x, holo.wavelength) == (10e-6, 10e-6, 532e-9)


class TestEncodeBleached:
    def test_constant_field_normalizes_to_pi(self):
        holo = encode_bleached(_field(np.full((3, 3), 1 + 2j)))
        np.testing.assert_array_equal(holo.phase, np.pi)
        assert holo.encoding is Encoding.BLEACHED
        assert holo.alpha == pytest.approx(math.pi, rel=1e-15)

    def test_zero_field_gives_zero_phase(self):
        holo = encode_bleached(_field(np.zeros((3, 3))))
        np.testing.assert_array_equal(holo.phase, 0.0)
        assert holo.alpha == 0.0

    def test_symmetric_real_parts_fill_range(self):
        holo = encode_bleached(_field([[-0.5 + 1j, 0.5 - 2j]]))
        np.testing.assert_allclose(holo.phase, [[-np.pi, np.pi]], rtol=1e-15)

    def test_alpha_records_normalization(self):
        f = _random_field(5)
        holo = encode_bleached(f)
        peak = np.abs(f.samples.real).max()
        assert holo.alpha == pytest.approx(math.pi / peak, rel=1e-15)
        np.testing.assert_allclose(holo.phase, holo.alpha * f.samples.real, rtol=1e-15)

    def test_scale_invariance(self):
        f = _random_field(7)
        base = encode_bleached(f).phase
        scaled = encode_bleached(_field(3.1 * f.samples)).phase
        np.testing.assert_allclose(scaled, base, atol=1e-12)


class TestLift:
    def test_zero_phase_lifts_to_one(self):
        holo = PhaseHologram(np.zeros((4, 4)), encoding=Encoding.PHASE_ONLY, **_GEOM)
        np.testing.assert_array_equal(lift(holo).samples, 1.0 + 0.0j)

    def test_unit_amplitude_within_one_ulp(self):
        rng = np.random.default_rng(11)
        holo = PhaseHologram(
            rng.uniform(-np.pi, np.pi, (32, 32)), encoding=Encoding.PHASE_ONLY, **_GEOM
        )
        deviation = np.abs(amplitude(lift(holo)) - 1.0)
        assert deviation.max() <= np.spacing(1.0)

    def test_lift_of_encoding_round_trips_phase(self):
        f = _random_field(13)
        holo = encode_phase_only(f)
        np.testing.assert_allclose(phase_of(lift(holo)), phase_of(f), atol=1e-12)

    def test_preserves_geometry(self):
        holo = PhaseHologram(np.zeros((4, 4)), encoding=Encoding.BLEACHED, **_GEOM)
        lifted = lift(holo)
        assert (lifted.pitch_y, lifted.pitch_x, lifted.wavelength) == (10e-6, 10e-6, 532e-9)


class TestPhaseHologramValidation:
    def test_phase_only_range_enforced(self):
        with pytest.raises(ValueError):
            PhaseHologram(np.full((2, 2), 3.2), encoding=Encoding.PHASE_ONLY, **_GEOM)
        with pytest.raises(ValueError):
            PhaseHologram(np.full((2, 2), -np.pi), encoding=Encoding.PHASE_ONLY, **_GEOM)
        # +pi is the included endpoint
        PhaseHologram(np.full((2, 2), np.pi), encoding=Encoding.PHASE_ONLY, **_GEOM)

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            PhaseHologram(np.full((2, 2), np.nan), encoding=Encoding.BLEACHED, **_GEOM)

    def test_enum_values(self):
        assert Encoding.PHASE_ONLY.value == "phase-only"
        assert Encoding.BLEACHED.value == "bleached"
