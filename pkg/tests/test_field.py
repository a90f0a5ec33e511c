"""Field and image containers, elementary conversions."""

import numpy as np
import pytest

from holoscale import (
    ComplexField,
    RealImage,
    ShapeMismatch,
    amplitude,
    field_from_amplitude_and_phase,
    normalize_to_u8,
    phase_of,
)


class TestComplexField:
    def test_stores_complex128_contiguous(self):
        f = ComplexField(np.ones((4, 6), dtype=np.complex64), 1e-6, 2e-6, 532e-9)
        assert f.samples.dtype == np.complex128
        assert f.samples.flags["C_CONTIGUOUS"]
        assert (f.rows, f.cols) == (4, 6)
        assert (f.pitch_y, f.pitch_x) == (1e-6, 2e-6)

    def test_read_only_input_materialized_writable(self):
        base = np.ones((2, 3), dtype=np.complex128)
        base.setflags(write=False)
        f = ComplexField(base, 1e-6, 1e-6, 532e-9)
        assert f.samples.flags.writeable

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            ComplexField(np.ones(8, dtype=np.complex128), 1e-6, 1e-6, 532e-9)

    def test_rejects_non_finite(self):
        bad = np.ones((2, 2), dtype=np.complex128)
        bad[0, 0] = np.nan + 0j
        with pytest.raises(ValueError):
            ComplexField(bad, 1e-6, 1e-6, 532e-9)

    @pytest.mark.parametrize("pitch_y,pitch_x,wl", [(0.0, 1e-6, 532e-9), (1e-6, -1e-6, 532e-9), (1e-6, 1e-6, 0.0)])
    def test_rejects_non_positive_geometry(self, pitch_y, pitch_x, wl):
        with pytest.raises(ValueError):
            ComplexField(np.ones((2, 2), dtype=np.complex128), pitch_y, pitch_x, wl)


class TestRealImage:
    def test_accepts_unit_range(self):
        img = RealImage(np.linspace(0.0, 1.0, 16).reshape(4, 4))
        assert img.pixels.dtype == np.float64
        assert (img.rows, img.cols) == (4, 4)

    @pytest.mark.parametrize("value", [-0.01, 1.01, np.nan])
    def test_rejects_out_of_range(self, value):
        pixels = np.full((3, 3), 0.5)
        pixels[1, 1] = value
        with pytest.raises(ValueError):
            RealImage(pixels)

    def test_rejects_non_2d(self):
        with pytest.raises(ValueError):
            RealImage(np.zeros(5))


class TestConversions:
    def test_field_from_amplitude_and_phase(self):
        amp = np.array([[1.0, 2.0], [0.5, 0.0]])
        ph = np.array([[0.0, np.pi / 2], [np.pi, -np.pi / 2]])
        f = field_from_amplitude_and_phase(amp, ph, 1e-6, 532e-9)
        np.testing.assert_allclose(f.samples, amp * np.exp(1j * ph), atol=1e-15)
        assert f.pitch_y == f.pitch_x == 1e-6

    def test_accepts_real_image_and_pitch_pair(self):
        img = RealImage(np.full((2, 2), 0.25))
        f = field_from_amplitude_and_phase(img, np.zeros((2, 2)), (1e-6, 2e-6), 532e-9)
        np.testing.assert_array_equal(f.samples, np.full((2, 2), 0.25 + 0j))
        assert (f.pitch_y, f.pitch_x) == (1e-6, 2e-6)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            field_from_amplitude_and_phase(np.ones((2, 2)), np.zeros((2, 3)), 1e-6, 532e-9)

    def test_amplitude(self):
        f = ComplexField(np.array([[3 + 4j, 0j]]), 1e-6, 1e-6, 532e-9)
        np.testing.assert_allclose(amplitude(f), [[5.0, 0.0]], rtol=1e-15)

    def test_phase_of_half_open_convention(self):
        f = ComplexField(np.array([[-1.0 + 0j, 0j, 1j, 1 + 0j]]), 1e-6, 1e-6, 532e-9)
        ph = phase_of(f)
        # negative reals map to +pi, zeros to 0
        np.testing.assert_allclose(ph, [[np.pi, 0.0, np.pi / 2, 0.0]], atol=1e-15)
        assert ph.max() <= np.pi and ph.min() > -np.pi

    def test_phase_of_accepts_ndarray(self):
        np.testing.assert_allclose(phase_of(np.array([[1j]])), [[np.pi / 2]], atol=1e-15)


class TestNormalizeToU8:
    def test_peak_maps_to_255(self):
        out = normalize_to_u8(np.array([[0.0, 0.5, 2.0]]))
        assert out.dtype == np.uint8
        np.testing.assert_array_equal(out, [[0, 64, 255]])

    def test_half_rounds_up(self):
        # 0.5 of peak -> 127.5 + 0.5 -> 128
        out = normalize_to_u8(np.array([[1.0, 0.5]]))
        assert out[0, 1] == 128

    def test_all_zero_input(self):
        np.testing.assert_array_equal(normalize_to_u8(np.zeros((2, 2))), np.zeros((2, 2), np.uint8))
