"""Equivalence of the compiled kernels and the pure NumPy fallback."""

import os
import subprocess
import sys

import numpy as np
import pytest

import holoscale
from holoscale._kernels import _numpy as npk

fast = pytest.importorskip(
    "holoscale._kernels._fast", reason="compiled kernel extension not built"
)


def _rng():
    return np.random.default_rng(123)


def _chirp(n, c):
    k = np.arange(n) - n // 2
    return np.exp(1j * c * k.astype(np.float64) ** 2)


def test_active_impl_reported():
    assert holoscale.kernel_impl in ("cython", "numpy")


def test_pure_env_forces_numpy_impl():
    env = dict(os.environ, HOLOSCALE_PURE="1")
    out = subprocess.run(
        [sys.executable, "-c", "import holoscale; print(holoscale.kernel_impl)"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    assert out.stdout.strip() == "numpy"


def test_padded_source_equivalence():
    rng = _rng()
    u = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
    row = _chirp(8, 0.013)
    col = _chirp(12, 0.031)
    a = npk.padded_source(u, row, col)
    b = fast.padded_source(u, row, col)
    assert a.shape == b.shape == (16, 24)
    np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-15)


def test_padded_source_custom_shape_and_scratch_reuse():
    rng = _rng()
    u = rng.standard_normal((8, 12)) + 1j * rng.standard_normal((8, 12))
    row = _chirp(8, 0.013)
    col = _chirp(12, 0.031)
    reference = npk.padded_source(u, row, col, (20, 30))
    for mod in (npk, fast):
        fresh = mod.padded_source(u, row, col, (20, 30))
        dirty = np.full((20, 30), 3.0 - 4.0j, dtype=np.complex128)
        reused = mod.padded_source(u, row, col, (20, 30), out=dirty)
        assert reused is dirty
        np.testing.assert_array_equal(fresh, reused)
        np.testing.assert_allclose(reused, reference, rtol=1e-13, atol=1e-15)
        with pytest.raises(ValueError):
            mod.padded_source(u, row, col, (20, 30), out=np.zeros((20, 29), complex))
        with pytest.raises(ValueError):
            mod.padded_source(u, row, col, (7, 30))


def test_band_transpose_equivalence():
    rng = _rng()
    for rows, cols, band, off in [(7, 11, 3, 4), (130, 200, 70, 65), (96, 97, 1, 96)]:
        narrow = rng.standard_normal((band, rows)) + 1j * rng.standard_normal((band, rows))
        wide_a = np.full((rows, cols), 9.0 + 9.0j, dtype=np.complex128)
        wide_b = np.full((rows, cols), -7.0j, dtype=np.complex128)
        npk.transpose_into_band(wide_a, narrow, off)
        fast.transpose_into_band(wide_b, narrow, off)
        np.testing.assert_array_equal(wide_a, wide_b)
        assert not wide_a[:, :off].any() and not wide_a[:, off + band :].any()
        out_a = np.empty((band, rows), dtype=np.complex128)
        out_b = np.full((band, rows), 1.0j, dtype=np.complex128)
        npk.transpose_from_band(out_a, wide_a, off)
        fast.transpose_from_band(out_b, wide_a, off)
        np.testing.assert_array_equal(out_a, out_b)
        np.testing.assert_array_equal(out_a, narrow)
    for mod in (npk, fast):
        with pytest.raises(ValueError):
            mod.transpose_into_band(np.zeros((4, 8), complex), np.zeros((3, 5), complex), 2)
        with pytest.raises(ValueError):
            mod.transpose_from_band(np.zeros((6, 4), complex), np.zeros((4, 8), complex), 3)


def test_apply_kernel_equivalence():
    rng = _rng()
    spec = rng.standard_normal((16, 24)) + 1j * rng.standard_normal((16, 24))
    ky = np.exp(1j * rng.standard_normal(16))
    kx = np.exp(1j * rng.standard_normal(24))
    a = np.ascontiguousarray(spec)
    b = np.ascontiguousarray(spec)
    npk.apply_kernel(a, ky, kx)
    fast.apply_kernel(b, ky, kx)
    np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-15)


def test_modulated_crop_equivalence():
    rng = _rng()
    buf = rng.standard_normal((8, 24)) + 1j * rng.standard_normal((8, 24))
    row = _chirp(8, 0.007)
    col = _chirp(12, 0.019)
    scale = 0.3 - 1.7j
    a = npk.modulated_crop(np.ascontiguousarray(buf), row, col, scale)
    b = fast.modulated_crop(np.ascontiguousarray(buf), row, col, scale)
    assert a.shape == b.shape == (8, 12)
    np.testing.assert_allclose(b, a, rtol=1e-13, atol=1e-15)


def test_direct_fresnel_sum_equivalence():
    rng = _rng()
    u = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    ys = (np.arange(8) - 4) * 1e-5
    xs = (np.arange(8) - 4) * 1e-5
    yd = (np.arange(8) - 4) * 2e-5
    xd = (np.arange(8) - 4) * 2e-5
    coef = np.pi / (532e-9 * 0.01)
    a = npk.direct_fresnel_sum(u, ys, xs, yd, xd, coef)
    b = fast.direct_fresnel_sum(u, ys, xs, yd, xd, coef)
    np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-12)


def test_local_stats_equivalence():
    rng = _rng()
    x = rng.random((32, 40))
    y = rng.random((32, 40))
    w = np.exp(-((np.arange(11) - 5.0) ** 2) / (2 * 1.5**2))
    w /= w.sum()
    for got, want in zip(fast.local_stats(x, y, w), npk.local_stats(x, y, w)):
        assert got.shape == want.shape == (22, 30)
        np.testing.assert_allclose(got, want, rtol=1e-10, atol=1e-13)
