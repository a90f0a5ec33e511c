# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels; contracts match `_numpy`."""

import numpy as np

cimport numpy as cnp

from ._numpy import check_band_transpose as _check_band_transpose
from ._numpy import check_scratch as _check_scratch

cnp.import_array()

IMPL = "cython"


def padded_source(u, row_chirp, col_chirp, shape=None, out=None):
    u_c = np.ascontiguousarray(u, dtype=np.complex128)
    row_c = np.ascontiguousarray(row_chirp, dtype=np.complex128)
    col_c = np.ascontiguousarray(col_chirp, dtype=np.complex128)
    cdef Py_ssize_t n_y = u_c.shape[0], n_x = u_c.shape[1]
    if shape is None:
        shape = (2 * n_y, 2 * n_x)
    cdef Py_ssize_t p_y = shape[0], p_x = shape[1]
    if p_y < n_y or p_x < n_x or (p_y - n_y) % 2 or (p_x - n_x) % 2:
        raise ValueError(f"padded shape {shape!r} cannot center a ({n_y}, {n_x}) block")
    cdef Py_ssize_t i, j, oy = (p_y - n_y) // 2, ox = (p_x - n_x) // 2
    cdef bint reuse = out is not None
    if not reuse:
        out = np.zeros((p_y, p_x), dtype=np.complex128)
    else:
        _check_scratch(out, (p_y, p_x))
    cdef double complex[:, ::1] ov = out
    if reuse:
        # Re-zero only the border; the center block is overwritten below.
        for i in range(p_y):
            if oy <= i < oy + n_y:
                for j in range(ox):
                    ov[i, j] = 0.0
                for j in range(ox + n_x, p_x):
                    ov[i, j] = 0.0
            else:
                for j in range(p_x):
                    ov[i, j] = 0.0
    # Center fill as real/imag sweeps (see apply_kernel).
    cdef double[:, ::1] ud = u_c.view(np.float64)
    cdef double[::1] rd = row_c.view(np.float64)
    cdef double[::1] cd = col_c.view(np.float64)
    cdef double[:, ::1] od = out.view(np.float64)
    cdef double rre, rim, fre, fim, a, b
    for i in range(n_y):
        rre = rd[2 * i]
        rim = rd[2 * i + 1]
        for j in range(n_x):
            fre = rre * cd[2 * j] - rim * cd[2 * j + 1]
            fim = rre * cd[2 * j + 1] + rim * cd[2 * j]
            a = ud[i, 2 * j]
            b = ud[i, 2 * j + 1]
            od[oy + i, 2 * (ox + j)] = a * fre - b * fim
            od[oy + i, 2 * (ox + j) + 1] = a * fim + b * fre
    return out


def apply_kernel(spectrum, kern_y, kern_x):
    # Single fused pass over the spectrum instead of two broadcast products.
    # The complex product is expanded into real/imag double sweeps so the
    # compiler can vectorize the inner loop; a scalar complex-multiply loop
    # costs about three times as much on cache-busting buffers.
    cdef double[:, ::1] sv = spectrum.view(np.float64)
    ky_c = np.ascontiguousarray(kern_y, dtype=np.complex128)
    kx_c = np.ascontiguousarray(kern_x, dtype=np.complex128)
    cdef double[::1] kyv = ky_c.view(np.float64)
    cdef double[::1] kxv = kx_c.view(np.float64)
    cdef Py_ssize_t rows = spectrum.shape[0], cols = spectrum.shape[1]
    cdef Py_ssize_t i, j
    cdef double kyre, kyim, fre, fim, a, b
    for i in range(rows):
        kyre = kyv[2 * i]
        kyim = kyv[2 * i + 1]
        for j in range(cols):
            fre = kyre * kxv[2 * j] - kyim * kxv[2 * j + 1]
            fim = kyre * kxv[2 * j + 1] + kyim * kxv[2 * j]
            a = sv[i, 2 * j]
            b = sv[i, 2 * j + 1]
            sv[i, 2 * j] = a * fre - b * fim
            sv[i, 2 * j + 1] = a * fim + b * fre


# Tile edge for the blocked transposes: 64x64 complex128 keeps the live
# source and destination lines of a tile (128 KiB) well inside L2 so each
# cache line is touched once, where a straight strided copy rereads lines.
cdef Py_ssize_t _TILE = 64


def transpose_into_band(dst, src, col_off):
    # One blocked pass over dst: per row block, zero the border columns,
    # then fill the band from src tiles. Contracts match `_numpy`.
    _check_band_transpose(dst, src, col_off)
    cdef double complex[:, ::1] d = dst
    cdef double complex[:, ::1] s = src
    cdef Py_ssize_t rows = d.shape[0], cols = d.shape[1], band = s.shape[0]
    cdef Py_ssize_t off = col_off
    cdef Py_ssize_t i0, j0, i, j, i_end, j_end
    for i0 in range(0, rows, _TILE):
        i_end = min(i0 + _TILE, rows)
        for i in range(i0, i_end):
            for j in range(off):
                d[i, j] = 0.0
            for j in range(off + band, cols):
                d[i, j] = 0.0
        for j0 in range(0, band, _TILE):
            j_end = min(j0 + _TILE, band)
            for i in range(i0, i_end):
                for j in range(j0, j_end):
                    d[i, off + j] = s[j, i]
    return dst


def transpose_from_band(dst, src, col_off):
    _check_band_transpose(src, dst, col_off)
    cdef double complex[:, ::1] d = dst
    cdef double complex[:, ::1] s = src
    cdef Py_ssize_t band = d.shape[0], rows = d.shape[1]
    cdef Py_ssize_t off = col_off
    cdef Py_ssize_t i0, j0, i, j, i_end, j_end
    for i0 in range(0, band, _TILE):
        i_end = min(i0 + _TILE, band)
        for j0 in range(0, rows, _TILE):
            j_end = min(j0 + _TILE, rows)
            for i in range(i0, i_end):
                for j in range(j0, j_end):
                    d[i, j] = s[j, off + i]
    return dst


def modulated_crop(buf, row_chirp, col_chirp, scale):
    # Crop the centered columns and apply the separable output modulation in
    # one pass, expanded into real/imag sweeps so the loop vectorizes.
    buf_c = np.ascontiguousarray(buf, dtype=np.complex128)
    row_c = np.ascontiguousarray(row_chirp, dtype=np.complex128) * complex(scale)
    col_c = np.ascontiguousarray(col_chirp, dtype=np.complex128)
    cdef double[:, ::1] bv = buf_c.view(np.float64)
    cdef double[::1] rv = row_c.view(np.float64)
    cdef double[::1] cv = col_c.view(np.float64)
    cdef Py_ssize_t n_y = buf_c.shape[0], n_x = col_c.shape[0]
    cdef Py_ssize_t ox = (buf_c.shape[1] - n_x) // 2
    out = np.empty((n_y, n_x), dtype=np.complex128)
    cdef double[:, ::1] ov = out.view(np.float64)
    cdef Py_ssize_t i, j
    cdef double rre, rim, fre, fim, a, b
    for i in range(n_y):
        rre = rv[2 * i]
        rim = rv[2 * i + 1]
        for j in range(n_x):
            fre = rre * cv[2 * j] - rim * cv[2 * j + 1]
            fim = rre * cv[2 * j + 1] + rim * cv[2 * j]
            a = bv[i, 2 * (ox + j)]
            b = bv[i, 2 * (ox + j) + 1]
            ov[i, 2 * j] = a * fre - b * fim
            ov[i, 2 * j + 1] = a * fim + b * fre
    return out


def direct_fresnel_sum(u, ys, xs, yd, xd, double coef):
    cdef double complex[:, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    ys_a = np.ascontiguousarray(ys, dtype=np.float64)
    xs_a = np.ascontiguousarray(xs, dtype=np.float64)
    yd_a = np.ascontiguousarray(yd, dtype=np.float64)
    xd_a = np.ascontiguousarray(xd, dtype=np.float64)
    # Per-axis phase tables; the double sum factors exactly because the
    # quadratic exponent separates along rows and columns.
    row_phase = np.exp(1j * coef * (yd_a[:, None] - ys_a[None, :]) ** 2)
    col_phase = np.exp(1j * coef * (xd_a[:, None] - xs_a[None, :]) ** 2)
    cdef double complex[:, ::1] rp = row_phase
    cdef double complex[:, ::1] cp = col_phase
    cdef Py_ssize_t np_ = rp.shape[0], nn = rp.shape[1]
    cdef Py_ssize_t nq = cp.shape[0], nm = cp.shape[1]
    out = np.empty((np_, nq), dtype=np.complex128)
    cdef double complex[:, ::1] ov = out
    partial = np.empty(nm, dtype=np.complex128)
    cdef double complex[::1] pv = partial
    cdef Py_ssize_t p, q, n, m
    cdef double complex acc, rw
    for p in range(np_):
        for m in range(nm):
            acc = 0
            for n in range(nn):
                acc = acc + rp[p, n] * uv[n, m]
            pv[m] = acc
        for q in range(nq):
            acc = 0
            for m in range(nm):
                acc = acc + cp[q, m] * pv[m]
            ov[p, q] = acc
    return out


cdef void _corr_axis1(double[:, ::1] img, double[::1] w, double[:, ::1] out) noexcept:
    cdef Py_ssize_t rows = img.shape[0], k = w.shape[0]
    cdef Py_ssize_t cols_out = img.shape[1] - k + 1
    cdef Py_ssize_t i, j, t
    cdef double acc
    for i in range(rows):
        for j in range(cols_out):
            acc = 0.0
            for t in range(k):
                acc += img[i, j + t] * w[t]
            out[i, j] = acc


cdef void _corr_axis0(double[:, ::1] img, double[::1] w, double[:, ::1] out) noexcept:
    cdef Py_ssize_t k = w.shape[0], cols = img.shape[1]
    cdef Py_ssize_t rows_out = img.shape[0] - k + 1
    cdef Py_ssize_t i, j, t
    cdef double acc
    for i in range(rows_out):
        for j in range(cols):
            acc = 0.0
            for t in range(k):
                acc += img[i + t, j] * w[t]
            out[i, j] = acc


def local_stats(x, y, w):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t rows = xv.shape[0], cols = xv.shape[1], k = wv.shape[0]
    cdef Py_ssize_t r_out = rows - k + 1, c_out = cols - k + 1
    prods = np.empty((5, rows, cols), dtype=np.float64)
    cdef double[:, :, ::1] pv = prods
    cdef Py_ssize_t i, j
    for i in range(rows):
        for j in range(cols):
            pv[0, i, j] = xv[i, j]
            pv[1, i, j] = yv[i, j]
            pv[2, i, j] = xv[i, j] * xv[i, j]
            pv[3, i, j] = yv[i, j] * yv[i, j]
            pv[4, i, j] = xv[i, j] * yv[i, j]
    tmp = np.empty((rows, c_out), dtype=np.float64)
    cdef double[:, ::1] tv = tmp
    maps = []
    cdef Py_ssize_t s
    for s in range(5):
        _corr_axis1(pv[s], wv, tv)
        out = np.empty((r_out, c_out), dtype=np.float64)
        _corr_axis0(tv, wv, out)
        maps.append(out)
    return tuple(maps)
