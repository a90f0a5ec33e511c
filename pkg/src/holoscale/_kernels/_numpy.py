"""Pure NumPy implementations of the hot kernels.

These are the fallback used when the compiled extension is unavailable (or
disabled via HOLOSCALE_PURE=1). Same contracts as `_fast`.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

IMPL = "numpy"


def check_scratch(out: np.ndarray, shape: tuple[int, int]) -> None:
    """Reject a scratch buffer that cannot safely stand in for a fresh
    allocation: wrong shape or dtype, non-contiguous, or read-only."""
    if (
        out.shape != shape
        or out.dtype != np.complex128
        or not out.flags.c_contiguous
        or not out.flags.writeable
    ):
        raise ValueError(
            f"scratch buffer must be a writable C-contiguous complex128 array of shape {shape}"
        )


def padded_source(
    u: np.ndarray,
    row_chirp: np.ndarray,
    col_chirp: np.ndarray,
    shape: tuple[int, int] | None = None,
    out: np.ndarray | None = None,
) -> np.ndarray:
    """Multiply `u` by the separable chirp and center it in a zeroed padded
    buffer.

    Parameters
    ----------
    u : (N_y, N_x) complex128
    row_chirp : (N_y,) complex128
    col_chirp : (N_x,) complex128
    shape : (P_y, P_x), optional
        Padded buffer shape, both dims even and >= the matching dim of `u`.
        Defaults to (2*N_y, 2*N_x).
    out : (P_y, P_x) complex128, optional
        Writable C-contiguous scratch buffer to fill instead of allocating;
        previous contents are discarded. Only the border is re-zeroed, the
        center block is overwritten outright.

    Returns
    -------
    (P_y, P_x) complex128, centered-index layout (grid coordinate k sits at
    array index k + P/2).
    """
    n_y, n_x = u.shape
    if shape is None:
        shape = (2 * n_y, 2 * n_x)
    p_y, p_x = shape
    if p_y < n_y or p_x < n_x or (p_y - n_y) % 2 or (p_x - n_x) % 2:
        raise ValueError(
            f"padded shape {shape} cannot center a {u.shape} block"
        )
    oy, ox = (p_y - n_y) // 2, (p_x - n_x) // 2
    if out is None:
        out = np.zeros((p_y, p_x), dtype=np.complex128)
    else:
        check_scratch(out, (p_y, p_x))
        out[:oy] = 0.0
        out[oy + n_y :] = 0.0
        out[oy : oy + n_y, :ox] = 0.0
        out[oy : oy + n_y, ox + n_x :] = 0.0
    center = out[oy : oy + n_y, ox : ox + n_x]
    np.multiply(u, row_chirp[:, None], out=center)
    center *= col_chirp
    return out


def apply_kernel(spectrum: np.ndarray, kern_y: np.ndarray, kern_x: np.ndarray) -> None:
    """Multiply `spectrum` in place by the separable kernel outer product.

    Parameters
    ----------
    spectrum : (M_y, M_x) complex128, modified in place
    kern_y : (M_y,) complex128
    kern_x : (M_x,) complex128
    """
    spectrum *= kern_y[:, None]
    spectrum *= kern_x[None, :]


def check_band_transpose(wide: np.ndarray, narrow: np.ndarray, col_off: int) -> None:
    """Reject mismatched operands for the band-transpose kernels.

    `narrow` must be the transpose of a column band of `wide`: shape
    (band, wide rows) with `[col_off, col_off + band)` inside wide's width.
    """
    if wide.dtype != np.complex128 or narrow.dtype != np.complex128:
        raise ValueError("band transpose requires complex128 operands")
    if narrow.shape[1] != wide.shape[0]:
        raise ValueError(
            f"band transpose shape mismatch: {narrow.shape} against {wide.shape}"
        )
    if col_off < 0 or col_off + narrow.shape[0] > wide.shape[1]:
        raise ValueError(
            f"column band [{col_off}, {col_off + narrow.shape[0]}) does not "
            f"fit a width-{wide.shape[1]} array"
        )


def transpose_into_band(dst: np.ndarray, src: np.ndarray, col_off: int) -> np.ndarray:
    """Write `src` transposed into a column band of `dst`, zeroing the rest.

    Sets ``dst[i, col_off + j] = src[j, i]`` and zeroes every `dst` column
    outside ``[col_off, col_off + src.shape[0])``. `dst` is overwritten
    entirely, so stale contents are harmless.

    Parameters
    ----------
    dst : (R, C) complex128, C-contiguous, written in full
    src : (M, R) complex128
    col_off : int
        First destination column of the band; `col_off + M <= C`.

    Returns
    -------
    `dst`.
    """
    check_band_transpose(dst, src, col_off)
    band = src.shape[0]
    dst[:, :col_off] = 0.0
    dst[:, col_off + band :] = 0.0
    dst[:, col_off : col_off + band] = src.T
    return dst


def transpose_from_band(dst: np.ndarray, src: np.ndarray, col_off: int) -> np.ndarray:
    """Transpose a column band of `src` into `dst`.

    Sets ``dst[i, j] = src[j, col_off + i]``; columns of `src` outside the
    band are ignored.

    Parameters
    ----------
    dst : (M, R) complex128, C-contiguous, written in full
    src : (R, C) complex128
    col_off : int
        First source column of the band; `col_off + M <= C`.

    Returns
    -------
    `dst`.
    """
    check_band_transpose(src, dst, col_off)
    band = dst.shape[0]
    np.copyto(dst, src[:, col_off : col_off + band].T)
    return dst


def modulated_crop(
    buf: np.ndarray,
    row_chirp: np.ndarray,
    col_chirp: np.ndarray,
    scale: complex,
) -> np.ndarray:
    """Crop the centered N_x columns of a row-cropped padded buffer and
    apply the separable output chirp and scalar factor.

    Parameters
    ----------
    buf : (N_y, P_x) complex128, centered-index layout along the second
        axis; rows already restricted to the output band. The column count
        N_x is taken from `col_chirp`, so P_x - N_x must be even.
    row_chirp : (N_y,) complex128
    col_chirp : (N_x,) complex128
    scale : complex scalar

    Returns
    -------
    (N_y, N_x) complex128
    """
    n_x = col_chirp.shape[0]
    core = buf[:, (buf.shape[1] - n_x) // 2 : (buf.shape[1] - n_x) // 2 + n_x]
    return core * (scale * row_chirp)[:, None] * col_chirp[None, :]


def direct_fresnel_sum(
    u: np.ndarray,
    ys: np.ndarray,
    xs: np.ndarray,
    yd: np.ndarray,
    xd: np.ndarray,
    coef: float,
) -> np.ndarray:
    """Literal evaluation of out[p, q] = sum_{n, m} u[n, m] *
    exp(1j * coef * ((yd[p] - ys[n])**2 + (xd[q] - xs[m])**2)).

    No windowing, no FFT; every source sample contributes to every
    destination sample. Used as the independent reference for the
    convolution-based propagator.
    """
    col_phase = np.exp(1j * coef * (xd[:, None] - xs[None, :]) ** 2)  # (Q, M)
    out = np.empty((yd.size, xd.size), dtype=np.complex128)
    for p in range(yd.size):
        weighted = u * np.exp(1j * coef * (yd[p] - ys) ** 2)[:, None]  # (N, M)
        out[p] = np.einsum("qm,nm->q", col_phase, weighted)
    return out


def _valid_corr_2d(img: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Separable valid-mode correlation of `img` with the outer product
    w (x) w; output shape (H - len(w) + 1, W - len(w) + 1)."""
    t = sliding_window_view(img, w.size, axis=1) @ w
    return sliding_window_view(t, w.size, axis=0) @ w


def local_stats(
    x: np.ndarray, y: np.ndarray, w: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Weighted local first and second moments over every fully interior
    window.

    Parameters
    ----------
    x, y : (H, W) float64
    w : (k,) float64, normalized so the separable 2-D window sums to 1.

    Returns
    -------
    (mx, my, mxx, myy, mxy), each (H-k+1, W-k+1): weighted window means of
    x, y, x*x, y*y, x*y.
    """
    return (
        _valid_corr_2d(x, w),
        _valid_corr_2d(y, w),
        _valid_corr_2d(x * x, w),
        _valid_corr_2d(y * y, w),
        _valid_corr_2d(x * y, w),
    )
