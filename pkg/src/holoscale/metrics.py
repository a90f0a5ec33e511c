"""PSNR and SSIM scoring of 8-bit reconstructions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import _kernels as kernels
from .errors import ImageTooSmall, ShapeMismatch

__all__ = ["SsimParams", "MetricsReport", "psnr", "ssim", "compare_images"]


@dataclass(frozen=True)
class SsimParams:
    """Parameters of the single-scale SSIM index.

    Defaults: 11x11 Gaussian window with sigma 1.5, k1 = 0.01, k2 = 0.03,
    dynamic range 255 (8-bit images).
    """

    window_size: int = 11
    gaussian_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0

    def __post_init__(self):
        if self.window_size < 3 or self.window_size % 2 == 0:
            raise ValueError(f"window_size must be odd and >= 3, got {self.window_size}")
        if not self.gaussian_sigma > 0.0:
            raise ValueError(f"gaussian_sigma must be positive, got {self.gaussian_sigma}")
        if not (self.k1 > 0.0 and self.k2 > 0.0):
            raise ValueError(f"k1 and k2 must be positive, got ({self.k1}, {self.k2})")
        if not self.dynamic_range > 0.0:
            raise ValueError(f"dynamic_range must be positive, got {self.dynamic_range}")


@dataclass(frozen=True)
class MetricsReport:
    """PSNR and SSIM of one reconstruction against its reference."""

    psnr_db: float
    ssim: float
    params: SsimParams = dataclass_field(default_factory=SsimParams)


def _as_float_pair(reference, test) -> tuple[np.ndarray, np.ndarray]:
    ref = np.ascontiguousarray(reference, dtype=np.float64)
    tst = np.ascontiguousarray(test, dtype=np.float64)
    if ref.shape != tst.shape:
        raise ShapeMismatch(f"reference shape {ref.shape} != test shape {tst.shape}")
    if ref.ndim != 2:
        raise ShapeMismatch(f"images must be 2-D, got shape {ref.shape}")
    return ref, tst


def psnr(reference: np.ndarray, test: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB with the peak fixed at 255.

    The peak follows the 8-bit display convention regardless of the arrays'
    actual maxima. Identical images return +inf.
    """
    ref, tst = _as_float_pair(reference, test)
    mse = float(np.mean((ref - tst) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 * 255.0 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    t = np.arange(size, dtype=np.float64) - half
    w = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return w / w.sum()


def ssim(reference: np.ndarray, test: np.ndarray, params: SsimParams = SsimParams()) -> float:
    """Mean single-scale structural similarity over all fully interior
    (valid) window positions, Gaussian-weighted.

    Border pixels that cannot center a full window are excluded rather than
    padded, so the result is independent of any padding convention.
    """
    ref, tst = _as_float_pair(reference, test)
    k = params.window_size
    if ref.shape[0] < k or ref.shape[1] < k:
        raise ImageTooSmall(
            f"images of shape {ref.shape} cannot contain a {k}x{k} window"
        )
    w = _gaussian_window(k, params.gaussian_sigma)
    mx, my, mxx, myy, mxy = kernels.local_stats(ref, tst, w)
    var_x = mxx - mx * mx
    var_y = myy - my * my
    cov = mxy - mx * my
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    per_window = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / (
        (mx * mx + my * my + c1) * (var_x + var_y + c2)
    )
    return float(per_window.mean())


def compare_images(
    reference: np.ndarray, test: np.ndarray, params: SsimParams = SsimParams()
) -> MetricsReport:
    """Score `test` against `reference` with both metrics."""
    return MetricsReport(
        psnr_db=psnr(reference, test), ssim=ssim(reference, test, params), params=params
    )
