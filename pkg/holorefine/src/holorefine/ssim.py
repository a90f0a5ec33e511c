"""Differentiable SSIM matching the reference engine's scoring.

Single-scale SSIM over fully interior (valid) window positions with an
11x11 Gaussian window (sigma 1.5), k1 = 0.01, k2 = 0.03, and a dynamic
range of 255. Border pixels that cannot center a full window are excluded
rather than padded, so values line up with the engine's `metrics` command
to float precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F

__all__ = ["SsimParams", "ssim", "psnr"]


@dataclass(frozen=True)
class SsimParams:
    """Parameters of the single-scale SSIM index."""

    window_size: int = 11
    gaussian_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 255.0


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    t = np.arange(size, dtype=np.float64) - half
    w = np.exp(-(t * t) / (2.0 * sigma * sigma))
    return w / w.sum()


def _windowed_mean(images: torch.Tensor, kernel: torch.Tensor) -> torch.Tensor:
    # Separable valid-mode Gaussian filtering; images are (B, 1, H, W).
    k = kernel.shape[-1]
    out = F.conv2d(images, kernel.view(1, 1, 1, k))
    return F.conv2d(out, kernel.view(1, 1, k, 1))


def ssim(
    reference: torch.Tensor, test: torch.Tensor, params: SsimParams = SsimParams()
) -> torch.Tensor:
    """Mean SSIM per image, differentiable in both arguments.

    Parameters
    ----------
    reference, test : Tensor
        Same shape, (H, W) or (B, 1, H, W), values on the scale set by
        `params.dynamic_range` (255 for 8-bit conventions).

    Returns
    -------
    Tensor
        Scalar for 2-D inputs, shape (B,) for batched inputs.
    """
    squeeze = reference.ndim == 2
    if squeeze:
        reference = reference.unsqueeze(0).unsqueeze(0)
        test = test.unsqueeze(0).unsqueeze(0)
    if reference.shape != test.shape:
        raise ValueError(f"reference shape {reference.shape} != test shape {test.shape}")
    k = params.window_size
    if reference.shape[-2] < k or reference.shape[-1] < k:
        raise ValueError(
            f"images of shape {tuple(reference.shape[-2:])} cannot contain a {k}x{k} window"
        )
    kernel = torch.as_tensor(
        _gaussian_window(k, params.gaussian_sigma), dtype=reference.dtype
    )
    mx = _windowed_mean(reference, kernel)
    my = _windowed_mean(test, kernel)
    mxx = _windowed_mean(reference * reference, kernel)
    myy = _windowed_mean(test * test, kernel)
    mxy = _windowed_mean(reference * test, kernel)
    var_x = mxx - mx * mx
    var_y = myy - my * my
    cov = mxy - mx * my
    c1 = (params.k1 * params.dynamic_range) ** 2
    c2 = (params.k2 * params.dynamic_range) ** 2
    per_window = ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / (
        (mx * mx + my * my + c1) * (var_x + var_y + c2)
    )
    value = per_window.mean(dim=(-3, -2, -1))
    return value.squeeze(0) if squeeze else value


def psnr(reference: torch.Tensor, test: torch.Tensor) -> torch.Tensor:
    """Peak signal-to-noise ratio in dB with the peak fixed at 255.

    Accepts (H, W) or (B, 1, H, W); identical images return +inf.
    """
    dims = tuple(range(reference.ndim))[-2:] if reference.ndim == 2 else (-3, -2, -1)
    mse = ((reference - test) ** 2).mean(dim=dims if reference.ndim > 2 else None)
    return 10.0 * torch.log10(255.0 * 255.0 / mse)
