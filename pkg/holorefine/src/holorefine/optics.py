"""Scalar-optics helpers matching the reference engine's conventions.

These are the non-trainable pieces of the pipeline: the virtual convergent
illumination phase, the seeded random phase, and the two phase encodings.
All of them are pinned by the shared golden vectors.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import GeometryError

__all__ = [
    "focal_length",
    "convergent_phase",
    "random_phase",
    "encode_phase_only",
    "encode_bleached",
]


def focal_length(z: float, image_side: float, holo_side: float) -> float:
    """Focal length of the virtual convergent light.

    Solves f / (f - z) = image_side / (0.5 * holo_side): the converging
    cone that fills the image aperture at the object plane has narrowed to
    half the hologram aperture at the hologram plane.
    """
    if not z > 0.0:
        raise GeometryError(f"z must be positive, got {z}")
    if not holo_side > 0.0:
        raise GeometryError(f"holo_side must be positive, got {holo_side}")
    if image_side <= 0.5 * holo_side:
        raise GeometryError(
            f"image_side ({image_side}) must exceed 0.5 * holo_side "
            f"({0.5 * holo_side}); the focal length would be non-positive"
        )
    return z * image_side / (image_side - 0.5 * holo_side)


def convergent_phase(
    rows: int,
    cols: int,
    pitch_y: float,
    pitch_x: float,
    offset_y: float,
    offset_x: float,
    wavelength: float,
    focal_len: float,
) -> np.ndarray:
    """Phase of the virtual convergent illumination on the object grid.

    phi[m, n] = -pi * ((x + offset_x)**2 + (y + offset_y)**2)
                / (wavelength * focal_len)

    with x = n * pitch_x, y = m * pitch_y on the centered grid. Returned
    unwrapped; consumers wrap through the complex exponential.
    """
    if not focal_len > 0.0:
        raise GeometryError(f"focal length must be positive, got {focal_len}")
    x = (np.arange(cols, dtype=np.float64) - cols // 2) * pitch_x
    y = (np.arange(rows, dtype=np.float64) - rows // 2) * pitch_y
    rsq = (y[:, None] + offset_y) ** 2 + (x[None, :] + offset_x) ** 2
    return -math.pi * rsq / (wavelength * focal_len)


def random_phase(grid: int | tuple[int, int], seed: int) -> np.ndarray:
    """I.i.d. uniform phases on [0, 2*pi) from NumPy's seeded PCG64.

    One `random()` draw of the full grid, exactly as the golden manifest's
    `init random` contract specifies, so seeded replays line up bit for
    bit with the reference engine.
    """
    rows, cols = (grid, grid) if isinstance(grid, int) else (int(grid[0]), int(grid[1]))
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.random((rows, cols)) * (2.0 * math.pi)


def encode_phase_only(samples: np.ndarray) -> np.ndarray:
    """Principal argument in (-pi, pi], with -pi folded to pi and the
    argument of 0 fixed at 0."""
    phase = np.angle(samples)
    phase[phase == -np.pi] = np.pi
    phase[samples == 0] = 0.0
    return phase


def encode_bleached(samples: np.ndarray) -> tuple[np.ndarray, float]:
    """Real part scaled to fill [-pi, pi] by alpha = pi / max|Re(U)|.

    Returns (phase, alpha); a zero real part yields all zeros with
    alpha = 0.
    """
    re = np.asarray(samples).real
    peak = float(np.abs(re).max())
    alpha = math.pi / peak if peak > 0.0 else 0.0
    return alpha * re, alpha
