"""Initial-phase generators for the object plane.

Two choices: a virtual convergent spherical illumination, which spreads the
object light over the hologram aperture without the speckle a diffuser
introduces, and the classic uniform-random phase baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGeometry

__all__ = [
    "ConvergentPhaseSpec",
    "focal_length",
    "convergent_phase",
    "random_phase",
]

# The focal point sits beyond the hologram by construction: similar triangles
# between the image aperture and half the hologram aperture fix the ratio.
_HALF = 0.5


@dataclass(frozen=True)
class ConvergentPhaseSpec:
    """Geometry of the virtual convergent illumination at the object plane.

    Parameters
    ----------
    focal_length : float
        Distance from the object plane to the virtual focal point, meters.
    offset_x, offset_y : float
        Lateral displacement of the paraboloid, meters; the vertex moves to
        (-offset_x, -offset_y). Nonzero offsets steer the converged beam off
        the optical axis, away from the non-diffracted light.
    wavelength : float
        Wavelength in meters.
    pitch_y, pitch_x : float
        Object-plane sample spacing, meters.
    rows, cols : int
        Grid dimensions.
    """

    focal_length: float
    offset_x: float
    offset_y: float
    wavelength: float
    pitch_y: float
    pitch_x: float
    rows: int
    cols: int

    def __post_init__(self):
        if not self.focal_length > 0.0:
            raise InvalidGeometry(f"focal_length must be positive, got {self.focal_length}")
        if not self.wavelength > 0.0:
            raise InvalidGeometry(f"wavelength must be positive, got {self.wavelength}")
        if not (self.pitch_y > 0.0 and self.pitch_x > 0.0):
            raise InvalidGeometry(
                f"pitches must be positive, got ({self.pitch_y}, {self.pitch_x})"
            )
        if self.rows < 1 or self.cols < 1:
            raise InvalidGeometry(f"grid must be >= 1x1, got {self.rows}x{self.cols}")


def focal_length(z: float, image_side: float, holo_side: float) -> float:
    """Focal length of the virtual convergent light.

    Solves f / (f - z) = image_side / (0.5 * holo_side): the converging cone
    that fills the image aperture at the object plane has narrowed to half
    the hologram aperture at the hologram plane.

    Parameters
    ----------
    z : float
        Object-to-hologram propagation distance, meters; must be positive.
    image_side, holo_side : float
        Side lengths of the image and hologram apertures, meters.

    Returns
    -------
    float
        f = z * image_side / (image_side - 0.5 * holo_side), meters.

    Raises
    ------
    InvalidGeometry
        If z <= 0, holo_side <= 0, or image_side <= 0.5 * holo_side (the
        proportion degenerates or puts the focus behind the object plane).
    """
    if not z > 0.0:
        raise InvalidGeometry(f"z must be positive, got {z}")
    if not holo_side > 0.0:
        raise InvalidGeometry(f"holo_side must be positive, got {holo_side}")
    if image_side <= _HALF * holo_side:
        raise InvalidGeometry(
            f"image_side ({image_side}) must exceed 0.5 * holo_side "
            f"({_HALF * holo_side}); the focal length would be non-positive"
        )
    return z * image_side / (image_side - _HALF * holo_side)


def convergent_phase(spec: ConvergentPhaseSpec) -> np.ndarray:
    """Phase of the virtual convergent illumination on the object grid.

    phi[m, n] = -pi * ((x + offset_x)**2 + (y + offset_y)**2)
                / (wavelength * focal_length)

    with x = n * pitch_x, y = m * pitch_y on the centered grid. Returned
    unwrapped (values reach ~1e6 rad at full scale); consumers wrap through
    the complex exponential.
    """
    x = (np.arange(spec.cols, dtype=np.float64) - spec.cols // 2) * spec.pitch_x
    y = (np.arange(spec.rows, dtype=np.float64) - spec.rows // 2) * spec.pitch_y
    rsq = (y[:, None] + spec.offset_y) ** 2 + (x[None, :] + spec.offset_x) ** 2
    return -math.pi * rsq / (spec.wavelength * spec.focal_length)


def random_phase(grid: int | tuple[int, int], seed: int) -> np.ndarray:
    """I.i.d. uniform phases on [0, 2*pi) from a seeded PCG64 generator.

    The generator is fixed by name so identical seeds reproduce identical
    arrays across platforms and releases.
    """
    rows, cols = (grid, grid) if isinstance(grid, int) else (int(grid[0]), int(grid[1]))
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.random((rows, cols)) * (2.0 * math.pi)
