"""Sampled wavefronts, intensity images, and elementary conversions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch

__all__ = [
    "ComplexField",
    "RealImage",
    "field_from_amplitude_and_phase",
    "amplitude",
    "phase_of",
    "normalize_to_u8",
]


def _as_pitch_pair(pitch: float | tuple[float, float]) -> tuple[float, float]:
    if isinstance(pitch, tuple):
        py, px = pitch
    else:
        py = px = pitch
    return float(py), float(px)


@dataclass(frozen=True)
class ComplexField:
    """A complex wavefront sampled on a uniform rectangular grid.

    Parameters
    ----------
    samples : ndarray
        Complex amplitudes, shape (rows, cols), row-major. Stored as
        complex128; quadratic phase arguments in this package reach ~1e6 rad,
        which single precision cannot carry.
    pitch_y, pitch_x : float
        Sample spacing in meters along rows and columns. Must be positive.
    wavelength : float
        Illumination wavelength in meters. Must be positive.
    """

    samples: np.ndarray
    pitch_y: float
    pitch_x: float
    wavelength: float

    def __post_init__(self):
        samples = np.ascontiguousarray(self.samples, dtype=np.complex128)
        if not samples.flags.writeable:
            # np.frombuffer products are read-only; the compute kernels take
            # typed memoryviews, which require a writable buffer.
            samples = samples.copy()
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 1:
            raise ValueError(f"samples must be a 2-D array, got shape {samples.shape}")
        if not np.isfinite(samples.view(np.float64)).all():
            raise ValueError("samples must be finite")
        if not (self.pitch_y > 0.0 and self.pitch_x > 0.0):
            raise ValueError(f"pitches must be positive, got ({self.pitch_y}, {self.pitch_x})")
        if not self.wavelength > 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        object.__setattr__(self, "samples", samples)

    @property
    def rows(self) -> int:
        return self.samples.shape[0]

    @property
    def cols(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class RealImage:
    """A grayscale intensity image with pixel values in [0, 1].

    Parameters
    ----------
    pixels : ndarray
        Float64 array of shape (rows, cols); every value in [0, 1].
    """

    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.ascontiguousarray(self.pixels, dtype=np.float64)
        if pixels.ndim != 2 or pixels.shape[0] < 1 or pixels.shape[1] < 1:
            raise ValueError(f"pixels must be a 2-D array, got shape {pixels.shape}")
        if not np.isfinite(pixels).all():
            raise ValueError("pixels must be finite")
        if pixels.min() < 0.0 or pixels.max() > 1.0:
            raise ValueError("pixels must lie in [0, 1]")
        object.__setattr__(self, "pixels", pixels)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


def field_from_amplitude_and_phase(
    amplitude: np.ndarray | RealImage,
    phase: np.ndarray,
    pitch: float | tuple[float, float],
    wavelength: float,
) -> ComplexField:
    """Build ``amplitude * exp(1j * phase)`` as a :class:`ComplexField`.

    Parameters
    ----------
    amplitude : ndarray or RealImage
        Real array (or image) of the same shape as `phase`.
    phase : ndarray
        Phase in radians.
    pitch : float or (pitch_y, pitch_x)
        Sample spacing in meters; a scalar applies to both axes.
    wavelength : float
        Wavelength in meters.
    """
    if isinstance(amplitude, RealImage):
        amplitude = amplitude.pixels
    amp = np.asarray(amplitude, dtype=np.float64)
    ph = np.asarray(phase, dtype=np.float64)
    if amp.shape != ph.shape:
        raise ShapeMismatch(f"amplitude shape {amp.shape} != phase shape {ph.shape}")
    py, px = _as_pitch_pair(pitch)
    return ComplexField(amp * np.exp(1j * ph), py, px, float(wavelength))


def amplitude(field: ComplexField) -> np.ndarray:
    """Pointwise magnitude of the field's samples, shape (rows, cols)."""
    return np.abs(field.samples)


def phase_of(field: ComplexField | np.ndarray) -> np.ndarray:
    """Pointwise argument in (-pi, pi], with the argument of 0 fixed at 0.

    ``np.angle`` returns -pi for negative-real inputs and can return -pi or
    a sign-dependent value at zeros; both are folded back so every output
    obeys the half-open convention.
    """
    samples = field.samples if isinstance(field, ComplexField) else np.asarray(field)
    ph = np.angle(samples)
    ph[ph == -np.pi] = np.pi
    ph[samples == 0] = 0.0
    return ph


def normalize_to_u8(values: np.ndarray) -> np.ndarray:
    """Scale a non-negative array so its maximum maps to 255, rounding half
    up; an all-zero (or non-positive-max) input maps to all zeros."""
    values = np.asarray(values, dtype=np.float64)
    peak = values.max() if values.size else 0.0
    if not peak > 0.0:
        return np.zeros(values.shape, dtype=np.uint8)
    scaled = np.floor(values / peak * 255.0 + 0.5)
    return np.clip(scaled, 0.0, 255.0).astype(np.uint8)
