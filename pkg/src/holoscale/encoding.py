"""Phase-hologram encodings and the lift back to a unit-amplitude field."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .field import ComplexField, phase_of

__all__ = ["Encoding", "PhaseHologram", "encode_phase_only", "encode_bleached", "lift"]


class Encoding(enum.Enum):
    """How a complex field was reduced to a displayable phase."""

    PHASE_ONLY = "phase-only"
    BLEACHED = "bleached"


@dataclass(frozen=True)
class PhaseHologram:
    """A phase-only modulation pattern with its display geometry.

    Parameters
    ----------
    phase : ndarray
        Phase in radians, shape (rows, cols). PHASE_ONLY holograms carry
        principal values in (-pi, pi]; BLEACHED holograms carry
        alpha * Re(U) in [-pi, pi].
    pitch_y, pitch_x : float
        Modulator pixel pitch, meters.
    wavelength : float
        Design wavelength, meters.
    encoding : Encoding
        Which reduction produced the phase.
    alpha : float or None
        The normalization factor pi / max|Re(U)| used by the bleached
        encoding; None for phase-only.
    """

    phase: np.ndarray
    pitch_y: float
    pitch_x: float
    wavelength: float
    encoding: Encoding
    alpha: float | None = None

    def __post_init__(self):
        phase = np.ascontiguousarray(self.phase, dtype=np.float64)
        if phase.ndim != 2 or phase.shape[0] < 1 or phase.shape[1] < 1:
            raise ValueError(f"phase must be a 2-D array, got shape {phase.shape}")
        if not np.isfinite(phase).all():
            raise ValueError("phase must be finite")
        if not (self.pitch_y > 0.0 and self.pitch_x > 0.0):
            raise ValueError(f"pitches must be positive, got ({self.pitch_y}, {self.pitch_x})")
        if not self.wavelength > 0.0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if self.encoding is Encoding.PHASE_ONLY:
            if phase.min() <= -math.pi or phase.max() > math.pi:
                raise ValueError("phase-only values must lie in (-pi, pi]")
        object.__setattr__(self, "phase", phase)

    @property
    def rows(self) -> int:
        return self.phase.shape[0]

    @property
    def cols(self) -> int:
        return self.phase.shape[1]


def encode_phase_only(field: ComplexField) -> PhaseHologram:
    """Keep only the principal argument of each sample."""
    return PhaseHologram(
        phase=phase_of(field),
        pitch_y=field.pitch_y,
        pitch_x=field.pitch_x,
        wavelength=field.wavelength,
        encoding=Encoding.PHASE_ONLY,
    )


def encode_bleached(field: ComplexField) -> PhaseHologram:
    """Use the real part as the phase, scaled to fill [-pi, pi].

    The raw real part has arbitrary magnitude, so it is normalized by
    alpha = pi / max|Re(U)| before display; a zero real part yields an
    all-zero phase (alpha = 0 recorded).
    """
    re = field.samples.real
    peak = float(np.abs(re).max())
    alpha = math.pi / peak if peak > 0.0 else 0.0
    return PhaseHologram(
        phase=alpha * re,
        pitch_y=field.pitch_y,
        pitch_x=field.pitch_x,
        wavelength=field.wavelength,
        encoding=Encoding.BLEACHED,
        alpha=alpha,
    )


def lift(holo: PhaseHologram) -> ComplexField:
    """Unit-amplitude field exp(1j * phase) on the hologram's grid."""
    return ComplexField(
        np.exp(1j * holo.phase),
        holo.pitch_y,
        holo.pitch_x,
        holo.wavelength,
    )
