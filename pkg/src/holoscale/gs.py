"""Gerchberg-Saxton optimization of a phase hologram against a target image.

Plain error reduction: alternate between the object-plane amplitude
constraint (replace the amplitude with the target, keep the phase) and the
hologram-plane modulation constraint (encode to phase, lift back to unit
amplitude), connected by the scaled propagator and its inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diffraction import PropagationPlan, propagate, propagate_inverse
from .encoding import Encoding, PhaseHologram, encode_bleached, encode_phase_only, lift
from .errors import PlanMismatch
from .field import RealImage, amplitude, field_from_amplitude_and_phase, phase_of
from .phase_init import ConvergentPhaseSpec, convergent_phase, random_phase

__all__ = ["RandomInit", "ConvergentInit", "GsConfig", "GsTrace", "gs_optimize"]


@dataclass(frozen=True)
class RandomInit:
    """Uniform-random initial phase from the given seed."""

    seed: int = 0


@dataclass(frozen=True)
class ConvergentInit:
    """Virtual convergent-illumination initial phase."""

    spec: ConvergentPhaseSpec


@dataclass(frozen=True)
class GsConfig:
    """Optimizer settings.

    iterations = 0 performs the single forward pass and encodes it (the
    non-optimized baseline); record_trace collects one object-plane residual
    per iteration.
    """

    iterations: int = 10
    encoding: Encoding = Encoding.PHASE_ONLY
    initial_phase: RandomInit | ConvergentInit = RandomInit(0)
    record_trace: bool = False

    def __post_init__(self):
        if self.iterations < 0:
            raise ValueError(f"iterations must be >= 0, got {self.iterations}")


@dataclass(frozen=True)
class GsTrace:
    """Per-iteration RMS of (|back-propagated amplitude| - target), measured
    after the hologram constraint and before the amplitude replacement."""

    residuals: tuple[float, ...]


def _initial_phase(cfg: GsConfig, target: RealImage, plan: PropagationPlan) -> np.ndarray:
    init = cfg.initial_phase
    if isinstance(init, RandomInit):
        return random_phase((target.rows, target.cols), init.seed)
    spec = init.spec
    if (spec.rows, spec.cols) != (target.rows, target.cols):
        raise PlanMismatch(
            f"convergent grid {spec.rows}x{spec.cols} != target "
            f"{target.rows}x{target.cols}"
        )
    if not (
        math.isclose(spec.pitch_y, plan.source_pitch_y, rel_tol=1e-9)
        and math.isclose(spec.pitch_x, plan.source_pitch_x, rel_tol=1e-9)
    ):
        raise PlanMismatch(
            f"convergent pitch ({spec.pitch_y}, {spec.pitch_x}) != plan source "
            f"pitch ({plan.source_pitch_y}, {plan.source_pitch_x})"
        )
    return convergent_phase(spec)


def _encode(field, encoding: Encoding) -> PhaseHologram:
    if encoding is Encoding.PHASE_ONLY:
        return encode_phase_only(field)
    return encode_bleached(field)


def gs_optimize(
    target: RealImage, plan: PropagationPlan, cfg: GsConfig
) -> tuple[PhaseHologram, GsTrace]:
    """Optimize a hologram of `target` through `plan`.

    The plan's source side is the object plane (image pitch) and its
    destination the hologram plane. Each iteration: rebuild the object field
    from the target amplitude and the current phase, propagate forward,
    encode and lift (the hologram constraint), back-propagate, and keep the
    phase. The returned hologram is the one encoded in the final iteration;
    with iterations = 0 it is the encoding of the single forward pass.

    Returns
    -------
    (PhaseHologram, GsTrace)
        The trace holds `iterations` residuals when cfg.record_trace is set,
        and is empty otherwise.
    """
    if (target.rows, target.cols) != (plan.rows, plan.cols):
        raise PlanMismatch(
            f"target shape ({target.rows}, {target.cols}) != plan grid "
            f"({plan.rows}, {plan.cols})"
        )
    source_pitch = (plan.source_pitch_y, plan.source_pitch_x)
    phase = _initial_phase(cfg, target, plan)
    residuals: list[float] = []

    if cfg.iterations == 0:
        obj = field_from_amplitude_and_phase(target, phase, source_pitch, plan.wavelength)
        return _encode(propagate(plan, obj), cfg.encoding), GsTrace(())

    holo = None
    for iteration in range(cfg.iterations):
        obj = field_from_amplitude_and_phase(target, phase, source_pitch, plan.wavelength)
        holo = _encode(propagate(plan, obj), cfg.encoding)
        last = iteration + 1 == cfg.iterations
        if last and not cfg.record_trace:
            break
        back = propagate_inverse(plan, lift(holo))
        if cfg.record_trace:
            diff = amplitude(back) - target.pixels
            residuals.append(float(np.sqrt(np.mean(diff * diff))))
        if not last:
            phase = phase_of(back)
    return holo, GsTrace(tuple(residuals))
