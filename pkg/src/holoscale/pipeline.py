"""End-to-end hologram workflows built from the library pieces.

generate: image -> initial phase -> scaled forward propagation -> encode.
reconstruct: hologram -> lift -> inverse propagation -> amplitude image.
zoom_sweep: repeat generation across image/hologram pitch ratios.

The convergent initial phase steers its beam toward a point displaced by
(-offset * z / f) from the axis at the hologram plane, so generation wires
exactly that displacement into the propagation plan's destination shift;
reconstruction reads it back from the hologram sidecar and undoes it. The
default geometry: 1024 samples at 18.7 um (image) onto 3.74 um (hologram),
z = 0.5 m, 532 nm, offsets 20.48 mm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .diffraction import PropagationPlan, make_plan, propagate_inverse
from .encoding import Encoding, PhaseHologram, lift
from .errors import InvalidGeometry
from .field import RealImage, amplitude, normalize_to_u8
from .gs import ConvergentInit, GsConfig, GsTrace, RandomInit, gs_optimize
from .metrics import MetricsReport, compare_images
from .phase_init import ConvergentPhaseSpec, focal_length

__all__ = ["RunConfig", "ZoomPoint", "generate", "gs_run", "reconstruct", "zoom_sweep"]


@dataclass(frozen=True)
class RunConfig:
    """Physical and algorithmic settings of one hologram computation.

    Defaults reproduce the reference bench geometry: 532 nm light, 3.74 um
    hologram pitch, 18.7 um image pitch, 0.5 m propagation, 20.48 mm beam
    offsets, 1024^2 grid.
    """

    wavelength: float = 532e-9
    holo_pitch: float = 3.74e-6
    image_pitch: float = 18.7e-6
    distance: float = 0.5
    offset_x: float = 20.48e-3
    offset_y: float = 20.48e-3
    grid: int = 1024
    encoding: Encoding = Encoding.PHASE_ONLY
    iterations: int = 0
    seed: int = 0
    init: str = "convergent"

    def __post_init__(self):
        if self.init not in ("convergent", "random"):
            raise InvalidGeometry(f"init must be 'convergent' or 'random', got {self.init!r}")
        if self.iterations < 0:
            raise InvalidGeometry(f"iterations must be >= 0, got {self.iterations}")

    @property
    def image_side(self) -> float:
        return self.grid * self.image_pitch

    @property
    def holo_side(self) -> float:
        return self.grid * self.holo_pitch


def convergent_spec(cfg: RunConfig) -> ConvergentPhaseSpec:
    """The convergent illumination implied by the run geometry (focal length
    from the aperture proportion)."""
    f_i = focal_length(cfg.distance, cfg.image_side, cfg.holo_side)
    return ConvergentPhaseSpec(
        focal_length=f_i,
        offset_x=cfg.offset_x,
        offset_y=cfg.offset_y,
        wavelength=cfg.wavelength,
        pitch_y=cfg.image_pitch,
        pitch_x=cfg.image_pitch,
        rows=cfg.grid,
        cols=cfg.grid,
    )


def _dest_shift(cfg: RunConfig) -> tuple[float, float]:
    # The convergent beam crosses the hologram plane centered at
    # -offset * z / f per axis; the destination window tracks it. The random
    # init has no preferred direction, so its window stays on axis.
    if cfg.init != "convergent":
        return (0.0, 0.0)
    f_i = focal_length(cfg.distance, cfg.image_side, cfg.holo_side)
    factor = -cfg.distance / f_i
    return (factor * cfg.offset_y, factor * cfg.offset_x)


def forward_plan(cfg: RunConfig) -> PropagationPlan:
    """Image plane (source) to hologram plane (destination)."""
    return make_plan(
        cfg.distance,
        cfg.image_pitch,
        cfg.holo_pitch,
        cfg.wavelength,
        cfg.grid,
        _dest_shift(cfg),
    )


def _gs_config(cfg: RunConfig, record_trace: bool) -> GsConfig:
    if cfg.init == "convergent":
        initial = ConvergentInit(convergent_spec(cfg))
    else:
        initial = RandomInit(cfg.seed)
    return GsConfig(
        iterations=cfg.iterations,
        encoding=cfg.encoding,
        initial_phase=initial,
        record_trace=record_trace,
    )


def _sidecar_extras(cfg: RunConfig) -> dict[str, str]:
    shift_y, shift_x = _dest_shift(cfg)
    extras = {
        "distance": repr(cfg.distance),
        "image_pitch": repr(cfg.image_pitch),
        "shift_y": repr(shift_y),
        "shift_x": repr(shift_x),
        "init": cfg.init,
        "seed": str(cfg.seed),
        "iterations": str(cfg.iterations),
    }
    if cfg.init == "convergent":
        extras["focal_length"] = repr(
            focal_length(cfg.distance, cfg.image_side, cfg.holo_side)
        )
    return extras


def generate(target: RealImage, cfg: RunConfig) -> tuple[PhaseHologram, dict[str, str]]:
    """Single-pass hologram of `target` (no optimization).

    Returns the hologram and the sidecar metadata that lets
    :func:`reconstruct` rebuild the same geometry. Identical to
    :func:`gs_run` with iterations = 0.
    """
    base = cfg if cfg.iterations == 0 else replace(cfg, iterations=0)
    holo, _trace, meta = gs_run(target, base)
    return holo, meta


def gs_run(target: RealImage, cfg: RunConfig) -> tuple[PhaseHologram, GsTrace, dict[str, str]]:
    """Iterative optimization per `cfg`; returns hologram, residual trace,
    and sidecar metadata."""
    plan = forward_plan(cfg)
    holo, trace = gs_optimize(target, plan, _gs_config(cfg, record_trace=True))
    return holo, trace, _sidecar_extras(cfg)


def reconstruct(
    holo: PhaseHologram,
    meta: dict[str, str],
    *,
    distance: float | None = None,
    image_pitch: float | None = None,
) -> np.ndarray:
    """Numerically replay a hologram back to the image plane.

    Geometry defaults come from the sidecar metadata; `distance` and
    `image_pitch` override it. Returns the 8-bit amplitude image.
    """
    z = distance if distance is not None else float(meta["distance"])
    p_i = image_pitch if image_pitch is not None else float(meta["image_pitch"])
    shift = (float(meta.get("shift_y", "0")), float(meta.get("shift_x", "0")))
    plan = make_plan(
        z,
        p_i,
        (holo.pitch_y, holo.pitch_x),
        holo.wavelength,
        (holo.rows, holo.cols),
        shift,
    )
    back = propagate_inverse(plan, lift(holo))
    return normalize_to_u8(amplitude(back))


@dataclass(frozen=True)
class ZoomPoint:
    """One zoom-sweep row: pitch ratio, its focal length, and the quality of
    the reconstruction against the target."""

    ratio: float
    focal_length: float
    report: MetricsReport
    hologram: PhaseHologram
    reconstruction: np.ndarray
    meta: dict[str, str]


def zoom_sweep(
    target: RealImage, cfg: RunConfig, ratios: list[float]
) -> tuple[list[ZoomPoint], list[tuple[float, str]]]:
    """Generate and score a hologram per image/hologram pitch ratio.

    Each ratio R sets image_pitch = R * holo_pitch (so the reconstruction
    is R times wider than the hologram) and recomputes the focal length.
    Ratios whose geometry is invalid (R <= 0.5 makes the focal proportion
    degenerate) are skipped; the second return value lists (ratio, reason)
    skips.
    """
    points: list[ZoomPoint] = []
    skipped: list[tuple[float, str]] = []
    reference = normalize_to_u8(target.pixels)
    for ratio in ratios:
        run = replace(cfg, image_pitch=ratio * cfg.holo_pitch)
        try:
            f_i = focal_length(run.distance, run.image_side, run.holo_side)
            holo, meta = generate(target, run)
        except InvalidGeometry as exc:
            skipped.append((ratio, str(exc)))
            continue
        recon = reconstruct(holo, meta)
        points.append(
            ZoomPoint(
                ratio=ratio,
                focal_length=f_i,
                report=compare_images(reference, recon),
                hologram=holo,
                reconstruction=recon,
                meta=meta,
            )
        )
    return points, skipped
