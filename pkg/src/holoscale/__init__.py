"""Scaled-diffraction holography toolkit.

Computes phase-only holograms whose reconstructions are larger than the
hologram itself, using band-limited scaled Fresnel propagation with an
optional convergent illumination phase, iterative phase retrieval, and
PSNR/SSIM scoring. Hot kernels run through a compiled extension when it
is available and through pure NumPy otherwise.
"""

from ._kernels import IMPL as kernel_impl
from .diffraction import (
    PropagationPlan,
    inverse_plan,
    make_plan,
    propagate,
    propagate_direct_dft,
    propagate_inverse,
)
from .encoding import Encoding, PhaseHologram, encode_bleached, encode_phase_only, lift
from .errors import (
    BadMagic,
    DegeneratePlan,
    HoloscaleError,
    ImageTooSmall,
    InvalidGeometry,
    IoFailure,
    ManifestError,
    MissingSidecar,
    OracleTooLarge,
    PlanMismatch,
    ShapeMismatch,
    TruncatedPayload,
    UnsupportedFormat,
    UnsupportedVersion,
)
from .field import (
    ComplexField,
    RealImage,
    amplitude,
    field_from_amplitude_and_phase,
    normalize_to_u8,
    phase_of,
)
from .gs import ConvergentInit, GsConfig, GsTrace, RandomInit, gs_optimize
from .io import (
    GoldenCase,
    GoldenManifest,
    emit_goldens,
    load_image,
    load_manifest,
    read_field,
    read_hologram_png,
    resize_bilinear,
    write_field,
    write_hologram_png,
    write_manifest,
)
from .metrics import MetricsReport, SsimParams, compare_images, psnr, ssim
from .phase_init import ConvergentPhaseSpec, convergent_phase, focal_length, random_phase
from .pipeline import (
    RunConfig,
    ZoomPoint,
    convergent_spec,
    forward_plan,
    generate,
    gs_run,
    reconstruct,
    zoom_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BadMagic",
    "ComplexField",
    "ConvergentInit",
    "ConvergentPhaseSpec",
    "DegeneratePlan",
    "Encoding",
    "GoldenCase",
    "GoldenManifest",
    "GsConfig",
    "GsTrace",
    "HoloscaleError",
    "ImageTooSmall",
    "InvalidGeometry",
    "IoFailure",
    "ManifestError",
    "MetricsReport",
    "MissingSidecar",
    "OracleTooLarge",
    "PhaseHologram",
    "PlanMismatch",
    "PropagationPlan",
    "RandomInit",
    "RealImage",
    "RunConfig",
    "ShapeMismatch",
    "SsimParams",
    "TruncatedPayload",
    "UnsupportedFormat",
    "UnsupportedVersion",
    "ZoomPoint",
    "amplitude",
    "compare_images",
    "convergent_phase",
    "convergent_spec",
    "emit_goldens",
    "encode_bleached",
    "encode_phase_only",
    "field_from_amplitude_and_phase",
    "focal_length",
    "forward_plan",
    "generate",
    "gs_optimize",
    "gs_run",
    "inverse_plan",
    "kernel_impl",
    "lift",
    "load_image",
    "load_manifest",
    "make_plan",
    "normalize_to_u8",
    "phase_of",
    "propagate",
    "propagate_direct_dft",
    "propagate_inverse",
    "psnr",
    "random_phase",
    "read_field",
    "read_hologram_png",
    "reconstruct",
    "resize_bilinear",
    "ssim",
    "write_field",
    "write_hologram_png",
    "write_manifest",
    "zoom_sweep",
]
