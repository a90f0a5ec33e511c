"""Neural refinement of computer-generated holograms.

A differentiable scaled-diffraction layer, a U-Net phase refiner trained
against reconstruction SSIM, and file-level interoperability with the
`holoscale` hologram engine (complex-field files, 16-bit phase holograms
with sidecars, golden-vector manifests).
"""

from .dataset import build_dataset, load_split, split_paths, synth_image
from .errors import (
    EngineError,
    FormatError,
    GeometryError,
    GoldenReplayFailed,
    RefineError,
)
from .evaluate import EvalResult, ImageScore, evaluate_refiner
from .formats import (
    FieldFile,
    GoldenCase,
    HologramFile,
    load_manifest,
    read_field,
    read_hologram,
    write_field,
    write_hologram,
)
from .goldens import ReplayResult, assert_goldens, replay_case, replay_manifest
from .infer import refine_file, refine_hologram
from .layer import ScaledDiffraction, band_limit
from .optics import (
    convergent_phase,
    encode_bleached,
    encode_phase_only,
    focal_length,
    random_phase,
)
from .ssim import SsimParams, psnr, ssim
from .training import (
    Geometry,
    HologramPipeline,
    TrainConfig,
    TrainResult,
    load_checkpoint,
    save_checkpoint,
    train,
)
from .unet import PhaseRefiner, UNetSpec, build_unet, wrap_normalized

__version__ = "0.1.0"

__all__ = [
    "EngineError",
    "EvalResult",
    "FieldFile",
    "FormatError",
    "Geometry",
    "GeometryError",
    "GoldenCase",
    "GoldenReplayFailed",
    "HologramFile",
    "HologramPipeline",
    "ImageScore",
    "PhaseRefiner",
    "RefineError",
    "ReplayResult",
    "ScaledDiffraction",
    "SsimParams",
    "TrainConfig",
    "TrainResult",
    "UNetSpec",
    "assert_goldens",
    "band_limit",
    "build_dataset",
    "build_unet",
    "convergent_phase",
    "encode_bleached",
    "encode_phase_only",
    "evaluate_refiner",
    "focal_length",
    "load_checkpoint",
    "load_manifest",
    "load_split",
    "psnr",
    "random_phase",
    "read_field",
    "read_hologram",
    "refine_file",
    "refine_hologram",
    "replay_case",
    "replay_manifest",
    "save_checkpoint",
    "split_paths",
    "ssim",
    "synth_image",
    "train",
    "wrap_normalized",
    "write_field",
    "write_hologram",
    "__version__",
]
