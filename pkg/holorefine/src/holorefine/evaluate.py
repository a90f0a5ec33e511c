"""Comparative evaluation through the reference engine's command line.

The refiner is judged end to end by the external `holoscale` tool: the
input holograms come from its `generate` command, reconstructions from its
`reconstruct` command, and scores from its `metrics` command. None of this
package's own math sits on the scoring path, so the comparison cannot
flatter the network.
"""

from __future__ import annotations

import re
import statistics
import subprocess
from dataclasses import dataclass
from pathlib import Path

from .errors import EngineError
from .infer import refine_hologram
from .training import Geometry, load_checkpoint

__all__ = [
    "run_engine",
    "parse_metrics",
    "geometry_flags",
    "ImageScore",
    "EvalResult",
    "evaluate_refiner",
]

_METRICS_LINE = re.compile(r"^PSNR=(\S+) SSIM=(\S+)$", re.MULTILINE)


def run_engine(args: list[str], engine: str = "holoscale") -> str:
    """Run one engine command; returns stdout, raises EngineError on any
    failure."""
    try:
        proc = subprocess.run(
            [engine, *args], capture_output=True, text=True, check=False
        )
    except FileNotFoundError as exc:
        raise EngineError(
            f"engine executable {engine!r} not found; install the hologram "
            "engine so its CLI is on PATH"
        ) from exc
    if proc.returncode != 0:
        detail = proc.stderr.strip() or proc.stdout.strip()
        raise EngineError(
            f"{engine} {' '.join(args[:2])} exited {proc.returncode}: {detail}"
        )
    return proc.stdout


def parse_metrics(stdout: str) -> tuple[float, float]:
    """Extract (psnr_db, ssim) from `metrics` output; PSNR may be inf."""
    matches = _METRICS_LINE.findall(stdout)
    if not matches:
        raise EngineError(f"no PSNR=... SSIM=... line in engine output: {stdout!r}")
    psnr_text, ssim_text = matches[-1]
    return float(psnr_text), float(ssim_text)


def geometry_flags(geometry: Geometry) -> list[str]:
    """The engine flags that pin `geometry` (its own defaults are a larger
    bench)."""
    return [
        "--wavelength", repr(geometry.wavelength),
        "--holo-pitch", repr(geometry.holo_pitch),
        "--image-pitch", repr(geometry.image_pitch),
        "--distance", repr(geometry.distance),
        "--offset-y", repr(geometry.offset_y),
        "--offset-x", repr(geometry.offset_x),
        "--grid", str(geometry.grid),
    ]


@dataclass(frozen=True)
class ImageScore:
    """Scores of both pipelines on one held-out image."""

    image: Path
    refined_psnr: float
    refined_ssim: float
    baseline_psnr: float
    baseline_ssim: float


@dataclass(frozen=True)
class EvalResult:
    """Held-out comparison of the refiner against the iterative baseline."""

    scores: list[ImageScore]
    refined_mean_psnr: float
    refined_mean_ssim: float
    baseline_mean_psnr: float
    baseline_mean_ssim: float

    @property
    def refiner_wins(self) -> bool:
        """True when the refined holograms beat the baseline on both mean
        metrics."""
        return (
            self.refined_mean_psnr > self.baseline_mean_psnr
            and self.refined_mean_ssim > self.baseline_mean_ssim
        )

    def summary(self) -> str:
        return (
            f"refined  mean PSNR {self.refined_mean_psnr:.2f} dB, "
            f"mean SSIM {self.refined_mean_ssim:.4f}\n"
            f"baseline mean PSNR {self.baseline_mean_psnr:.2f} dB, "
            f"mean SSIM {self.baseline_mean_ssim:.4f}\n"
            f"refiner wins on both: {self.refiner_wins}"
        )


def _score_one(
    image: Path,
    work_dir: Path,
    net,
    geometry: Geometry,
    gs_iterations: int,
    seed: int,
    engine: str,
) -> ImageScore:
    stem = image.stem
    input_holo = work_dir / f"{stem}_input.png"
    refined_holo = work_dir / f"{stem}_refined.png"
    baseline_holo = work_dir / f"{stem}_gs.png"
    refined_recon = work_dir / f"{stem}_refined_recon.png"
    baseline_recon = work_dir / f"{stem}_gs_recon.png"

    # Unrefined hologram from the engine: one forward pass, convergent
    # illumination, bleached encoding.
    run_engine(
        [
            "generate",
            "--image", str(image),
            "--out", str(input_holo),
            "--init", "convergent",
            "--encoding", "bleached",
            *geometry_flags(geometry),
        ],
        engine,
    )
    refine_hologram(net, input_holo, refined_holo)

    # Iterative baseline from the engine: random initial phase, phase-only
    # encoding, `gs_iterations` rounds.
    run_engine(
        [
            "gs",
            "--image", str(image),
            "--out", str(baseline_holo),
            "--init", "random",
            "--encoding", "phase-only",
            "--iterations", str(gs_iterations),
            "--seed", str(seed),
            "--trace", str(work_dir / f"{stem}_gs.trace.csv"),
            *geometry_flags(geometry),
        ],
        engine,
    )

    run_engine(
        ["reconstruct", "--holo", str(refined_holo), "--out", str(refined_recon)],
        engine,
    )
    run_engine(
        ["reconstruct", "--holo", str(baseline_holo), "--out", str(baseline_recon)],
        engine,
    )
    refined = parse_metrics(
        run_engine(
            ["metrics", "--reference", str(image), "--test", str(refined_recon)],
            engine,
        )
    )
    baseline = parse_metrics(
        run_engine(
            ["metrics", "--reference", str(image), "--test", str(baseline_recon)],
            engine,
        )
    )
    return ImageScore(image, refined[0], refined[1], baseline[0], baseline[1])


def evaluate_refiner(
    checkpoint: str | Path,
    images: list[Path],
    work_dir: str | Path,
    gs_iterations: int = 10,
    seed: int = 0,
    engine: str = "holoscale",
) -> EvalResult:
    """Score DNN-refined holograms against the engine's iterative
    optimizer on `images`, all through the engine CLI.

    Each image is scored independently; the baseline's random initial
    phase uses `seed + image index` so runs are reproducible without
    reusing one phase screen.
    """
    if not images:
        raise EngineError("no evaluation images given")
    net, geometry, _ = load_checkpoint(checkpoint)
    work_dir = Path(work_dir)
    work_dir.mkdir(parents=True, exist_ok=True)
    scores = [
        _score_one(
            Path(image), work_dir, net, geometry, gs_iterations, seed + i, engine
        )
        for i, image in enumerate(images)
    ]
    return EvalResult(
        scores=scores,
        refined_mean_psnr=statistics.fmean(s.refined_psnr for s in scores),
        refined_mean_ssim=statistics.fmean(s.refined_ssim for s in scores),
        baseline_mean_psnr=statistics.fmean(s.baseline_psnr for s in scores),
        baseline_mean_ssim=statistics.fmean(s.baseline_ssim for s in scores),
    )
