"""Training loop: U-Net refinement around the differentiable propagator.

Per step: image -> convergent phase -> forward diffraction -> bleached
encoding (the network's input hologram, built once and held constant) ->
U-Net -> lift to unit amplitude -> inverse diffraction -> amplitude ->
SSIM loss against the original image. Only network parameters update; the
diffraction tables are checksummed before and after to prove it.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .dataset import load_split
from .errors import GeometryError, RefineError
from .goldens import assert_goldens
from .layer import ScaledDiffraction
from .optics import convergent_phase, focal_length
from .ssim import SsimParams, ssim
from .unet import PhaseRefiner, UNetSpec, build_unet

__all__ = [
    "Geometry",
    "TrainConfig",
    "TrainResult",
    "HologramPipeline",
    "train",
    "save_checkpoint",
    "load_checkpoint",
]


@dataclass(frozen=True)
class Geometry:
    """Physical settings of the hologram pipeline.

    Defaults are the reference bench geometry scaled to a 256 grid: the
    propagation distance and beam offsets shrink with the grid so the
    Fresnel regime matches the full-size bench.
    """

    wavelength: float = 532e-9
    holo_pitch: float = 3.74e-6
    image_pitch: float = 18.7e-6
    distance: float = 0.125
    offset_y: float = 5.12e-3
    offset_x: float = 5.12e-3
    grid: int = 256

    @property
    def image_side(self) -> float:
        return self.grid * self.image_pitch

    @property
    def holo_side(self) -> float:
        return self.grid * self.holo_pitch

    @property
    def focal(self) -> float:
        return focal_length(self.distance, self.image_side, self.holo_side)


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings: Adam, SSIM loss, early stop on validation
    plateau."""

    batch_size: int = 4
    learning_rate: float = 1e-3
    max_epochs: int = 30
    patience: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise RefineError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0.0:
            raise RefineError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.max_epochs < 1:
            raise RefineError(f"max_epochs must be >= 1, got {self.max_epochs}")
        if self.patience < 1:
            raise RefineError(f"patience must be >= 1, got {self.patience}")


@dataclass(frozen=True)
class TrainResult:
    """What a training run produced."""

    checkpoint_path: Path
    metrics_path: Path
    epochs_run: int
    best_epoch: int
    best_val_ssim: float
    baseline_val_ssim: float
    step0_loss: float


class HologramPipeline:
    """The fixed optical computation wrapped around the network.

    Holds the forward and inverse diffraction layers and the convergent
    illumination phase for one geometry. Input holograms carry no gradient
    (nothing trainable precedes them); the reconstruction path is
    differentiable end to end.
    """

    def __init__(self, geometry: Geometry, dtype: torch.dtype = torch.complex64):
        self.geometry = geometry
        self.forward_layer = ScaledDiffraction(
            geometry.distance,
            geometry.image_pitch,
            geometry.holo_pitch,
            geometry.wavelength,
            geometry.grid,
            (geometry.offset_y, geometry.offset_x),
            dtype=dtype,
        )
        self.inverse_layer = self.forward_layer.inverse()
        phase0 = convergent_phase(
            geometry.grid,
            geometry.grid,
            geometry.image_pitch,
            geometry.image_pitch,
            geometry.offset_y,
            geometry.offset_x,
            geometry.wavelength,
            geometry.focal,
        )
        self.illumination = torch.as_tensor(np.exp(1j * phase0), dtype=dtype)
        self.real_dtype = torch.float32 if dtype == torch.complex64 else torch.float64
        self.ssim_params = SsimParams()

    def checksum(self) -> str:
        return self.forward_layer.checksum() + self.inverse_layer.checksum()

    def input_holograms(self, images: torch.Tensor) -> torch.Tensor:
        """Bleached-encoded holograms of `images` (B, N, N) as normalized
        phase (B, 1, N, N) in [-1, 1]; detached."""
        with torch.no_grad():
            obj = images.to(self.real_dtype) * self.illumination
            at_holo = self.forward_layer(obj)
            re = at_holo.real
            peak = re.abs().amax(dim=(-2, -1), keepdim=True)
            scale = torch.where(peak > 0.0, 1.0 / peak, torch.zeros_like(peak))
            return (re * scale).unsqueeze(1)

    def reconstruction(self, phase_norm: torch.Tensor) -> torch.Tensor:
        """Amplitude at the image plane of the unit-amplitude hologram
        exp(1j * pi * phase_norm); differentiable."""
        phase = math.pi * phase_norm.squeeze(1).to(self.real_dtype)
        lifted = torch.polar(torch.ones_like(phase), phase)
        return self.inverse_layer(lifted).abs()

    def loss(self, phase_norm: torch.Tensor, images: torch.Tensor) -> torch.Tensor:
        """1 - mean SSIM between the reconstructions of `phase_norm` and
        the original images."""
        amp = self.reconstruction(phase_norm)
        peak = amp.amax(dim=(-2, -1), keepdim=True)
        scale = torch.where(peak > 0.0, 255.0 / peak, torch.zeros_like(peak))
        test = (amp * scale).unsqueeze(1)
        ref = (images.to(self.real_dtype) * 255.0).unsqueeze(1)
        return 1.0 - ssim(ref, test, self.ssim_params).mean()

    def mean_ssim(
        self, net: PhaseRefiner | None, inputs: torch.Tensor, images: torch.Tensor, batch: int
    ) -> float:
        """Mean reconstruction SSIM over a split; `net=None` scores the
        unrefined input holograms (the iterations-0 baseline)."""
        total = 0.0
        with torch.no_grad():
            for start in range(0, inputs.shape[0], batch):
                x = inputs[start : start + batch]
                refined = net(x) if net is not None else x
                total += float(
                    (1.0 - self.loss(refined, images[start : start + batch]))
                    * x.shape[0]
                )
        return total / inputs.shape[0]


def save_checkpoint(
    path: str | Path,
    net: PhaseRefiner,
    geometry: Geometry,
    extra: dict | None = None,
) -> None:
    """Persist the network weights with the geometry they were trained
    for."""
    payload = {
        "model_state": net.state_dict(),
        "spec": asdict(net.spec),
        "geometry": asdict(geometry),
    }
    payload.update(extra or {})
    torch.save(payload, path)


def load_checkpoint(path: str | Path) -> tuple[PhaseRefiner, Geometry, dict]:
    """Rebuild a refiner from a checkpoint; returns (net, geometry,
    payload)."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError) as exc:
        raise RefineError(f"cannot load checkpoint {path}: {exc}") from exc
    net = PhaseRefiner(UNetSpec(**payload["spec"]))
    net.load_state_dict(payload["model_state"])
    net.eval()
    return net, Geometry(**payload["geometry"]), payload


def _as_batches(count: int, batch: int, generator: torch.Generator) -> list[torch.Tensor]:
    perm = torch.randperm(count, generator=generator)
    return [perm[start : start + batch] for start in range(0, count, batch)]


def train(
    dataset_root: str | Path,
    out_dir: str | Path,
    goldens_manifest: str | Path,
    geometry: Geometry = Geometry(),
    cfg: TrainConfig = TrainConfig(),
    spec: UNetSpec | None = None,
) -> TrainResult:
    """Train the refiner; refuses to start unless the golden vectors
    replay.

    Writes `metrics.csv` (epoch,train_loss,val_ssim) and `refiner.pt` (the
    best-validation checkpoint) under `out_dir`. Training stops when the
    validation SSIM has not improved for `cfg.patience` epochs or at
    `cfg.max_epochs`.
    """
    assert_goldens(goldens_manifest)

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = spec or UNetSpec(input_size=geometry.grid)
    if spec.input_size != geometry.grid:
        raise GeometryError(
            f"network input size {spec.input_size} != geometry grid {geometry.grid}"
        )

    train_images = torch.as_tensor(load_split(dataset_root, "train"))
    val_images = torch.as_tensor(load_split(dataset_root, "val"))
    for name, images in (("train", train_images), ("val", val_images)):
        if images.shape[-2:] != (geometry.grid, geometry.grid):
            raise GeometryError(
                f"{name} images are {tuple(images.shape[-2:])}, geometry wants "
                f"{(geometry.grid, geometry.grid)}"
            )

    pipeline = HologramPipeline(geometry)
    tables_before = pipeline.checksum()
    train_images = train_images.to(pipeline.real_dtype)
    val_images = val_images.to(pipeline.real_dtype)
    # The input holograms never change (no trainable parameters precede
    # them), so they are encoded once instead of once per epoch.
    train_inputs = pipeline.input_holograms(train_images)
    val_inputs = pipeline.input_holograms(val_images)

    torch.manual_seed(cfg.seed)
    net = build_unet(spec, cfg.seed)
    optimizer = torch.optim.Adam(net.parameters(), lr=cfg.learning_rate)
    shuffler = torch.Generator().manual_seed(cfg.seed)

    eval_batch = max(cfg.batch_size, 8)
    baseline_val = pipeline.mean_ssim(None, val_inputs, val_images, eval_batch)

    checkpoint_path = out_dir / "refiner.pt"
    metrics_path = out_dir / "metrics.csv"
    rows: list[tuple[int, float, float]] = []
    step0_loss = math.nan
    best_val = -math.inf
    best_epoch = 0
    epochs_run = 0

    for epoch in range(1, cfg.max_epochs + 1):
        net.train()
        epoch_losses = []
        for idx in _as_batches(train_inputs.shape[0], cfg.batch_size, shuffler):
            loss = pipeline.loss(net(train_inputs[idx]), train_images[idx])
            if math.isnan(step0_loss):
                step0_loss = float(loss)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            epoch_losses.append(float(loss))
        net.eval()
        val_ssim = pipeline.mean_ssim(net, val_inputs, val_images, eval_batch)
        rows.append((epoch, float(np.mean(epoch_losses)), val_ssim))
        epochs_run = epoch
        if val_ssim > best_val:
            best_val = val_ssim
            best_epoch = epoch
            save_checkpoint(
                checkpoint_path,
                net,
                geometry,
                {
                    "best_val_ssim": best_val,
                    "baseline_val_ssim": baseline_val,
                    "epoch": epoch,
                    "seed": cfg.seed,
                },
            )
        elif epoch - best_epoch >= cfg.patience:
            break

    with open(metrics_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "train_loss", "val_ssim"])
        for epoch, train_loss, val_ssim in rows:
            writer.writerow([epoch, repr(train_loss), repr(val_ssim)])

    if pipeline.checksum() != tables_before:
        raise RefineError("training mutated the diffraction-layer constants")

    return TrainResult(
        checkpoint_path=checkpoint_path,
        metrics_path=metrics_path,
        epochs_run=epochs_run,
        best_epoch=best_epoch,
        best_val_ssim=best_val,
        baseline_val_ssim=baseline_val,
        step0_loss=step0_loss,
    )
