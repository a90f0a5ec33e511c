"""Apply a trained refiner to hologram files.

Reads a 16-bit phase hologram plus sidecar, runs the network on the
normalized phase, and writes the refined phase-only hologram with the
geometry metadata preserved, so downstream reconstruction tools keep
working on the output unchanged. Inference is deterministic: the same
checkpoint and input produce byte-identical output files.
"""

from __future__ import annotations

import math
from pathlib import Path

import torch

from .errors import GeometryError
from .formats import read_hologram, write_hologram
from .training import load_checkpoint
from .unet import PhaseRefiner

__all__ = ["refine_hologram", "refine_file"]


def refine_hologram(
    net: PhaseRefiner, input_path: str | Path, output_path: str | Path
) -> Path:
    """Refine the hologram at `input_path` with `net`; write the result to
    `output_path` (PNG plus sidecar). Returns the output path."""
    holo = read_hologram(input_path)
    rows, cols = holo.phase.shape
    stride = 2**net.spec.pool_stages
    if rows % stride or cols % stride:
        raise GeometryError(
            f"hologram grid ({rows}, {cols}) not divisible by the network's "
            f"downsampling stride {stride}"
        )
    net.eval()
    with torch.no_grad():
        x = torch.as_tensor(holo.phase / math.pi, dtype=torch.float32)
        refined = net(x.unsqueeze(0).unsqueeze(0)).squeeze(0).squeeze(0)
    output_path = Path(output_path)
    write_hologram(
        output_path,
        math.pi * refined.double().numpy(),
        holo.pitch_y,
        holo.pitch_x,
        holo.wavelength,
        "phase-only",
        extras=holo.extras,
    )
    return output_path


def refine_file(
    checkpoint: str | Path, input_path: str | Path, output_path: str | Path
) -> Path:
    """Load `checkpoint` and refine one hologram file."""
    net, _, _ = load_checkpoint(checkpoint)
    return refine_hologram(net, input_path, output_path)
