"""Seeded synthetic image dataset for training the refiner.

Each image is a composition of soft-edged ellipses and rotated bars over a
faint gradient, which gives the optimizer bright structured regions on a
dark background (the regime holographic projection cares about). Every
image is derived from one global index, so the train, validation, and test
splits draw from disjoint random streams by construction.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import RefineError

__all__ = ["synth_image", "build_dataset", "split_paths", "load_split"]

_SPLITS = ("train", "val", "test")


def synth_image(size: int, seed: int, index: int) -> np.ndarray:
    """One synthetic grayscale image in [0, 1], deterministic in
    (size, seed, index)."""
    rng = np.random.Generator(np.random.PCG64(np.uint64(seed) * np.uint64(1_000_003) + index))
    y, x = np.mgrid[0:size, 0:size].astype(np.float64) / size
    gx, gy = rng.uniform(-0.15, 0.15, size=2)
    canvas = np.clip(0.05 + gx * (x - 0.5) + gy * (y - 0.5), 0.0, 0.2)
    soft = 2.5 / size
    for _ in range(rng.integers(3, 9)):
        cx, cy = rng.uniform(0.15, 0.85, size=2)
        amp = rng.uniform(0.35, 1.0)
        if rng.random() < 0.5:
            a, b = rng.uniform(0.04, 0.22, size=2)
            d = np.sqrt(((x - cx) / a) ** 2 + ((y - cy) / b) ** 2)
            shape = np.clip((1.0 - d) / (soft / min(a, b)), 0.0, 1.0)
        else:
            theta = rng.uniform(0.0, np.pi)
            half_l = rng.uniform(0.08, 0.3)
            half_w = rng.uniform(0.015, 0.06)
            u = (x - cx) * np.cos(theta) + (y - cy) * np.sin(theta)
            v = -(x - cx) * np.sin(theta) + (y - cy) * np.cos(theta)
            du = (half_l - np.abs(u)) / soft
            dv = (half_w - np.abs(v)) / soft
            shape = np.clip(np.minimum(du, dv), 0.0, 1.0)
        canvas = np.maximum(canvas, amp * shape)
    return np.clip(canvas, 0.0, 1.0)


def build_dataset(
    root: str | Path,
    counts: tuple[int, int, int] = (200, 50, 25),
    size: int = 256,
    seed: int = 0,
) -> Path:
    """Write the three splits as 8-bit PNGs under `root`.

    Splits take consecutive global indices (train first), so no two splits
    ever share an image. Returns the dataset root.
    """
    root = Path(root)
    index = 0
    for split, count in zip(_SPLITS, counts):
        if count < 1:
            raise RefineError(f"split {split!r} needs at least one image, got {count}")
        split_dir = root / split
        split_dir.mkdir(parents=True, exist_ok=True)
        for _ in range(count):
            pixels = synth_image(size, seed, index)
            path = split_dir / f"{index:05d}.png"
            Image.fromarray(np.floor(pixels * 255.0 + 0.5).astype(np.uint8)).save(path)
            index += 1
    return root


def split_paths(root: str | Path, split: str) -> list[Path]:
    """Sorted PNG paths of one split."""
    if split not in _SPLITS:
        raise RefineError(f"unknown split {split!r}; expected one of {_SPLITS}")
    split_dir = Path(root) / split
    paths = sorted(split_dir.glob("*.png"))
    if not paths:
        raise RefineError(f"no images found in {split_dir}")
    return paths


def load_split(root: str | Path, split: str) -> np.ndarray:
    """All images of a split as one (count, size, size) float64 array in
    [0, 1]."""
    stacks = []
    for path in split_paths(root, split):
        with Image.open(path) as img:
            if img.mode != "L":
                raise RefineError(f"{path}: expected 8-bit grayscale, got mode {img.mode!r}")
            stacks.append(np.asarray(img, dtype=np.float64) / 255.0)
    return np.stack(stacks)
