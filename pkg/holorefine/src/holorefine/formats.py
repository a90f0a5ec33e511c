"""Readers and writers for the formats shared with the reference engine.

Implemented independently from the published grammar so the two codebases
exchange files without sharing code:

* ``.cfld`` complex fields: magic "CFLD", version u32 = 1, rows u32,
  cols u32, pitch_y f64, pitch_x f64, wavelength f64, then rows*cols
  interleaved (re, im) f64 pairs, row-major, all little-endian.
* hologram ``.png``: 16-bit grayscale, pixel = floor(phase / 2pi * 65535
  + 0.5) with the phase wrapped to [0, 2pi); geometry in a ``key = value``
  sidecar at ``<name>.png.meta``.
* golden manifest: line-oriented case/op/input/expect/tol/param text.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from PIL import Image

from .errors import FormatError

__all__ = [
    "FieldFile",
    "read_field",
    "write_field",
    "HologramFile",
    "read_hologram",
    "write_hologram",
    "GoldenCase",
    "load_manifest",
]

_MAGIC = b"CFLD"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")
_SIDECAR_FORMAT = "hologram-meta/1"
_TWO_PI = 2.0 * math.pi
_CORE_KEYS = ("format", "rows", "cols", "pitch_y", "pitch_x", "wavelength", "encoding", "alpha")


@dataclass(frozen=True)
class FieldFile:
    """A complex field with its sampling geometry.

    Parameters
    ----------
    samples : ndarray
        Complex128 array of shape (rows, cols).
    pitch_y, pitch_x : float
        Sample spacing in meters.
    wavelength : float
        Wavelength in meters.
    """

    samples: np.ndarray
    pitch_y: float
    pitch_x: float
    wavelength: float


def read_field(path: str | Path) -> FieldFile:
    """Read a ``.cfld`` file."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise FormatError(f"cannot read field file {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise FormatError(f"{path}: header truncated at {len(blob)} bytes")
    magic, version, rows, cols, pitch_y, pitch_x, wavelength = _HEADER.unpack_from(blob)
    if magic != _MAGIC:
        raise FormatError(f"{path}: expected signature {_MAGIC!r}, found {magic!r}")
    if version != _VERSION:
        raise FormatError(f"{path}: version {version}, this reader knows {_VERSION}")
    payload = blob[_HEADER.size :]
    expected = 16 * rows * cols
    if len(payload) != expected:
        raise FormatError(
            f"{path}: header declares {rows}x{cols} ({expected} payload bytes), "
            f"found {len(payload)}"
        )
    # Copy out of the read-only buffer so callers get an ordinary array.
    samples = np.frombuffer(payload, dtype="<c16").reshape(rows, cols).copy()
    return FieldFile(samples, pitch_y, pitch_x, wavelength)


def write_field(path: str | Path, field: FieldFile) -> None:
    """Write a ``.cfld`` file; round trips are bit-exact."""
    samples = np.ascontiguousarray(field.samples, dtype="<c16")
    if samples.ndim != 2:
        raise FormatError(f"field samples must be 2-D, got shape {samples.shape}")
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        samples.shape[0],
        samples.shape[1],
        float(field.pitch_y),
        float(field.pitch_x),
        float(field.wavelength),
    )
    try:
        Path(path).write_bytes(header + samples.tobytes())
    except OSError as exc:
        raise FormatError(f"cannot write field file {path}: {exc}") from exc


@dataclass(frozen=True)
class HologramFile:
    """A phase hologram with its display geometry and sidecar extras.

    Parameters
    ----------
    phase : ndarray
        Phase in radians, shape (rows, cols), values in (-pi, pi].
    pitch_y, pitch_x : float
        Modulator pixel pitch, meters.
    wavelength : float
        Design wavelength, meters.
    encoding : str
        ``"phase-only"`` or ``"bleached"``.
    alpha : float or None
        Normalization recorded by the bleached encoding; None otherwise.
    extras : dict
        Non-core sidecar entries (reconstruction geometry and provenance).
    """

    phase: np.ndarray
    pitch_y: float
    pitch_x: float
    wavelength: float
    encoding: str
    alpha: float | None
    extras: dict[str, str]


def _sidecar_path(png_path: Path) -> Path:
    return png_path.with_name(png_path.name + ".meta")


def read_hologram(path: str | Path) -> HologramFile:
    """Read a hologram PNG and its ``.meta`` sidecar."""
    path = Path(path)
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise FormatError(f"{path}: no metadata record at {sidecar}")
    entries: dict[str, str] = {}
    try:
        for raw in sidecar.read_text().splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise FormatError(f"{sidecar}: malformed sidecar line {raw!r}")
            entries[key.strip()] = value.strip()
        with Image.open(path) as img:
            pixels = np.asarray(img, dtype=np.float64)
    except OSError as exc:
        raise FormatError(f"cannot read hologram {path}: {exc}") from exc
    if entries.get("format") != _SIDECAR_FORMAT:
        raise FormatError(
            f"{sidecar}: format {entries.get('format')!r}, expected {_SIDECAR_FORMAT!r}"
        )
    try:
        rows, cols = int(entries["rows"]), int(entries["cols"])
        pitch_y, pitch_x = float(entries["pitch_y"]), float(entries["pitch_x"])
        wavelength = float(entries["wavelength"])
        encoding = entries["encoding"]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{sidecar}: bad or missing core entry: {exc}") from exc
    if pixels.shape != (rows, cols):
        raise FormatError(
            f"{path}: image is {pixels.shape}, sidecar declares ({rows}, {cols})"
        )
    phase = pixels / 65535.0 * _TWO_PI
    phase = np.where(phase > math.pi, phase - _TWO_PI, phase)
    alpha = float(entries["alpha"]) if "alpha" in entries else None
    extras = {k: v for k, v in entries.items() if k not in _CORE_KEYS}
    return HologramFile(phase, pitch_y, pitch_x, wavelength, encoding, alpha, extras)


def write_hologram(
    path: str | Path,
    phase: np.ndarray,
    pitch_y: float,
    pitch_x: float,
    wavelength: float,
    encoding: str,
    alpha: float | None = None,
    extras: Mapping[str, str] | None = None,
) -> None:
    """Write a 16-bit hologram PNG plus its ``.meta`` sidecar.

    Extras are written in sorted key order after the core entries, so the
    same content always produces byte-identical files.
    """
    path = Path(path)
    phase = np.asarray(phase, dtype=np.float64)
    wrapped = np.mod(phase, _TWO_PI)
    pixels = np.floor(wrapped / _TWO_PI * 65535.0 + 0.5).astype(np.uint16)
    lines = [
        f"format = {_SIDECAR_FORMAT}",
        f"rows = {phase.shape[0]}",
        f"cols = {phase.shape[1]}",
        f"pitch_y = {pitch_y!r}",
        f"pitch_x = {pitch_x!r}",
        f"wavelength = {wavelength!r}",
        f"encoding = {encoding}",
    ]
    if alpha is not None:
        lines.append(f"alpha = {alpha!r}")
    for key in sorted(extras or {}):
        if key in _CORE_KEYS:
            raise FormatError(f"extra key {key!r} collides with a core sidecar key")
        value = str(extras[key])
        if "\n" in value:
            raise FormatError(f"extra value for {key!r} must be single-line")
        lines.append(f"{key} = {value}")
    try:
        Image.fromarray(pixels).save(path, format="PNG")
        _sidecar_path(path).write_text("".join(line + "\n" for line in lines))
    except OSError as exc:
        raise FormatError(f"cannot write hologram {path}: {exc}") from exc


@dataclass(frozen=True)
class GoldenCase:
    """One manifest entry: apply `operation` with `params` to `input_path`
    (None for generator ops) and compare against `expect_path` at relative
    L2 `tolerance`."""

    case_id: str
    operation: str
    input_path: Path | None
    expect_path: Path
    tolerance: float
    params: dict[str, str]


def load_manifest(path: str | Path) -> list[GoldenCase]:
    """Parse a ``# goldens v1`` manifest; referenced files must exist."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FormatError(f"cannot read manifest {path}: {exc}") from exc
    root = path.parent
    cases: list[GoldenCase] = []
    current: dict | None = None

    def finish():
        nonlocal current
        if current is None:
            return
        for required in ("op", "expect", "tol"):
            if required not in current:
                raise FormatError(f"{path}: case {current['id']!r} missing a {required!r} line")
        cases.append(
            GoldenCase(
                case_id=current["id"],
                operation=current["op"],
                input_path=current.get("input"),
                expect_path=current["expect"],
                tolerance=current["tol"],
                params=dict(current["params"]),
            )
        )
        current = None

    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        if word == "case":
            finish()
            current = {"id": rest, "params": []}
            continue
        if current is None:
            raise FormatError(f"{path}: {word!r} line before any 'case' line")
        if word == "op":
            current["op"] = rest
        elif word == "input":
            current["input"] = root / rest
        elif word == "expect":
            current["expect"] = root / rest
        elif word == "tol":
            try:
                current["tol"] = float(rest)
            except ValueError as exc:
                raise FormatError(f"{path}: bad tolerance {rest!r}") from exc
        elif word == "param":
            key, _, value = rest.partition(" ")
            current["params"].append((key, value.strip()))
        else:
            raise FormatError(f"{path}: unknown directive {word!r}")
    finish()
    if not cases:
        raise FormatError(f"{path}: no cases")
    for case in cases:
        for ref in (case.input_path, case.expect_path):
            if ref is not None and not ref.exists():
                raise FormatError(f"{path}: case {case.case_id!r} references missing {ref}")
    return cases
