"""Bit-exact persistence: complex fields, holograms, images, and golden
vectors shared with other implementations.

Formats (full grammar in docs/formats.md):

* ``.cfld`` — binary complex field: magic "CFLD", version u32 = 1, rows u32,
  cols u32, pitch_y f64, pitch_x f64, wavelength f64, then rows*cols
  interleaved (re, im) f64 pairs, row-major. Everything little-endian.
* hologram ``.png`` — 16-bit grayscale, pixel = round(phase / 2pi * 65535)
  with the phase wrapped to [0, 2pi); geometry and encoding live in a plain
  ``key = value`` sidecar next to the image (``<name>.png.meta``).
* golden manifest — line-oriented text listing operation cases with input /
  expected file paths and tolerances.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np
from PIL import Image, UnidentifiedImageError

from .encoding import Encoding, PhaseHologram
from .errors import (
    BadMagic,
    IoFailure,
    ManifestError,
    MissingSidecar,
    TruncatedPayload,
    UnsupportedFormat,
    UnsupportedVersion,
)
from .field import ComplexField, RealImage

__all__ = [
    "write_field",
    "read_field",
    "write_hologram_png",
    "read_hologram_png",
    "load_image",
    "resize_bilinear",
    "GoldenCase",
    "GoldenManifest",
    "write_manifest",
    "load_manifest",
    "emit_goldens",
]

_MAGIC = b"CFLD"
_VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")
_SIDECAR_FORMAT = "hologram-meta/1"
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# CFLD complex fields


def write_field(path: str | Path, field: ComplexField) -> None:
    """Serialize a field; read_field(write_field(f)) is bit-exact."""
    header = _HEADER.pack(
        _MAGIC,
        _VERSION,
        field.rows,
        field.cols,
        field.pitch_y,
        field.pitch_x,
        field.wavelength,
    )
    payload = np.ascontiguousarray(field.samples, dtype="<c16").tobytes()
    try:
        Path(path).write_bytes(header + payload)
    except OSError as exc:
        raise IoFailure(f"cannot write field file {path}: {exc}") from exc


def read_field(path: str | Path) -> ComplexField:
    """Read a field file written by :func:`write_field`."""
    try:
        blob = Path(path).read_bytes()
    except OSError as exc:
        raise IoFailure(f"cannot read field file {path}: {exc}") from exc
    if len(blob) < 4:
        raise TruncatedPayload(f"{path}: file shorter than the 4-byte signature")
    if blob[:4] != _MAGIC:
        raise BadMagic(f"{path}: expected signature {_MAGIC!r}, found {blob[:4]!r}")
    if len(blob) < _HEADER.size:
        raise TruncatedPayload(f"{path}: header truncated at {len(blob)} bytes")
    _, version, rows, cols, pitch_y, pitch_x, wavelength = _HEADER.unpack_from(blob)
    if version != _VERSION:
        raise UnsupportedVersion(f"{path}: version {version}, this reader knows {_VERSION}")
    expected = 16 * rows * cols
    payload = blob[_HEADER.size :]
    if len(payload) != expected:
        raise TruncatedPayload(
            f"{path}: header declares {rows}x{cols} ({expected} payload bytes), "
            f"found {len(payload)}"
        )
    samples = np.frombuffer(payload, dtype="<c16").reshape(rows, cols)
    return ComplexField(samples, pitch_y, pitch_x, wavelength)


# ---------------------------------------------------------------------------
# Hologram PNG + sidecar

_CORE_KEYS = (
    "format",
    "rows",
    "cols",
    "pitch_y",
    "pitch_x",
    "wavelength",
    "encoding",
    "alpha",
)


def _sidecar_path(png_path: Path) -> Path:
    return png_path.with_name(png_path.name + ".meta")


def write_hologram_png(
    path: str | Path, holo: PhaseHologram, extra: Mapping[str, str] | None = None
) -> None:
    """Write a 16-bit grayscale PNG plus its ``.meta`` sidecar.

    The phase is wrapped to [0, 2pi) and quantized as
    pixel = floor(phase / 2pi * 65535 + 0.5), so phase pi maps to 32768 and
    the worst-case round-trip error is pi/65535 radians. `extra` entries
    (strings) are appended to the sidecar in sorted order; keys must not
    collide with the core geometry keys.
    """
    path = Path(path)
    wrapped = np.mod(holo.phase, _TWO_PI)
    pixels = np.floor(wrapped / _TWO_PI * 65535.0 + 0.5).astype(np.uint16)
    lines = [
        f"format = {_SIDECAR_FORMAT}",
        f"rows = {holo.rows}",
        f"cols = {holo.cols}",
        f"pitch_y = {holo.pitch_y!r}",
        f"pitch_x = {holo.pitch_x!r}",
        f"wavelength = {holo.wavelength!r}",
        f"encoding = {holo.encoding.value}",
    ]
    if holo.alpha is not None:
        lines.append(f"alpha = {holo.alpha!r}")
    for key in sorted(extra or {}):
        if key in _CORE_KEYS:
            raise ValueError(f"extra key {key!r} collides with a core sidecar key")
        value = str(extra[key])
        if "\n" in value:
            raise ValueError(f"extra value for {key!r} must be single-line")
        lines.append(f"{key} = {value}")
    try:
        Image.fromarray(pixels).save(path, format="PNG")
        _sidecar_path(path).write_text("".join(line + "\n" for line in lines))
    except OSError as exc:
        raise IoFailure(f"cannot write hologram {path}: {exc}") from exc


def _parse_sidecar(path: Path) -> dict[str, str]:
    entries: dict[str, str] = {}
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise IoFailure(f"{path}: malformed sidecar line {raw!r}")
        entries[key.strip()] = value.strip()
    return entries


def read_hologram_png(path: str | Path) -> tuple[PhaseHologram, dict[str, str]]:
    """Read a hologram PNG and its sidecar.

    Returns the hologram (phase wrapped to (-pi, pi]) and a dict of the
    sidecar's non-core entries (e.g. reconstruction geometry written by the
    pipeline).
    """
    path = Path(path)
    sidecar = _sidecar_path(path)
    if not sidecar.exists():
        raise MissingSidecar(f"{path}: no metadata record at {sidecar}")
    try:
        entries = _parse_sidecar(sidecar)
        with Image.open(path) as img:
            pixels = np.asarray(img, dtype=np.float64)
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a readable image: {exc}") from exc
    except OSError as exc:
        raise IoFailure(f"cannot read hologram {path}: {exc}") from exc
    if entries.get("format") != _SIDECAR_FORMAT:
        raise UnsupportedVersion(
            f"{sidecar}: format {entries.get('format')!r}, expected {_SIDECAR_FORMAT!r}"
        )
    try:
        rows, cols = int(entries["rows"]), int(entries["cols"])
        pitch_y, pitch_x = float(entries["pitch_y"]), float(entries["pitch_x"])
        wavelength = float(entries["wavelength"])
        encoding = Encoding(entries["encoding"])
    except (KeyError, ValueError) as exc:
        raise IoFailure(f"{sidecar}: bad or missing core entry: {exc}") from exc
    if pixels.shape != (rows, cols):
        raise TruncatedPayload(
            f"{path}: image is {pixels.shape}, sidecar declares ({rows}, {cols})"
        )
    phase = pixels / 65535.0 * _TWO_PI
    phase = np.where(phase > math.pi, phase - _TWO_PI, phase)
    alpha = float(entries["alpha"]) if "alpha" in entries else None
    holo = PhaseHologram(
        phase=phase,
        pitch_y=pitch_y,
        pitch_x=pitch_x,
        wavelength=wavelength,
        encoding=encoding,
        alpha=alpha,
    )
    extras = {k: v for k, v in entries.items() if k not in _CORE_KEYS}
    return holo, extras


# ---------------------------------------------------------------------------
# Grayscale image loading

_LUMA = (0.299, 0.587, 0.114)


def resize_bilinear(pixels: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Bilinear resample of a [0, 1] grayscale array to (rows, cols)."""
    src = Image.fromarray(np.asarray(pixels, dtype=np.float32))
    out = np.asarray(src.resize((cols, rows), Image.Resampling.BILINEAR), dtype=np.float64)
    return np.clip(out, 0.0, 1.0)


def load_image(path: str | Path, size: int | None = None) -> RealImage:
    """Load an image as grayscale in [0, 1].

    8-bit channels scale by 1/255 (16-bit by 1/65535); RGB collapses by the
    luma weights (0.299, 0.587, 0.114). `size` requests a bilinear resize to
    a square size x size grid.
    """
    try:
        with Image.open(path) as img:
            mode = img.mode
            if mode == "P":
                img = img.convert("RGB")
                mode = "RGB"
            elif mode == "LA":
                img = img.convert("L")
                mode = "L"
            elif mode == "RGBA":
                img = img.convert("RGB")
                mode = "RGB"
            if mode == "L":
                pixels = np.asarray(img, dtype=np.float64) / 255.0
            elif mode in ("I;16", "I"):
                pixels = np.asarray(img, dtype=np.float64) / 65535.0
            elif mode == "RGB":
                rgb = np.asarray(img, dtype=np.float64) / 255.0
                pixels = _LUMA[0] * rgb[..., 0] + _LUMA[1] * rgb[..., 1] + _LUMA[2] * rgb[..., 2]
            else:
                raise UnsupportedFormat(f"{path}: unsupported image mode {mode!r}")
    except UnidentifiedImageError as exc:
        raise UnsupportedFormat(f"{path}: not a recognized image file: {exc}") from exc
    except OSError as exc:
        raise IoFailure(f"cannot read image {path}: {exc}") from exc
    pixels = np.clip(pixels, 0.0, 1.0)
    if size is not None:
        pixels = resize_bilinear(pixels, size, size)
    return RealImage(pixels)


# ---------------------------------------------------------------------------
# Golden manifests


@dataclass(frozen=True)
class GoldenCase:
    """One replayable operation: apply `operation` with `params` to the
    field in `input_path` (absent for generator ops) and compare against
    `expect_path` at relative L2 `tolerance`."""

    case_id: str
    operation: str
    input_path: Path | None
    expect_path: Path
    tolerance: float
    params: tuple[tuple[str, str], ...]

    def param(self, key: str) -> str:
        for k, v in self.params:
            if k == key:
                return v
        raise KeyError(key)


@dataclass(frozen=True)
class GoldenManifest:
    """An ordered collection of golden cases rooted at `root`."""

    root: Path
    cases: tuple[GoldenCase, ...]


def write_manifest(path: str | Path, cases: list[GoldenCase]) -> None:
    """Write the line-oriented manifest; paths are stored relative to the
    manifest's directory."""
    path = Path(path)
    root = path.parent
    blocks = []
    for case in cases:
        lines = [f"case {case.case_id}", f"op {case.operation}"]
        if case.input_path is not None:
            lines.append(f"input {case.input_path.relative_to(root).as_posix()}")
        lines.append(f"expect {case.expect_path.relative_to(root).as_posix()}")
        lines.append(f"tol {case.tolerance!r}")
        for key, value in case.params:
            lines.append(f"param {key} {value}")
        blocks.append("".join(line + "\n" for line in lines))
    try:
        path.write_text("# goldens v1\n\n" + "\n".join(blocks))
    except OSError as exc:
        raise IoFailure(f"cannot write manifest {path}: {exc}") from exc


def load_manifest(path: str | Path) -> GoldenManifest:
    """Parse and validate a manifest; every referenced file must exist."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read manifest {path}: {exc}") from exc
    root = path.parent
    cases: list[GoldenCase] = []
    current: dict | None = None

    def finish():
        nonlocal current
        if current is None:
            return
        for required in ("op", "expect", "tol"):
            if required not in current:
                raise ManifestError(
                    f"{path}: case {current['id']!r} missing a {required!r} line"
                )
        cases.append(
            GoldenCase(
                case_id=current["id"],
                operation=current["op"],
                input_path=current.get("input"),
                expect_path=current["expect"],
                tolerance=current["tol"],
                params=tuple(current["params"]),
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
            raise ManifestError(f"{path}: {word!r} line before any 'case' line")
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
                raise ManifestError(f"{path}: bad tolerance {rest!r}") from exc
        elif word == "param":
            key, _, value = rest.partition(" ")
            current["params"].append((key, value.strip()))
        else:
            raise ManifestError(f"{path}: unknown directive {word!r}")
    finish()
    if not cases:
        raise ManifestError(f"{path}: no cases")
    for case in cases:
        for ref in (case.input_path, case.expect_path):
            if ref is not None and not ref.exists():
                raise ManifestError(f"{path}: case {case.case_id!r} references missing {ref}")
    return GoldenManifest(root=root, cases=tuple(cases))


# ---------------------------------------------------------------------------
# Golden suite generation


def _real_field(values: np.ndarray, pitch_y: float, pitch_x: float, wavelength: float):
    return ComplexField(values.astype(np.complex128), pitch_y, pitch_x, wavelength)


def emit_goldens(output_dir: str | Path, seed: int = 0) -> GoldenManifest:
    """Write the fixed golden-vector suite and its manifest.

    Deterministic for a given seed (byte-identical files). The suite covers
    forward/inverse propagation at scale factors {0.2, 1, 2, 5} with open
    and clipped band-limit windows and a shifted window, the convergent
    phase, both encodings, and one 3-iteration optimizer run.
    """
    from .diffraction import make_plan, propagate, propagate_inverse
    from .encoding import encode_bleached, encode_phase_only
    from .gs import GsConfig, RandomInit, gs_optimize
    from .phase_init import ConvergentPhaseSpec, convergent_phase, focal_length

    out = Path(output_dir)
    fields_dir = out / "fields"
    try:
        fields_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create goldens directory {out}: {exc}") from exc

    rng = np.random.Generator(np.random.PCG64(seed))
    wavelength = 532e-9
    n = 32
    p_s = 10e-6
    cases: list[GoldenCase] = []

    def random_field(pitch: float) -> ComplexField:
        samples = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return ComplexField(samples, pitch, pitch, wavelength)

    def add_case(case_id, operation, input_field, expect_field, tol, params):
        input_path = None
        if input_field is not None:
            input_path = fields_dir / f"{case_id}_in.cfld"
            write_field(input_path, input_field)
        expect_path = fields_dir / f"{case_id}_out.cfld"
        write_field(expect_path, expect_field)
        cases.append(
            GoldenCase(
                case_id=case_id,
                operation=operation,
                input_path=input_path,
                expect_path=expect_path,
                tolerance=tol,
                params=tuple((k, str(v)) for k, v in params),
            )
        )

    # Propagation: open window, clipped window (K = 30), shifted window,
    # and the inverse direction, per scale factor.
    for s in (0.2, 1.0, 2.0, 5.0):
        p_d = s * p_s
        tag = f"s{s:g}".replace(".", "p")
        geometries = [
            (f"prop_open_{tag}", 0.015 * s, 0.0, "propagate"),
            (f"prop_clip_{tag}", 0.0115 * s, 0.0, "propagate"),
            (f"prop_shift_{tag}", 0.015 * s, 10.0 * p_d, "propagate"),
            (f"prop_inv_{tag}", 0.015 * s, 0.0, "propagate_inverse"),
        ]
        for case_id, z, shift, op in geometries:
            plan = make_plan(z, p_s, p_d, wavelength, n, shift)
            if op == "propagate":
                field_in = random_field(p_s)
                field_out = propagate(plan, field_in)
            else:
                field_in = random_field(p_d)
                field_out = propagate_inverse(plan, field_in)
            add_case(
                case_id,
                op,
                field_in,
                field_out,
                1e-4,
                [
                    ("distance_z", repr(z)),
                    ("source_pitch", repr(p_s)),
                    ("dest_pitch", repr(p_d)),
                    ("wavelength", repr(wavelength)),
                    ("shift_y", repr(shift)),
                    ("shift_x", repr(shift)),
                    ("band_limit", plan.band_limit_y),
                ],
            )

    # Convergent phase arrays (stored as real-valued fields).
    z0 = 0.03
    pitch_i = 18.7e-6
    side_i, side_h = n * pitch_i, n * pitch_i / 5.0
    f_i = focal_length(z0, side_i, side_h)
    for case_id, (off_y, off_x) in (
        ("convergent_onaxis", (0.0, 0.0)),
        ("convergent_offaxis", (2.4e-4, 3.2e-4)),
    ):
        spec = ConvergentPhaseSpec(
            focal_length=f_i,
            offset_x=off_x,
            offset_y=off_y,
            wavelength=wavelength,
            pitch_y=pitch_i,
            pitch_x=pitch_i,
            rows=n,
            cols=n,
        )
        add_case(
            case_id,
            "convergent_phase",
            None,
            _real_field(convergent_phase(spec), pitch_i, pitch_i, wavelength),
            1e-9,
            [
                ("focal_length", repr(f_i)),
                ("offset_y", repr(off_y)),
                ("offset_x", repr(off_x)),
                ("wavelength", repr(wavelength)),
                ("pitch", repr(pitch_i)),
                ("grid", n),
            ],
        )

    # Encodings on one shared random field.
    enc_input = random_field(p_s)
    phase_only = encode_phase_only(enc_input)
    add_case(
        "encode_phase_only",
        "encode_phase_only",
        enc_input,
        _real_field(phase_only.phase, p_s, p_s, wavelength),
        1e-6,
        [],
    )
    bleached = encode_bleached(enc_input)
    add_case(
        "encode_bleached",
        "encode_bleached",
        enc_input,
        _real_field(bleached.phase, p_s, p_s, wavelength),
        1e-6,
        [("alpha", repr(bleached.alpha))],
    )

    # One short optimizer run: target in, final hologram phase out.
    gs_pitch_i, gs_pitch_h = 50e-6, 10e-6
    gs_z = 0.05
    target_pixels = rng.random((n, n))
    gs_plan = make_plan(gs_z, gs_pitch_i, gs_pitch_h, wavelength, n)
    gs_holo, _ = gs_optimize(
        RealImage(target_pixels),
        gs_plan,
        GsConfig(iterations=3, initial_phase=RandomInit(seed)),
    )
    add_case(
        "gs_three_iterations",
        "gs_optimize",
        _real_field(target_pixels, gs_pitch_i, gs_pitch_i, wavelength),
        _real_field(gs_holo.phase, gs_pitch_h, gs_pitch_h, wavelength),
        1e-4,
        [
            ("distance_z", repr(gs_z)),
            ("source_pitch", repr(gs_pitch_i)),
            ("dest_pitch", repr(gs_pitch_h)),
            ("wavelength", repr(wavelength)),
            ("iterations", 3),
            ("encoding", "phase-only"),
            ("init", "random"),
            ("seed", seed),
            ("band_limit", gs_plan.band_limit_y),
        ],
    )

    manifest_path = out / "manifest.txt"
    write_manifest(manifest_path, cases)
    return load_manifest(manifest_path)
