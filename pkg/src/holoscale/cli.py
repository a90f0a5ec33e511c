"""Command-line front end.

Commands: generate, gs, reconstruct, metrics, zoom-sweep, goldens. All
physical quantities accept SI unit suffixes (532nm, 3.74um, 0.5m, 20.48mm)
and default to the reference bench geometry. Exit codes: 0 success, 1 usage
error, 2 geometry/validation error, 3 I/O error. Diagnostics go to stderr;
stdout carries only machine-readable results.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np
from PIL import Image

from . import pipeline
from .encoding import Encoding
from .errors import HoloscaleError, InvalidGeometry, IoFailure, PlanMismatch, ShapeMismatch
from .io import emit_goldens, load_image, read_hologram_png, write_hologram_png
from .metrics import compare_images
from .pipeline import RunConfig

__all__ = ["main"]

_USAGE_EXIT = 1
_GEOMETRY_EXIT = 2
_IO_EXIT = 3

_UNIT_SCALE = {
    "nm": 1e-9,
    "um": 1e-6,
    "mm": 1e-3,
    "cm": 1e-2,
    "m": 1.0,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def parse_quantity(text: str) -> float:
    """Parse a length like '3.74um', '532nm', or a bare number in meters."""
    text = text.strip()
    for suffix in ("nm", "um", "mm", "cm", "m"):
        if text.endswith(suffix):
            number = text[: -len(suffix)].strip()
            try:
                return float(number) * _UNIT_SCALE[suffix]
            except ValueError:
                raise _UsageError(f"bad quantity {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise _UsageError(f"bad quantity {text!r}") from None


def _read_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read config file {path}: {exc}") from exc
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _UsageError(f"config file {path}: malformed line {raw!r}")
        entries[key.strip().replace("-", "_")] = value.strip()
    return entries


_QUANTITY_KEYS = ("wavelength", "holo_pitch", "image_pitch", "distance", "offset_x", "offset_y")
_CONFIG_KEYS = _QUANTITY_KEYS + ("grid", "encoding", "iterations", "seed", "init")


def _build_run_config(args, defaults: dict | None = None) -> RunConfig:
    values: dict = dict(defaults or {})
    if getattr(args, "config", None):
        file_entries = _read_config_file(args.config)
        for key, text in file_entries.items():
            if key not in _CONFIG_KEYS:
                raise _UsageError(f"config file: unknown key {key!r}")
            values[key] = text
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    kwargs: dict = {}
    for key, text in values.items():
        if key in _QUANTITY_KEYS:
            kwargs[key] = parse_quantity(str(text))
        elif key in ("grid", "iterations", "seed"):
            try:
                kwargs[key] = int(text)
            except ValueError:
                raise _UsageError(f"bad integer for {key}: {text!r}") from None
        elif key == "encoding":
            try:
                kwargs[key] = Encoding(str(text))
            except ValueError:
                raise _UsageError(
                    f"bad encoding {text!r} (choose phase-only or bleached)"
                ) from None
        elif key == "init":
            kwargs[key] = str(text)
    return RunConfig(**kwargs)


def _add_geometry_flags(sub: argparse.ArgumentParser, with_iterations: bool):
    sub.add_argument("--config", help="key = value config file; flags override it")
    sub.add_argument("--wavelength", help="light wavelength (default 532nm)")
    sub.add_argument("--holo-pitch", dest="holo_pitch", help="hologram pixel pitch (default 3.74um)")
    sub.add_argument("--image-pitch", dest="image_pitch", help="image pixel pitch (default 18.7um)")
    sub.add_argument("--distance", help="propagation distance (default 0.5m)")
    sub.add_argument("--offset-x", dest="offset_x", help="beam offset, x (default 20.48mm)")
    sub.add_argument("--offset-y", dest="offset_y", help="beam offset, y (default 20.48mm)")
    sub.add_argument("--grid", type=int, help="grid size N (default 1024)")
    sub.add_argument("--encoding", choices=[e.value for e in Encoding],
                     help="hologram encoding (default phase-only)")
    sub.add_argument("--seed", type=int, help="random-phase seed (default 0)")
    sub.add_argument("--init", choices=["convergent", "random"],
                     help="initial phase (default convergent)")
    if with_iterations:
        sub.add_argument("--iterations", type=int, help="optimizer iterations (default 10)")


def _load_target(args, cfg: RunConfig):
    return load_image(args.image, size=cfg.grid)


def cmd_generate(args) -> int:
    cfg = _build_run_config(args)
    target = _load_target(args, cfg)
    holo, meta = pipeline.generate(target, cfg)
    write_hologram_png(args.out, holo, meta)
    print(args.out)
    return 0


def cmd_gs(args) -> int:
    cfg = _build_run_config(args, defaults={"iterations": "10", "init": "random"})
    target = _load_target(args, cfg)
    holo, trace, meta = pipeline.gs_run(target, cfg)
    write_hologram_png(args.out, holo, meta)
    trace_path = args.trace or (args.out + ".trace.csv")
    try:
        with open(trace_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "residual"])
            for index, residual in enumerate(trace.residuals, start=1):
                writer.writerow([index, repr(residual)])
    except OSError as exc:
        raise IoFailure(f"cannot write trace {trace_path}: {exc}") from exc
    print(args.out)
    return 0


def cmd_reconstruct(args) -> int:
    holo, meta = read_hologram_png(args.holo)
    distance = parse_quantity(args.distance) if args.distance else None
    image_pitch = parse_quantity(args.image_pitch) if args.image_pitch else None
    if distance is None and "distance" not in meta:
        raise _UsageError(
            "hologram sidecar lacks a distance; pass --distance explicitly"
        )
    if image_pitch is None and "image_pitch" not in meta:
        raise _UsageError(
            "hologram sidecar lacks an image pitch; pass --image-pitch explicitly"
        )
    recon = pipeline.reconstruct(holo, meta, distance=distance, image_pitch=image_pitch)
    try:
        Image.fromarray(recon).save(args.out, format="PNG")
    except OSError as exc:
        raise IoFailure(f"cannot write image {args.out}: {exc}") from exc
    print(args.out)
    return 0


def cmd_metrics(args) -> int:
    reference = np.asarray(np.round(load_image(args.reference).pixels * 255.0), dtype=np.uint8)
    test = np.asarray(np.round(load_image(args.test).pixels * 255.0), dtype=np.uint8)
    report = compare_images(reference, test)
    psnr_text = "inf" if math.isinf(report.psnr_db) else f"{report.psnr_db:.6f}"
    print(f"PSNR [dB]: {psnr_text}")
    print(f"SSIM: {report.ssim:.6f}")
    print(f"PSNR={psnr_text} SSIM={report.ssim:.6f}")
    return 0


def _parse_ratios(text: str) -> list[float]:
    try:
        ratios = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise _UsageError(f"bad ratio list {text!r}") from None
    if not ratios:
        raise _UsageError("empty ratio list")
    return ratios


def cmd_zoom_sweep(args) -> int:
    cfg = _build_run_config(args)
    target = _load_target(args, cfg)
    ratios = _parse_ratios(args.ratios)
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create {out_dir}: {exc}") from exc
    points, skipped = pipeline.zoom_sweep(target, cfg, ratios)
    for ratio, reason in skipped:
        print(f"warning: ratio {ratio:g} skipped: {reason}", file=sys.stderr)
    rows = []
    for point in points:
        tag = f"{point.ratio:g}".replace(".", "p")
        write_hologram_png(out_dir / f"holo_R{tag}.png", point.hologram, point.meta)
        try:
            Image.fromarray(point.reconstruction).save(
                out_dir / f"recon_R{tag}.png", format="PNG"
            )
        except OSError as exc:
            raise IoFailure(f"cannot write reconstruction for R={point.ratio}: {exc}") from exc
        rows.append(
            [
                f"{point.ratio:g}",
                repr(point.focal_length),
                "inf" if math.isinf(point.report.psnr_db) else f"{point.report.psnr_db:.6f}",
                f"{point.report.ssim:.6f}",
            ]
        )
    index_path = out_dir / "index.csv"
    try:
        with open(index_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["ratio", "f_i", "psnr", "ssim"])
            writer.writerows(rows)
    except OSError as exc:
        raise IoFailure(f"cannot write {index_path}: {exc}") from exc
    print(str(index_path))
    return 0


def cmd_goldens(args) -> int:
    manifest = emit_goldens(args.out_dir, seed=args.seed)
    print(str(manifest.root / "manifest.txt"))
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="holoscale", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser("generate", help="single-pass hologram from an image")
    generate.add_argument("--image", required=True, help="target image path")
    generate.add_argument("--out", required=True, help="output hologram PNG path")
    _add_geometry_flags(generate, with_iterations=False)
    generate.set_defaults(func=cmd_generate)

    gs = commands.add_parser("gs", help="iteratively optimized hologram")
    gs.add_argument("--image", required=True, help="target image path")
    gs.add_argument("--out", required=True, help="output hologram PNG path")
    gs.add_argument("--trace", help="residual trace CSV (default <out>.trace.csv)")
    _add_geometry_flags(gs, with_iterations=True)
    gs.set_defaults(func=cmd_gs)

    reconstruct = commands.add_parser("reconstruct", help="replay a hologram to an image")
    reconstruct.add_argument("--holo", required=True, help="hologram PNG path")
    reconstruct.add_argument("--out", required=True, help="output 8-bit PNG path")
    reconstruct.add_argument("--distance", help="override propagation distance")
    reconstruct.add_argument("--image-pitch", dest="image_pitch", help="override image pitch")
    reconstruct.set_defaults(func=cmd_reconstruct)

    metrics = commands.add_parser("metrics", help="PSNR/SSIM of one image against another")
    metrics.add_argument("--reference", required=True)
    metrics.add_argument("--test", required=True)
    metrics.set_defaults(func=cmd_metrics)

    sweep = commands.add_parser("zoom-sweep", help="hologram per pitch ratio + index CSV")
    sweep.add_argument("--image", required=True)
    sweep.add_argument("--out-dir", dest="out_dir", required=True)
    sweep.add_argument(
        "--ratios",
        default="2,2.25,2.5,2.75,3,3.25,3.5,3.75,4,4.25,4.5,4.75,5",
        help="comma-separated image/hologram pitch ratios",
    )
    _add_geometry_flags(sweep, with_iterations=False)
    sweep.set_defaults(func=cmd_zoom_sweep)

    goldens = commands.add_parser("goldens", help="emit the golden-vector suite")
    goldens.add_argument("--out-dir", dest="out_dir", required=True)
    goldens.add_argument("--seed", type=int, default=0)
    goldens.set_defaults(func=cmd_goldens)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except (InvalidGeometry, PlanMismatch, ShapeMismatch, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _GEOMETRY_EXIT
    except IoFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _IO_EXIT
    except HoloscaleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _GEOMETRY_EXIT


if __name__ == "__main__":
    sys.exit(main())
