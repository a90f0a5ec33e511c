"""Command-line interface.

Exit codes: 0 success, 1 operational failure (bad file, failed replay,
engine error), 2 usage error, 3 unexpected internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .dataset import build_dataset, split_paths
from .errors import RefineError
from .evaluate import evaluate_refiner
from .goldens import replay_manifest
from .infer import refine_file
from .training import Geometry, TrainConfig, train


def _geometry_from(args) -> Geometry:
    return Geometry(
        wavelength=args.wavelength,
        holo_pitch=args.holo_pitch,
        image_pitch=args.image_pitch,
        distance=args.distance,
        offset_y=args.offset_y,
        offset_x=args.offset_x,
        grid=args.grid,
    )


def _add_geometry_flags(sub: argparse.ArgumentParser) -> None:
    base = Geometry()
    sub.add_argument("--wavelength", type=float, default=base.wavelength,
                     help="light wavelength, meters")
    sub.add_argument("--holo-pitch", dest="holo_pitch", type=float,
                     default=base.holo_pitch, help="hologram pixel pitch, meters")
    sub.add_argument("--image-pitch", dest="image_pitch", type=float,
                     default=base.image_pitch, help="image pixel pitch, meters")
    sub.add_argument("--distance", type=float, default=base.distance,
                     help="propagation distance, meters")
    sub.add_argument("--offset-y", dest="offset_y", type=float,
                     default=base.offset_y, help="beam offset, y, meters")
    sub.add_argument("--offset-x", dest="offset_x", type=float,
                     default=base.offset_x, help="beam offset, x, meters")
    sub.add_argument("--grid", type=int, default=base.grid, help="grid size N")


def cmd_dataset(args) -> int:
    root = build_dataset(
        args.root,
        counts=(args.train, args.val, args.test),
        size=args.size,
        seed=args.seed,
    )
    print(root)
    return 0


def cmd_replay(args) -> int:
    results = replay_manifest(args.manifest)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(
            f"{res.case_id}: {res.operation} rel_l2={res.rel_l2:.3e} "
            f"tol={res.tolerance:.1e} {status}"
        )
        failed += not res.passed
    print(f"{len(results) - failed}/{len(results)} cases match")
    return 1 if failed else 0


def cmd_train(args) -> int:
    result = train(
        args.dataset,
        args.out,
        args.manifest,
        geometry=_geometry_from(args),
        cfg=TrainConfig(
            batch_size=args.batch_size,
            learning_rate=args.learning_rate,
            max_epochs=args.epochs,
            patience=args.patience,
            seed=args.seed,
        ),
    )
    print(f"epochs run: {result.epochs_run}")
    print(f"baseline val SSIM: {result.baseline_val_ssim:.6f}")
    print(f"best val SSIM: {result.best_val_ssim:.6f} (epoch {result.best_epoch})")
    print(f"metrics: {result.metrics_path}")
    print(result.checkpoint_path)
    return 0


def cmd_infer(args) -> int:
    print(refine_file(args.checkpoint, args.holo, args.out))
    return 0


def cmd_evaluate(args) -> int:
    images = (
        split_paths(args.images_root, args.split)
        if args.images_root
        else [Path(p) for p in args.image]
    )
    result = evaluate_refiner(
        args.checkpoint,
        images,
        args.work_dir,
        gs_iterations=args.gs_iterations,
        seed=args.seed,
        engine=args.engine,
    )
    for score in result.scores:
        print(
            f"{score.image.name}: refined PSNR {score.refined_psnr:.2f} "
            f"SSIM {score.refined_ssim:.4f} | baseline PSNR "
            f"{score.baseline_psnr:.2f} SSIM {score.baseline_ssim:.4f}"
        )
    print(result.summary())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="holorefine",
        description="Neural refinement of computer-generated holograms.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    dataset = commands.add_parser("dataset", help="render a synthetic image corpus")
    dataset.add_argument("--root", required=True, help="output dataset directory")
    dataset.add_argument("--train", type=int, default=200)
    dataset.add_argument("--val", type=int, default=50)
    dataset.add_argument("--test", type=int, default=25)
    dataset.add_argument("--size", type=int, default=256)
    dataset.add_argument("--seed", type=int, default=0)
    dataset.set_defaults(func=cmd_dataset)

    replay = commands.add_parser(
        "replay", help="check the diffraction layer against a golden manifest"
    )
    replay.add_argument("--manifest", required=True, help="golden manifest path")
    replay.set_defaults(func=cmd_replay)

    train_cmd = commands.add_parser("train", help="train the hologram refiner")
    train_cmd.add_argument("--dataset", required=True, help="dataset root directory")
    train_cmd.add_argument("--out", required=True, help="run output directory")
    train_cmd.add_argument(
        "--manifest", required=True,
        help="golden manifest; training refuses to start if replay fails",
    )
    train_cmd.add_argument("--epochs", type=int, default=TrainConfig().max_epochs)
    train_cmd.add_argument("--batch-size", dest="batch_size", type=int,
                           default=TrainConfig().batch_size)
    train_cmd.add_argument("--learning-rate", dest="learning_rate", type=float,
                           default=TrainConfig().learning_rate)
    train_cmd.add_argument("--patience", type=int, default=TrainConfig().patience)
    train_cmd.add_argument("--seed", type=int, default=TrainConfig().seed)
    _add_geometry_flags(train_cmd)
    train_cmd.set_defaults(func=cmd_train)

    infer = commands.add_parser("infer", help="refine one hologram file")
    infer.add_argument("--checkpoint", required=True)
    infer.add_argument("--holo", required=True, help="input hologram PNG")
    infer.add_argument("--out", required=True, help="output hologram PNG")
    infer.set_defaults(func=cmd_infer)

    evaluate = commands.add_parser(
        "evaluate", help="compare refined holograms against the iterative baseline"
    )
    evaluate.add_argument("--checkpoint", required=True)
    group = evaluate.add_mutually_exclusive_group(required=True)
    group.add_argument("--images-root", dest="images_root",
                       help="dataset root; scores one split")
    group.add_argument("--image", action="append", default=[],
                       help="explicit image path (repeatable)")
    evaluate.add_argument("--split", default="test",
                          choices=["train", "val", "test"],
                          help="split under --images-root (default test)")
    evaluate.add_argument("--work-dir", dest="work_dir", required=True,
                          help="directory for holograms and reconstructions")
    evaluate.add_argument("--gs-iterations", dest="gs_iterations", type=int, default=10)
    evaluate.add_argument("--seed", type=int, default=0)
    evaluate.add_argument("--engine", default="holoscale",
                          help="hologram engine executable (default holoscale)")
    evaluate.set_defaults(func=cmd_evaluate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RefineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # pragma: no cover - defensive
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
