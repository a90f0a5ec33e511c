"""Wall-clock comparison of the compiled kernels against the NumPy fallback.

Per-kernel timings call both implementations directly in this process.
End-to-end timings (one scaled propagation, one SSIM scoring) respawn the
script with HOLOSCALE_PURE toggled so each backend is exercised through the
normal import-time dispatch.

Usage::

    python benchmarks/bench_kernels.py [--grid N] [--reps R] [--kernels-only]
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from holoscale._kernels import _numpy as npk

try:
    from holoscale._kernels import _fast as fastk
except ImportError:
    fastk = None


def best_ms(action, reps: int) -> float:
    """Best wall-clock time of `action` over `reps` calls, in milliseconds."""
    best = float("inf")
    for _ in range(reps):
        started = time.perf_counter()
        action()
        best = min(best, time.perf_counter() - started)
    return best * 1e3


def chirp(n: int, c: float) -> np.ndarray:
    k = np.arange(n, dtype=np.float64) - n // 2
    return np.exp(1j * c * k**2)


def kernel_rows(grid: int, reps: int):
    """Yield (name, numpy_ms, fast_ms) per kernel at hot-path shapes.

    Shapes mirror one scaled propagation at `grid`: the padded buffer is
    2x the field per axis and the transposes move the central row band.
    """
    rng = np.random.default_rng(0)
    pad = 2 * grid
    u = rng.standard_normal((grid, grid)) + 1j * rng.standard_normal((grid, grid))
    row_c, col_c = chirp(grid, 1.3e-5), chirp(grid, 2.1e-5)
    kern_y, kern_x = chirp(pad, 0.7e-5), chirp(pad, 0.9e-5)
    scratch = np.zeros((pad, pad), dtype=np.complex128)
    spectrum = rng.standard_normal((pad, pad)) + 1j * rng.standard_normal((pad, pad))
    narrow = np.ascontiguousarray(spectrum[: pad // 2])
    half = np.ascontiguousarray(spectrum[: pad // 2])
    wide = spectrum
    off = (pad - narrow.shape[0]) // 2
    x = rng.random((grid, grid))
    y = rng.random((grid, grid))
    w = np.exp(-((np.arange(11) - 5.0) ** 2) / (2 * 1.5**2))
    w /= w.sum()

    cases = [
        ("padded_source (fresh)", lambda m: m.padded_source(u, row_c, col_c)),
        (
            "padded_source (reused)",
            lambda m: m.padded_source(u, row_c, col_c, (pad, pad), out=scratch),
        ),
        ("apply_kernel", lambda m: m.apply_kernel(spectrum, kern_y, kern_x)),
        ("transpose_into_band", lambda m: m.transpose_into_band(wide, narrow, off)),
        ("transpose_from_band", lambda m: m.transpose_from_band(half, wide, off)),
        ("modulated_crop", lambda m: m.modulated_crop(narrow, chirp(pad // 2, 1e-5), col_c, 0.7 - 0.2j)),
        ("local_stats (ssim)", lambda m: m.local_stats(x, y, w)),
    ]
    for name, call in cases:
        n_ms = best_ms(lambda: call(npk), reps)
        f_ms = best_ms(lambda: call(fastk), reps) if fastk is not None else float("nan")
        yield name, n_ms, f_ms


def end_to_end(grid: int, reps: int) -> tuple[float, float]:
    """Time one scaled propagation and one SSIM scoring at `grid`."""
    from holoscale import ComplexField, make_plan, propagate, ssim

    scale = grid / 1024.0
    plan = make_plan(
        0.5 * scale, 18.7e-6, 3.74e-6, 532e-9, grid, 20.48e-3 * scale
    )
    rng = np.random.default_rng(1)
    samples = rng.standard_normal((grid, grid)) + 1j * rng.standard_normal((grid, grid))
    field = ComplexField(samples, 18.7e-6, 18.7e-6, 532e-9)
    propagate(plan, field)
    prop_ms = best_ms(lambda: propagate(plan, field), reps)
    a = rng.integers(0, 256, size=(grid, grid), dtype=np.uint8)
    b = np.clip(a.astype(np.int16) + rng.integers(-9, 10, size=a.shape), 0, 255).astype(np.uint8)
    ssim_ms = best_ms(lambda: ssim(a, b), reps)
    return prop_ms, ssim_ms


def spawn_end_to_end(grid: int, reps: int, pure: bool) -> tuple[float, float]:
    env = dict(os.environ, HOLOSCALE_PURE="1" if pure else "0")
    out = subprocess.run(
        [sys.executable, __file__, "--grid", str(grid), "--reps", str(reps), "--end-to-end-child"],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    prop_ms, ssim_ms = map(float, out.stdout.split())
    return prop_ms, ssim_ms


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--grid", type=int, default=1024, help="field size per axis")
    parser.add_argument("--reps", type=int, default=5, help="repetitions per timing (best kept)")
    parser.add_argument("--kernels-only", action="store_true", help="skip the end-to-end section")
    parser.add_argument("--end-to-end-child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.end_to_end_child:
        prop_ms, ssim_ms = end_to_end(args.grid, args.reps)
        print(prop_ms, ssim_ms)
        return

    if fastk is None:
        print("compiled extension not built; timing the NumPy fallback only", file=sys.stderr)
    print(f"grid {args.grid}, padded {2 * args.grid}, best of {args.reps}")
    header = f"{'kernel':<24}{'numpy ms':>10}{'compiled ms':>13}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, n_ms, f_ms in kernel_rows(args.grid, args.reps):
        ratio = f"{n_ms / f_ms:8.2f}x" if f_ms == f_ms else "      --"
        print(f"{name:<24}{n_ms:>10.2f}{f_ms:>13.2f}{ratio}")

    if args.kernels_only:
        return
    print()
    print(f"{'end to end':<24}{'numpy ms':>10}{'compiled ms':>13}{'speedup':>9}")
    print("-" * len(header))
    rows = [("scaled propagation", 0), ("ssim scoring", 1)]
    pure_times = spawn_end_to_end(args.grid, args.reps, pure=True)
    fast_times = (
        spawn_end_to_end(args.grid, args.reps, pure=False)
        if fastk is not None
        else (float("nan"),) * 2
    )
    for name, idx in rows:
        n_ms, f_ms = pure_times[idx], fast_times[idx]
        ratio = f"{n_ms / f_ms:8.2f}x" if f_ms == f_ms else "      --"
        print(f"{name:<24}{n_ms:>10.2f}{f_ms:>13.2f}{ratio}")


if __name__ == "__main__":
    main()
