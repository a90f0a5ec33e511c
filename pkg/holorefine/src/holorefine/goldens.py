"""Replay of the reference engine's golden vectors.

Every operation the golden manifest can carry is re-executed with this
package's own implementations (the differentiable diffraction layer, the
convergent phase, the encodings, and the optimizer loop) and compared to
the engine's stored output at the manifest's relative-L2 tolerance. This
is the load-bearing cross-component check: training refuses to start until
the full manifest replays clean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .errors import GoldenReplayFailed, RefineError
from .formats import GoldenCase, load_manifest, read_field
from .layer import ScaledDiffraction
from .optics import convergent_phase, encode_bleached, encode_phase_only, random_phase

__all__ = ["ReplayResult", "replay_case", "replay_manifest", "assert_goldens"]


@dataclass(frozen=True)
class ReplayResult:
    """Outcome of replaying one golden case."""

    case_id: str
    operation: str
    rel_l2: float
    tolerance: float
    passed: bool


def _rel_l2(got: np.ndarray, expected: np.ndarray) -> float:
    scale = float(np.linalg.norm(expected))
    if scale == 0.0:
        return float(np.linalg.norm(got))
    return float(np.linalg.norm(got.astype(np.complex128) - expected) / scale)


def _propagation_layer(case: GoldenCase, dtype: torch.dtype) -> ScaledDiffraction:
    p = case.params
    grid = read_field(case.expect_path).samples.shape
    return ScaledDiffraction(
        float(p["distance_z"]),
        float(p["source_pitch"]),
        float(p["dest_pitch"]),
        float(p["wavelength"]),
        grid,
        (float(p.get("shift_y", "0")), float(p.get("shift_x", "0"))),
        dtype=dtype,
    )


def _replay_propagation(case: GoldenCase, dtype: torch.dtype) -> np.ndarray:
    layer = _propagation_layer(case, dtype)
    if case.operation == "propagate_inverse":
        layer = layer.inverse()
    field = torch.as_tensor(read_field(case.input_path).samples, dtype=dtype)
    with torch.no_grad():
        return layer(field).numpy()


def _replay_convergent(case: GoldenCase) -> np.ndarray:
    p = case.params
    n = int(p["grid"])
    pitch = float(p["pitch"])
    return convergent_phase(
        n,
        n,
        pitch,
        pitch,
        float(p["offset_y"]),
        float(p["offset_x"]),
        float(p["wavelength"]),
        float(p["focal_length"]),
    )


def _replay_gs(case: GoldenCase, dtype: torch.dtype) -> np.ndarray:
    p = case.params
    if p.get("init") != "random":
        raise RefineError(f"case {case.case_id!r}: unsupported init {p.get('init')!r}")
    encoding = p.get("encoding", "phase-only")
    target = read_field(case.input_path).samples.real
    grid = target.shape
    forward = ScaledDiffraction(
        float(p["distance_z"]),
        float(p["source_pitch"]),
        float(p["dest_pitch"]),
        float(p["wavelength"]),
        grid,
        dtype=dtype,
    )
    inverse = forward.inverse()
    iterations = int(p["iterations"])
    phase = random_phase(grid, int(p["seed"]))
    holo_phase = None
    with torch.no_grad():
        for iteration in range(iterations):
            obj = torch.as_tensor(target * np.exp(1j * phase), dtype=dtype)
            at_holo = forward(obj).numpy()
            if encoding == "phase-only":
                holo_phase = encode_phase_only(at_holo)
            else:
                holo_phase, _ = encode_bleached(at_holo)
            if iteration + 1 == iterations:
                break
            lifted = torch.as_tensor(np.exp(1j * holo_phase), dtype=dtype)
            phase = encode_phase_only(inverse(lifted).numpy())
    if holo_phase is None:
        raise RefineError(f"case {case.case_id!r}: zero optimizer iterations")
    return holo_phase


def replay_case(case: GoldenCase, dtype: torch.dtype = torch.complex128) -> ReplayResult:
    """Re-execute one golden case and score it against the stored output."""
    if case.operation in ("propagate", "propagate_inverse"):
        got = _replay_propagation(case, dtype)
    elif case.operation == "convergent_phase":
        got = _replay_convergent(case)
    elif case.operation == "encode_phase_only":
        got = encode_phase_only(read_field(case.input_path).samples)
    elif case.operation == "encode_bleached":
        got, alpha = encode_bleached(read_field(case.input_path).samples)
        recorded = case.params.get("alpha")
        if recorded is not None and not math.isclose(
            alpha, float(recorded), rel_tol=1e-9, abs_tol=1e-300
        ):
            return ReplayResult(case.case_id, case.operation, math.inf, case.tolerance, False)
    elif case.operation == "gs_optimize":
        got = _replay_gs(case, dtype)
    else:
        raise RefineError(f"case {case.case_id!r}: unknown operation {case.operation!r}")
    rel = _rel_l2(np.asarray(got), read_field(case.expect_path).samples)
    return ReplayResult(case.case_id, case.operation, rel, case.tolerance, rel <= case.tolerance)


def replay_manifest(
    manifest_path: str | Path, dtype: torch.dtype = torch.complex128
) -> list[ReplayResult]:
    """Replay every case in a manifest, in manifest order."""
    return [replay_case(case, dtype) for case in load_manifest(manifest_path)]


def assert_goldens(manifest_path: str | Path, dtype: torch.dtype = torch.complex128) -> None:
    """Raise :class:`GoldenReplayFailed` unless every case passes."""
    results = replay_manifest(manifest_path, dtype)
    failed = [r for r in results if not r.passed]
    if failed:
        detail = ", ".join(f"{r.case_id} (rel {r.rel_l2:.3e} > {r.tolerance:g})" for r in failed)
        raise GoldenReplayFailed(f"{len(failed)} of {len(results)} golden cases failed: {detail}")
