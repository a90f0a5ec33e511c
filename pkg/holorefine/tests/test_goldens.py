"""Golden-vector replay against engine-emitted reference files."""

from __future__ import annotations

import numpy as np
import pytest

from holorefine import (
    FieldFile,
    GoldenReplayFailed,
    assert_goldens,
    load_manifest,
    replay_case,
    replay_manifest,
    write_field,
)
from holorefine.goldens import _rel_l2


class TestRelL2:
    def test_zero_error_is_zero(self):
        a = np.ones((3, 3), complex)
        assert _rel_l2(a, a) == 0.0

    def test_scales_by_reference_norm(self):
        expect = np.full((2, 2), 2.0, dtype=complex)
        got = expect + 0.02
        assert _rel_l2(got, expect) == pytest.approx(0.01)

    def test_zero_reference_falls_back_to_absolute_norm(self):
        # A zero expectation cannot scale the error; the absolute residual
        # norm still exceeds any small tolerance.
        assert _rel_l2(np.ones((2, 2), complex), np.zeros((2, 2), complex)) == 2.0

    def test_zero_reference_with_zero_result_is_zero(self):
        zero = np.zeros((2, 2), complex)
        assert _rel_l2(zero, zero) == 0.0


class TestManifestReplay:
    def test_every_case_replays_within_tolerance(self, golden_manifest):
        results = replay_manifest(golden_manifest)
        assert len(results) == len(load_manifest(golden_manifest))
        failing = [r for r in results if not r.passed]
        detail = "\n".join(
            f"{r.case_id}: {r.operation} rel_l2={r.rel_l2:.3e} tol={r.tolerance:.1e}"
            for r in failing
        )
        assert not failing, f"golden cases out of tolerance:\n{detail}"

    def test_replay_covers_every_operation_kind(self, golden_manifest):
        operations = {r.operation for r in replay_manifest(golden_manifest)}
        assert operations >= {
            "propagate",
            "propagate_inverse",
            "convergent_phase",
            "encode_phase_only",
            "encode_bleached",
            "gs_optimize",
        }

    def test_assert_goldens_accepts_a_clean_manifest(self, golden_manifest):
        assert_goldens(golden_manifest)

    def test_assert_goldens_raises_on_corrupted_expectation(
        self, golden_manifest, tmp_path
    ):
        cases = load_manifest(golden_manifest)
        case = next(c for c in cases if c.operation == "propagate")
        # Rewrite one expectation with wrong values, keeping the geometry.
        from holorefine import read_field

        good = read_field(case.expect_path)
        write_field(
            case.expect_path,
            FieldFile(
                good.samples * 1.01, good.pitch_y, good.pitch_x, good.wavelength
            ),
        )
        try:
            with pytest.raises(GoldenReplayFailed, match=case.case_id):
                assert_goldens(golden_manifest)
            bad = replay_case(case)
            assert not bad.passed
            assert bad.rel_l2 == pytest.approx(0.01, rel=0.05)
        finally:
            write_field(case.expect_path, good)
        assert_goldens(golden_manifest)
