"""Gerchberg-Saxton optimizer: trace semantics, determinism, validation."""

import numpy as np
import pytest

from holo_support import desk_cfg, desk_images
from holoscale import (
    ConvergentInit,
    ConvergentPhaseSpec,
    Encoding,
    GsConfig,
    PlanMismatch,
    RandomInit,
    RealImage,
    encode_phase_only,
    field_from_amplitude_and_phase,
    focal_length,
    gs_optimize,
    gs_run,
    make_plan,
    propagate,
    random_phase,
)

_WL = 532e-9
_PITCH_I = 50e-6
_PITCH_H = 10e-6
_Z = 0.05
_N = 32


@pytest.fixture(scope="module")
def plan():
    return make_plan(_Z, _PITCH_I, _PITCH_H, _WL, _N)


@pytest.fixture(scope="module")
def target():
    return RealImage(np.random.default_rng(5).random((_N, _N)))


def _convergent_spec(rows=_N, cols=_N, pitch=_PITCH_I):
    f_i = focal_length(_Z, _N * _PITCH_I, _N * _PITCH_H)
    return ConvergentPhaseSpec(
        focal_length=f_i,
        offset_x=0.0,
        offset_y=0.0,
        wavelength=_WL,
        pitch_y=pitch,
        pitch_x=pitch,
        rows=rows,
        cols=cols,
    )


class TestTraceSemantics:
    def test_trace_length_matches_iterations(self, plan, target):
        for iterations in (1, 3, 7):
            cfg = GsConfig(iterations=iterations, initial_phase=RandomInit(0), record_trace=True)
            _, trace = gs_optimize(target, plan, cfg)
            assert len(trace.residuals) == iterations
            assert all(np.isfinite(r) and r >= 0 for r in trace.residuals)

    def test_trace_empty_when_not_recording(self, plan, target):
        _, trace = gs_optimize(target, plan, GsConfig(iterations=3, record_trace=False))
        assert trace.residuals == ()

    def test_zero_iterations_has_empty_trace(self, plan, target):
        _, trace = gs_optimize(target, plan, GsConfig(iterations=0, record_trace=True))
        assert trace.residuals == ()

    def test_zero_iterations_is_single_pass_encode(self, plan, target):
        holo, _ = gs_optimize(
            target, plan, GsConfig(iterations=0, initial_phase=RandomInit(9))
        )
        phase = random_phase((_N, _N), 9)
        obj = field_from_amplitude_and_phase(target, phase, _PITCH_I, _WL)
        manual = encode_phase_only(propagate(plan, obj))
        np.testing.assert_array_equal(holo.phase, manual.phase)

    def test_first_iteration_hologram_matches_single_pass(self, plan, target):
        base, _ = gs_optimize(target, plan, GsConfig(iterations=0))
        once, _ = gs_optimize(target, plan, GsConfig(iterations=1))
        np.testing.assert_array_equal(base.phase, once.phase)


class TestDeterminismAndProgress:
    def test_repeat_run_is_bit_identical(self, plan, target):
        cfg = GsConfig(iterations=4, initial_phase=RandomInit(3), record_trace=True)
        holo_a, trace_a = gs_optimize(target, plan, cfg)
        holo_b, trace_b = gs_optimize(target, plan, cfg)
        np.testing.assert_array_equal(holo_a.phase, holo_b.phase)
        assert trace_a.residuals == trace_b.residuals

    def test_seeds_change_result(self, plan, target):
        holo_a, _ = gs_optimize(target, plan, GsConfig(iterations=2, initial_phase=RandomInit(0)))
        holo_b, _ = gs_optimize(target, plan, GsConfig(iterations=2, initial_phase=RandomInit(1)))
        assert not np.array_equal(holo_a.phase, holo_b.phase)

    def test_convergent_init_accepted(self, plan, target):
        cfg = GsConfig(iterations=2, initial_phase=ConvergentInit(_convergent_spec()))
        holo_a, _ = gs_optimize(target, plan, cfg)
        holo_b, _ = gs_optimize(target, plan, cfg)
        np.testing.assert_array_equal(holo_a.phase, holo_b.phase)

    def test_desk_square_residual_trace(self):
        # Regression golden: 128-grid desk geometry, random init, 10 rounds.
        square = desk_images(128)["square"]
        cfg = desk_cfg(128, iterations=10, init="random")
        _, trace, _ = gs_run(square, cfg)
        assert len(trace.residuals) == 10
        assert trace.residuals[0] == pytest.approx(0.3576960741538704, abs=1e-9)
        assert trace.residuals[-1] == pytest.approx(0.32726740713337343, abs=1e-9)
        diffs = np.diff(trace.residuals)
        assert np.all(diffs < 0)


class TestValidation:
    def test_negative_iterations_rejected(self):
        with pytest.raises(ValueError):
            GsConfig(iterations=-1)

    def test_target_plan_shape_mismatch(self, plan):
        small = RealImage(np.zeros((16, 16)))
        with pytest.raises(PlanMismatch):
            gs_optimize(small, plan, GsConfig(iterations=1))

    def test_convergent_grid_mismatch(self, plan, target):
        cfg = GsConfig(iterations=1, initial_phase=ConvergentInit(_convergent_spec(rows=16, cols=16)))
        with pytest.raises(PlanMismatch):
            gs_optimize(target, plan, cfg)

    def test_convergent_pitch_mismatch(self, plan, target):
        cfg = GsConfig(iterations=1, initial_phase=ConvergentInit(_convergent_spec(pitch=10e-6)))
        with pytest.raises(PlanMismatch):
            gs_optimize(target, plan, cfg)


class TestOutputContract:
    def test_hologram_geometry_is_destination_side(self, plan, target):
        holo, _ = gs_optimize(target, plan, GsConfig(iterations=1))
        assert (holo.rows, holo.cols) == (_N, _N)
        assert (holo.pitch_y, holo.pitch_x) == (_PITCH_H, _PITCH_H)
        assert holo.wavelength == _WL

    def test_phase_only_output(self, plan, target):
        holo, _ = gs_optimize(target, plan, GsConfig(iterations=2, encoding=Encoding.PHASE_ONLY))
        assert holo.encoding is Encoding.PHASE_ONLY
        assert holo.alpha is None
        assert holo.phase.max() <= np.pi and holo.phase.min() > -np.pi

    def test_bleached_output(self, plan, target):
        holo, _ = gs_optimize(target, plan, GsConfig(iterations=2, encoding=Encoding.BLEACHED))
        assert holo.encoding is Encoding.BLEACHED
        assert holo.alpha > 0
        assert np.abs(holo.phase).max() <= np.pi
