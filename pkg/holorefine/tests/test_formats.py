"""File-format round trips and interoperability with engine-written
files."""

from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from holorefine import (
    FieldFile,
    FormatError,
    load_manifest,
    read_field,
    read_hologram,
    write_field,
    write_hologram,
)


def _random_field(rng, rows=12, cols=8):
    samples = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return FieldFile(samples, 10e-6, 12e-6, 532e-9)


class TestFieldFiles:
    def test_round_trip_is_bit_exact(self, tmp_path):
        field = _random_field(np.random.default_rng(0))
        path = tmp_path / "field.cfld"
        write_field(path, field)
        back = read_field(path)
        assert np.array_equal(back.samples, field.samples)
        assert back.pitch_y == field.pitch_y
        assert back.pitch_x == field.pitch_x
        assert back.wavelength == field.wavelength

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "field.cfld"
        write_field(path, _random_field(np.random.default_rng(1)))
        blob = bytearray(path.read_bytes())
        blob[:4] = b"NOPE"
        path.write_bytes(bytes(blob))
        with pytest.raises(FormatError, match="magic"):
            read_field(path)

    def test_wrong_version_rejected(self, tmp_path):
        path = tmp_path / "field.cfld"
        write_field(path, _random_field(np.random.default_rng(2)))
        blob = bytearray(path.read_bytes())
        struct.pack_into("<I", blob, 4, 99)
        path.write_bytes(bytes(blob))
        with pytest.raises(FormatError, match="version"):
            read_field(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "field.cfld"
        write_field(path, _random_field(np.random.default_rng(3)))
        blob = path.read_bytes()
        path.write_bytes(blob[:-16])
        with pytest.raises(FormatError, match="payload|truncated|size"):
            read_field(path)

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(FormatError, match="cannot read"):
            read_field(tmp_path / "absent.cfld")

    def test_non_2d_samples_rejected(self, tmp_path):
        with pytest.raises(FormatError, match="2-D"):
            write_field(
                tmp_path / "bad.cfld", FieldFile(np.zeros(4, complex), 1e-6, 1e-6, 5e-7)
            )


class TestHologramFiles:
    def test_round_trip_preserves_phase_to_quantization(self, tmp_path):
        rng = np.random.default_rng(4)
        phase = rng.uniform(-math.pi, math.pi, (16, 16))
        path = tmp_path / "holo.png"
        write_hologram(
            path, phase, 3.74e-6, 3.74e-6, 532e-9, "phase-only",
            extras={"distance": "0.125", "image_pitch": "1.87e-05"},
        )
        back = read_hologram(path)
        step = 2.0 * math.pi / 65535.0
        assert np.max(np.abs(back.phase - phase)) <= 0.5 * step + 1e-12
        assert back.encoding == "phase-only"
        assert back.alpha is None
        assert back.extras["distance"] == "0.125"
        assert back.extras["image_pitch"] == "1.87e-05"
        assert back.pitch_y == 3.74e-6
        assert back.wavelength == 532e-9

    def test_alpha_round_trips(self, tmp_path):
        path = tmp_path / "holo.png"
        write_hologram(
            path, np.zeros((8, 8)), 1e-6, 1e-6, 5e-7, "bleached", alpha=1.25
        )
        assert read_hologram(path).alpha == 1.25

    def test_writes_are_byte_identical(self, tmp_path):
        rng = np.random.default_rng(5)
        phase = rng.uniform(-math.pi, math.pi, (8, 8))
        paths = [tmp_path / "a.png", tmp_path / "b.png"]
        for path in paths:
            write_hologram(path, phase, 1e-6, 2e-6, 5e-7, "phase-only",
                           extras={"seed": "3"})
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert (
            Path(str(paths[0]) + ".meta").read_bytes()
            == Path(str(paths[1]) + ".meta").read_bytes()
        )

    def test_missing_sidecar_rejected(self, tmp_path):
        path = tmp_path / "holo.png"
        Image.fromarray(np.zeros((4, 4), np.uint16)).save(path)
        with pytest.raises(FormatError, match="metadata"):
            read_hologram(path)

    def test_wrong_format_line_rejected(self, tmp_path):
        path = tmp_path / "holo.png"
        write_hologram(path, np.zeros((4, 4)), 1e-6, 1e-6, 5e-7, "phase-only")
        meta = Path(str(path) + ".meta")
        meta.write_text(meta.read_text().replace("hologram-meta/1", "hologram-meta/9"))
        with pytest.raises(FormatError, match="format"):
            read_hologram(path)

    def test_shape_mismatch_rejected(self, tmp_path):
        path = tmp_path / "holo.png"
        write_hologram(path, np.zeros((4, 4)), 1e-6, 1e-6, 5e-7, "phase-only")
        Image.fromarray(np.zeros((6, 4), np.uint16)).save(path)
        with pytest.raises(FormatError, match="declares"):
            read_hologram(path)

    def test_core_key_collision_in_extras_rejected(self, tmp_path):
        with pytest.raises(FormatError, match="collides"):
            write_hologram(
                tmp_path / "holo.png", np.zeros((4, 4)), 1e-6, 1e-6, 5e-7,
                "phase-only", extras={"rows": "4"},
            )


class TestEngineInterop:
    def test_golden_manifest_parses(self, golden_manifest):
        cases = load_manifest(golden_manifest)
        assert len(cases) >= 10
        operations = {case.operation for case in cases}
        assert "propagate" in operations
        assert "gs_optimize" in operations
        for case in cases:
            assert case.tolerance > 0.0
            assert case.expect_path.exists()

    def test_engine_field_files_read(self, golden_manifest):
        cases = load_manifest(golden_manifest)
        field = read_field(cases[0].expect_path)
        assert field.samples.dtype == np.complex128
        assert field.samples.ndim == 2
        assert field.pitch_y > 0.0 and field.wavelength > 0.0

    def test_engine_hologram_reads(self, engine, tmp_path):
        import subprocess

        rng = np.random.default_rng(6)
        image = tmp_path / "target.png"
        Image.fromarray(rng.integers(0, 256, (64, 64), dtype=np.uint8)).save(image)
        holo = tmp_path / "holo.png"
        subprocess.run(
            [engine, "generate", "--image", str(image), "--out", str(holo),
             "--grid", "64", "--encoding", "bleached"],
            check=True, capture_output=True,
        )
        back = read_hologram(holo)
        assert back.phase.shape == (64, 64)
        assert back.encoding == "bleached"
        assert back.alpha is not None
        assert math.isfinite(float(back.extras["distance"]))
        assert np.all(back.phase > -math.pi) and np.all(back.phase <= math.pi)
