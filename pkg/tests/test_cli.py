"""Command-line behavior: exit codes, output formats, file side effects."""

import csv
import filecmp
import math
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from holo_support import cli_target_pixels
from holoscale import (
    Encoding,
    PhaseHologram,
    load_manifest,
    phase_of,
    write_hologram_png,
)
from holoscale.cli import main, parse_quantity

_GRID64 = [
    "--grid", "64",
    "--distance", "31.25mm",
    "--offset-x", "1.28mm",
    "--offset-y", "1.28mm",
]


@pytest.fixture(scope="module")
def target_png(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "target.png"
    Image.fromarray(cli_target_pixels(64), mode="L").save(path)
    return str(path)


def _flat_png(path, value, shape=(32, 32)):
    Image.fromarray(np.full(shape, value, dtype=np.uint8), mode="L").save(path)
    return str(path)


class TestQuantityParsing:
    @pytest.mark.parametrize(
        "text, meters",
        [
            ("532nm", 532e-9),
            ("3.74um", 3.74e-6),
            ("31.25mm", 31.25e-3),
            ("2cm", 2e-2),
            ("0.5m", 0.5),
            ("0.5", 0.5),
            (" 18.7um ", 18.7e-6),
        ],
    )
    def test_unit_suffixes(self, text, meters):
        assert parse_quantity(text) == pytest.approx(meters, rel=1e-12)


class TestExitCodes:
    def test_missing_image_file(self, tmp_path, capsys):
        code = main(["generate", "--image", str(tmp_path / "no.png"),
                     "--out", str(tmp_path / "h.png"), *_GRID64])
        assert code == 3
        assert "error:" in capsys.readouterr().err

    def test_missing_hologram_file(self, tmp_path, capsys):
        code = main(["reconstruct", "--holo", str(tmp_path / "no.png"),
                     "--out", str(tmp_path / "r.png")])
        assert code == 3
        capsys.readouterr()

    def test_missing_sidecar(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        assert main(["generate", "--image", target_png, "--out", holo, *_GRID64]) == 0
        (tmp_path / "h.png.meta").unlink()
        assert main(["reconstruct", "--holo", holo, "--out", str(tmp_path / "r.png")]) == 3
        capsys.readouterr()

    def test_odd_grid_is_geometry_error(self, target_png, tmp_path, capsys):
        code = main(["generate", "--image", target_png,
                     "--out", str(tmp_path / "h.png"),
                     "--grid", "33", "--distance", "31.25mm"])
        assert code == 2
        capsys.readouterr()

    def test_zero_distance_is_geometry_error(self, target_png, tmp_path, capsys):
        code = main(["generate", "--image", target_png,
                     "--out", str(tmp_path / "h.png"),
                     "--grid", "64", "--distance", "0m"])
        assert code == 2
        capsys.readouterr()

    def test_metrics_shape_mismatch(self, tmp_path, capsys):
        a = _flat_png(tmp_path / "a.png", 10, (32, 32))
        b = _flat_png(tmp_path / "b.png", 10, (32, 48))
        assert main(["metrics", "--reference", a, "--test", b]) == 2
        capsys.readouterr()

    def test_unknown_command_is_usage_error(self, capsys):
        assert main(["frobnicate"]) == 1
        capsys.readouterr()

    def test_bad_unit_is_usage_error(self, target_png, tmp_path, capsys):
        code = main(["generate", "--image", target_png,
                     "--out", str(tmp_path / "h.png"),
                     "--grid", "64", "--distance", "5parsec"])
        assert code == 1
        capsys.readouterr()

    def test_bad_ratio_list_is_usage_error(self, target_png, tmp_path, capsys):
        code = main(["zoom-sweep", "--image", target_png,
                     "--out-dir", str(tmp_path / "sweep"),
                     "--ratios", "2,banana", *_GRID64])
        assert code == 1
        capsys.readouterr()


class TestMetricsCommand:
    def test_identical_images(self, tmp_path, capsys):
        a = _flat_png(tmp_path / "a.png", 77)
        assert main(["metrics", "--reference", a, "--test", a]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "PSNR [dB]: inf"
        assert out[1] == "SSIM: 1.000000"
        assert out[2] == "PSNR=inf SSIM=1.000000"

    def test_constant_difference_psnr(self, tmp_path, capsys):
        a = _flat_png(tmp_path / "a.png", 100)
        b = _flat_png(tmp_path / "b.png", 116)
        assert main(["metrics", "--reference", a, "--test", b]) == 0
        lines = capsys.readouterr().out.splitlines()
        psnr = float(lines[0].removeprefix("PSNR [dB]: "))
        assert psnr == pytest.approx(20 * math.log10(255 / 16), abs=1e-3)
        summary = dict(part.split("=") for part in lines[2].split())
        assert float(summary["PSNR"]) == pytest.approx(psnr, abs=1e-6)
        assert 0 < float(summary["SSIM"]) <= 1


class TestGenerateAndReconstruct:
    def test_generate_writes_hologram_and_prints_path(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        assert main(["generate", "--image", target_png, "--out", holo, *_GRID64]) == 0
        assert capsys.readouterr().out.strip() == holo
        with Image.open(holo) as img:
            assert img.size == (64, 64)
        meta_text = (tmp_path / "h.png.meta").read_text()
        assert "hologram-meta/1" in meta_text
        assert "focal_length" in meta_text

    def test_reference_quality_baseline(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        recon = str(tmp_path / "r.png")
        assert main(["generate", "--image", target_png, "--out", holo, *_GRID64]) == 0
        assert main(["reconstruct", "--holo", holo, "--out", recon]) == 0
        capsys.readouterr()
        assert main(["metrics", "--reference", target_png, "--test", recon]) == 0
        summary = capsys.readouterr().out.splitlines()[2]
        parts = dict(item.split("=") for item in summary.split())
        assert float(parts["PSNR"]) == pytest.approx(12.182808, abs=0.1)
        assert float(parts["SSIM"]) == pytest.approx(0.536405, abs=5e-3)

    def test_reconstruct_override_matches_sidecar_value(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        assert main(["generate", "--image", target_png, "--out", holo, *_GRID64]) == 0
        default = str(tmp_path / "default.png")
        explicit = str(tmp_path / "explicit.png")
        assert main(["reconstruct", "--holo", holo, "--out", default]) == 0
        assert main(["reconstruct", "--holo", holo, "--out", explicit,
                     "--distance", "31.25mm", "--image-pitch", "18.7um"]) == 0
        capsys.readouterr()
        assert filecmp.cmp(default, explicit, shallow=False)

    def test_reconstruct_without_geometry_needs_flags(self, tmp_path, capsys):
        holo = PhaseHologram(
            np.zeros((32, 32)), 10e-6, 10e-6, 532e-9, Encoding.PHASE_ONLY
        )
        path = tmp_path / "bare.png"
        write_hologram_png(path, holo)
        out = str(tmp_path / "r.png")
        assert main(["reconstruct", "--holo", str(path), "--out", out]) == 1
        assert main(["reconstruct", "--holo", str(path), "--out", out,
                     "--distance", "11.5mm", "--image-pitch", "10um"]) == 0
        capsys.readouterr()

    def test_lens_phase_hologram_focuses_on_axis(self, tmp_path, capsys):
        # A hologram carrying a diverging-lens phase of focal length z
        # focuses to the axis when replayed backward over distance z.
        z, pitch = 0.0115, 10e-6
        coords = (np.arange(32) - 16) * pitch
        yy, xx = np.meshgrid(coords, coords, indexing="ij")
        phase = phase_of(np.exp(1j * np.pi * (yy**2 + xx**2) / (532e-9 * z)))
        holo = PhaseHologram(phase, pitch, pitch, 532e-9, Encoding.PHASE_ONLY)
        path = tmp_path / "lens.png"
        write_hologram_png(path, holo, extra={"distance": repr(z), "image_pitch": repr(pitch)})
        out = str(tmp_path / "r.png")
        assert main(["reconstruct", "--holo", str(path), "--out", out]) == 0
        capsys.readouterr()
        with Image.open(out) as img:
            recon = np.asarray(img)
        peak = np.unravel_index(np.argmax(recon), recon.shape)
        assert abs(peak[0] - 16) <= 2 and abs(peak[1] - 16) <= 2


class TestGsCommand:
    def test_trace_csv(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        trace = str(tmp_path / "t.csv")
        assert main(["gs", "--image", target_png, "--out", holo,
                     "--trace", trace, "--iterations", "10", *_GRID64]) == 0
        capsys.readouterr()
        with open(trace, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "residual"]
        assert len(rows) == 11
        assert [r[0] for r in rows[1:]] == [str(i) for i in range(1, 11)]
        residuals = [float(r[1]) for r in rows[1:]]
        assert residuals[-1] < residuals[0]

    def test_default_trace_path(self, target_png, tmp_path, capsys):
        holo = str(tmp_path / "h.png")
        assert main(["gs", "--image", target_png, "--out", holo,
                     "--iterations", "1", *_GRID64]) == 0
        capsys.readouterr()
        assert (tmp_path / "h.png.trace.csv").exists()

    def test_zero_iterations_matches_generate(self, target_png, tmp_path, capsys):
        via_gs = str(tmp_path / "gs.png")
        via_generate = str(tmp_path / "gen.png")
        assert main(["gs", "--image", target_png, "--out", via_gs,
                     "--iterations", "0", *_GRID64]) == 0
        assert main(["generate", "--image", target_png, "--out", via_generate,
                     "--init", "random", *_GRID64]) == 0
        capsys.readouterr()
        assert filecmp.cmp(via_gs, via_generate, shallow=False)
        assert (tmp_path / "gs.png.meta").read_text() == (
            tmp_path / "gen.png.meta"
        ).read_text()


class TestConfigFile:
    def test_flags_override_config_file(self, target_png, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# bench geometry, quarter scale\n"
            "grid = 32\n"
            "distance = 15.625mm\n"
            "offset-x = 0.64mm\n"
            "offset-y = 0.64mm\n"
        )
        holo = str(tmp_path / "h.png")
        assert main(["generate", "--image", target_png, "--out", holo,
                     "--config", str(cfg), "--grid", "64",
                     "--offset-x", "1.28mm", "--offset-y", "1.28mm",
                     "--distance", "31.25mm"]) == 0
        capsys.readouterr()
        with Image.open(holo) as img:
            assert img.size == (64, 64)
        meta = (tmp_path / "h.png.meta").read_text()
        assert "distance = 0.03125" in meta

    def test_config_file_applies_when_no_flag(self, target_png, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("grid = 32\ndistance = 15.625mm\noffset-x=0.64mm\noffset-y=0.64mm\n")
        holo = str(tmp_path / "h.png")
        assert main(["generate", "--image", target_png, "--out", holo,
                     "--config", str(cfg)]) == 0
        capsys.readouterr()
        with Image.open(holo) as img:
            assert img.size == (32, 32)

    def test_unknown_config_key_rejected(self, target_png, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("gridd = 32\n")
        assert main(["generate", "--image", target_png,
                     "--out", str(tmp_path / "h.png"), "--config", str(cfg)]) == 1
        capsys.readouterr()

    def test_malformed_config_line_rejected(self, target_png, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("grid 32\n")
        assert main(["generate", "--image", target_png,
                     "--out", str(tmp_path / "h.png"), "--config", str(cfg)]) == 1
        capsys.readouterr()


class TestZoomSweepCommand:
    def test_outputs_and_skip_warning(self, target_png, tmp_path, capsys):
        out_dir = tmp_path / "sweep"
        assert main(["zoom-sweep", "--image", target_png,
                     "--out-dir", str(out_dir), "--ratios", "0.5,2,5",
                     *_GRID64]) == 0
        captured = capsys.readouterr()
        assert captured.out.strip() == str(out_dir / "index.csv")
        assert "ratio 0.5 skipped" in captured.err
        for tag in ("R2", "R5"):
            assert (out_dir / f"holo_{tag}.png").exists()
            assert (out_dir / f"holo_{tag}.png.meta").exists()
            assert (out_dir / f"recon_{tag}.png").exists()
        with open(out_dir / "index.csv", newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["ratio", "f_i", "psnr", "ssim"]
        assert [r[0] for r in rows[1:]] == ["2", "5"]
        f2 = float(rows[1][1])
        assert f2 == pytest.approx(0.03125 * 2 / 1.5, rel=1e-12)
        assert float(rows[1][2]) > 0


class TestGoldensCommand:
    def test_emits_loadable_manifest(self, tmp_path, capsys):
        out_dir = tmp_path / "gold"
        assert main(["goldens", "--out-dir", str(out_dir), "--seed", "0"]) == 0
        printed = capsys.readouterr().out.strip()
        assert printed == str(out_dir / "manifest.txt")
        manifest = load_manifest(printed)
        assert len(manifest.cases) == 21


class TestConsoleScript:
    def test_entry_point_runs(self, tmp_path):
        a = _flat_png(tmp_path / "a.png", 5)
        result = subprocess.run(
            ["holoscale", "metrics", "--reference", a, "--test", a],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
        assert result.stdout.splitlines()[-1] == "PSNR=inf SSIM=1.000000"

    def test_module_invocation_runs(self, tmp_path):
        a = _flat_png(tmp_path / "a.png", 5)
        result = subprocess.run(
            [sys.executable, "-m", "holoscale.cli", "metrics",
             "--reference", a, "--test", a],
            capture_output=True, text=True,
        )
        assert result.returncode == 0, result.stderr
