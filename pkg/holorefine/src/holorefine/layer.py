"""Differentiable scaled, shifted, band-limited Fresnel propagation.

Same operator as the reference engine: per axis the quadratic Fresnel
kernel splits into chirp-multiply, linear convolution with a band-limited
chirp, chirp-multiply, evaluated as one padded FFT convolution. The kept
central window is exact for any even padding >= grid + kept half-width, so
this implementation chooses its own padding and still matches the engine
to machine precision (pinned by the golden replay).

The layer has no trainable parameters; every table lives in a buffer and
gradients flow through the input field only.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np
import torch

from .errors import GeometryError

__all__ = ["ScaledDiffraction", "band_limit"]


def band_limit(p_src: float, p_dst: float, wavelength: float, z: float) -> int:
    """Half-width in taps beyond which the convolution chirp is
    undersampled (its phase advances by more than pi per tap)."""
    return int(math.floor(wavelength * abs(z) / (2.0 * p_src * p_dst)))


def _pair(value: float | tuple[float, float]) -> tuple[float, float]:
    if isinstance(value, tuple):
        return float(value[0]), float(value[1])
    return float(value), float(value)


def _axis_tables(
    n: int,
    p_src: float,
    p_dst: float,
    wavelength: float,
    z: float,
    shift: float,
    half_width: int,
    padded: int,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = p_dst / p_src
    c = math.pi * p_src * p_src / (wavelength * z)
    off = shift / p_src
    idx = np.arange(-(n // 2), n // 2, dtype=np.float64)
    src = np.exp(1j * (c * ((1.0 - s) * idx * idx - 2.0 * off * idx)))
    out = np.exp(1j * (c * ((s * s - s) * idx * idx + 2.0 * s * off * idx + off * off)))
    lag = np.arange(-(padded // 2), padded // 2, dtype=np.float64)
    kern = np.exp(1j * (c * s * lag * lag))
    kern[np.abs(lag) > half_width] = 0.0
    kern_fft = np.fft.fft(np.fft.ifftshift(kern))
    return src, kern_fft, out


class ScaledDiffraction(torch.nn.Module):
    """Propagate complex fields between planes of different pitch.

    Parameters
    ----------
    distance_z : float
        Signed propagation distance in meters; zero is invalid.
    source_pitch, dest_pitch : float or (pitch_y, pitch_x)
        Sample spacing of the two planes, meters.
    wavelength : float
        Wavelength in meters.
    grid : int or (rows, cols)
        Grid dimensions, both even and >= 2.
    shift : float or (shift_y, shift_x)
        Lateral displacement of the destination window center, meters.
    dtype : torch.dtype
        complex128 (exact replay) or complex64 (training speed).

    Raises
    ------
    GeometryError
        Non-positive pitch or wavelength, zero distance, a bad grid, or a
        geometry whose band-limited kernel keeps no taps.
    """

    def __init__(
        self,
        distance_z: float,
        source_pitch: float | tuple[float, float],
        dest_pitch: float | tuple[float, float],
        wavelength: float,
        grid: int | tuple[int, int],
        shift: float | tuple[float, float] = 0.0,
        dtype: torch.dtype = torch.complex128,
    ):
        super().__init__()
        rows, cols = (grid, grid) if isinstance(grid, int) else (int(grid[0]), int(grid[1]))
        p_sy, p_sx = _pair(source_pitch)
        p_dy, p_dx = _pair(dest_pitch)
        sh_y, sh_x = _pair(shift)
        distance_z = float(distance_z)
        wavelength = float(wavelength)
        if distance_z == 0.0 or not math.isfinite(distance_z):
            raise GeometryError(f"distance_z must be finite and nonzero, got {distance_z}")
        for name, value in (
            ("source_pitch_y", p_sy),
            ("source_pitch_x", p_sx),
            ("dest_pitch_y", p_dy),
            ("dest_pitch_x", p_dx),
            ("wavelength", wavelength),
        ):
            if not (math.isfinite(value) and value > 0.0):
                raise GeometryError(f"{name} must be positive, got {value}")
        for name, value in (("rows", rows), ("cols", cols)):
            if value < 2 or value % 2 != 0:
                raise GeometryError(f"{name} must be even and >= 2, got {value}")
        if dtype not in (torch.complex64, torch.complex128):
            raise GeometryError(f"dtype must be complex64 or complex128, got {dtype}")

        k_y = band_limit(p_sy, p_dy, wavelength, distance_z)
        k_x = band_limit(p_sx, p_dx, wavelength, distance_z)
        if k_y < 1 or k_x < 1:
            raise GeometryError(
                f"band-limited kernel keeps no taps (half-widths y={k_y}, x={k_x})"
            )
        pad_y = rows + min(k_y, rows - 1)
        pad_y += pad_y % 2
        pad_x = cols + min(k_x, cols - 1)
        pad_x += pad_x % 2

        src_y, kern_y, out_y = _axis_tables(
            rows, p_sy, p_dy, wavelength, distance_z, sh_y, k_y, pad_y
        )
        src_x, kern_x, out_x = _axis_tables(
            cols, p_sx, p_dx, wavelength, distance_z, sh_x, k_x, pad_x
        )
        const = (
            p_sy
            * p_sx
            * np.exp(2j * math.pi * distance_z / wavelength)
            / (1j * wavelength * distance_z)
        )

        self.distance_z = distance_z
        self.source_pitch = (p_sy, p_sx)
        self.dest_pitch = (p_dy, p_dx)
        self.wavelength = wavelength
        self.rows, self.cols = rows, cols
        self.shift = (sh_y, sh_x)
        self.band_limits = (k_y, k_x)
        self.padded = (pad_y, pad_x)
        # Output chirps are folded together with the overall constant so the
        # forward pass ends in a single multiply.
        self.register_buffer("src_y", torch.as_tensor(src_y, dtype=dtype), persistent=False)
        self.register_buffer("src_x", torch.as_tensor(src_x, dtype=dtype), persistent=False)
        self.register_buffer("kern_y", torch.as_tensor(kern_y, dtype=dtype), persistent=False)
        self.register_buffer("kern_x", torch.as_tensor(kern_x, dtype=dtype), persistent=False)
        self.register_buffer(
            "out_y", torch.as_tensor(out_y * const, dtype=dtype), persistent=False
        )
        self.register_buffer("out_x", torch.as_tensor(out_x, dtype=dtype), persistent=False)

    def forward(self, field: torch.Tensor) -> torch.Tensor:
        """Propagate `field` (shape (..., rows, cols), complex) to the
        destination plane."""
        if field.shape[-2:] != (self.rows, self.cols):
            raise GeometryError(
                f"field grid {tuple(field.shape[-2:])} != layer grid "
                f"({self.rows}, {self.cols})"
            )
        if field.dtype != self.src_y.dtype:
            raise GeometryError(f"field dtype {field.dtype} != layer dtype {self.src_y.dtype}")
        pad_y, pad_x = self.padded
        oy = (pad_y - self.rows) // 2
        ox = (pad_x - self.cols) // 2
        chirped = field * self.src_y.unsqueeze(-1) * self.src_x
        buf = chirped.new_zeros(field.shape[:-2] + (pad_y, pad_x))
        buf[..., oy : oy + self.rows, ox : ox + self.cols] = chirped
        spectrum = torch.fft.fft2(buf) * self.kern_y.unsqueeze(-1) * self.kern_x
        back = torch.fft.ifft2(spectrum)
        core = back[..., oy : oy + self.rows, ox : ox + self.cols]
        return core * self.out_y.unsqueeze(-1) * self.out_x

    def inverse(self) -> "ScaledDiffraction":
        """The layer that undoes this one: negated distance, swapped
        pitches, negated window shift."""
        return ScaledDiffraction(
            -self.distance_z,
            self.dest_pitch,
            self.source_pitch,
            self.wavelength,
            (self.rows, self.cols),
            (-self.shift[0], -self.shift[1]),
            dtype=self.src_y.dtype,
        )

    def checksum(self) -> str:
        """SHA-256 over every table buffer, for asserting that training
        never mutates the propagation constants."""
        digest = hashlib.sha256()
        for _, buf in sorted(self.named_buffers()):
            digest.update(buf.detach().cpu().numpy().tobytes())
        return digest.hexdigest()
