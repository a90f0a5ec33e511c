"""Scaled, shifted, band-limited Fresnel propagation between parallel planes.

The propagator evaluates the Fresnel diffraction integral between two
uniformly sampled planes whose pitches differ (destination pitch = s * source
pitch per axis) and whose destination window may be displaced laterally. The
quadratic kernel splits exactly as

    (x_d - x_s)^2 = p_s^2 * ((s^2 - s) m^2 + s (m - n)^2 + (1 - s) n^2)
                    on x_s = n p_s, x_d = m p_d,

so the integral becomes chirp-multiply, linear convolution with a chirp,
chirp-multiply. The convolution chirp is truncated to the lags where its
phase is adequately sampled (the band limit), which suppresses the aliased
replicas a naive evaluation would fold into the output.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field as dataclass_field
from typing import NamedTuple

import numpy as np
from scipy import fft as _fft

from . import _kernels as kernels
from .errors import DegeneratePlan, InvalidGeometry, OracleTooLarge, PlanMismatch
from .field import ComplexField

__all__ = [
    "PropagationPlan",
    "make_plan",
    "propagate",
    "propagate_inverse",
    "propagate_direct_dft",
]

_ORACLE_LIMIT = 128 * 128

_scratch = threading.local()


def _scratch_slot(name: str, shape: tuple[int, int]) -> np.ndarray:
    """Per-thread named scratch buffers for the padded convolution.

    The padded buffer and its transposed twin dominate the propagator's
    allocation traffic (each several times the field size, complex128), so
    they are recycled between calls instead of being mapped fresh each
    time. One slot per name suffices: a propagate call never nests, and
    repeated calls on the same plan reuse the slots byte-for-byte. A shape
    change simply replaces the slot.
    """
    slots = getattr(_scratch, "slots", None)
    if slots is None:
        slots = _scratch.slots = {}
    buf = slots.get(name)
    if buf is None or buf.shape != shape:
        buf = np.empty(shape, dtype=np.complex128)
        slots[name] = buf
    return buf


class _PlanTables(NamedTuple):
    src_y: np.ndarray
    src_x: np.ndarray
    kern_y: np.ndarray
    kern_x: np.ndarray
    out_y: np.ndarray
    out_x: np.ndarray
    const: complex


@dataclass(frozen=True, eq=False)
class PropagationPlan:
    """Precomputed tables for propagating one fixed geometry.

    Build with :func:`make_plan`. All lengths are meters; `distance_z` is
    signed (negative propagates backward). `band_limit_y` / `band_limit_x`
    are the kept kernel half-widths in taps per axis.
    """

    distance_z: float
    source_pitch_y: float
    source_pitch_x: float
    dest_pitch_y: float
    dest_pitch_x: float
    wavelength: float
    rows: int
    cols: int
    shift_y: float
    shift_x: float
    band_limit_y: int
    band_limit_x: int
    tables: _PlanTables = dataclass_field(repr=False)


def _padded_length(n: int, half_width: int) -> int:
    # The kept outputs are the central n samples, so circular wraparound is
    # harmless as long as every aliased lag lands outside the kernel mask:
    # padded >= n + min(half_width, n - 1). Rounded up to an even fast FFT
    # size (even keeps the fftshift parity cancellation exact).
    length = _fft.next_fast_len(n + min(half_width, n - 1))
    while length % 2:
        length = _fft.next_fast_len(length + 1)
    return length


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


def _band_limit(p_src: float, p_dst: float, wavelength: float, z: float) -> int:
    # Lags beyond this carry chirp phase that advances by more than pi per
    # tap; keeping them folds aliased copies into the destination window.
    return int(math.floor(wavelength * abs(z) / (2.0 * p_src * p_dst)))


def make_plan(
    distance_z: float,
    source_pitch: float | tuple[float, float],
    dest_pitch: float | tuple[float, float],
    wavelength: float,
    grid: int | tuple[int, int],
    shift: float | tuple[float, float] = 0.0,
) -> PropagationPlan:
    """Validate a propagation geometry and precompute its chirp tables.

    Parameters
    ----------
    distance_z : float
        Signed propagation distance in meters; zero is invalid.
    source_pitch, dest_pitch : float or (pitch_y, pitch_x)
        Sample spacing of the two planes in meters.
    wavelength : float
        Wavelength in meters.
    grid : int or (rows, cols)
        Grid dimensions, both even and >= 2 (source and destination share
        the sample count).
    shift : float or (shift_y, shift_x)
        Lateral displacement of the destination window center relative to
        the source window center, meters.

    Raises
    ------
    InvalidGeometry
        Non-positive pitch or wavelength, zero distance, or a bad grid.
    DegeneratePlan
        The band-limited kernel would keep no taps (scale/distance combine
        so the chirp is everywhere undersampled).
    """
    rows, cols = (grid, grid) if isinstance(grid, int) else (int(grid[0]), int(grid[1]))
    p_sy, p_sx = _pair(source_pitch)
    p_dy, p_dx = _pair(dest_pitch)
    sh_y, sh_x = _pair(shift)
    distance_z = float(distance_z)
    wavelength = float(wavelength)

    if distance_z == 0.0 or not math.isfinite(distance_z):
        raise InvalidGeometry(f"distance_z must be finite and nonzero, got {distance_z}")
    for name, value in (
        ("source_pitch_y", p_sy),
        ("source_pitch_x", p_sx),
        ("dest_pitch_y", p_dy),
        ("dest_pitch_x", p_dx),
        ("wavelength", wavelength),
    ):
        if not (math.isfinite(value) and value > 0.0):
            raise InvalidGeometry(f"{name} must be positive, got {value}")
    for name, value in (("rows", rows), ("cols", cols)):
        if value < 2 or value % 2 != 0:
            raise InvalidGeometry(f"{name} must be even and >= 2, got {value}")

    k_y = _band_limit(p_sy, p_dy, wavelength, distance_z)
    k_x = _band_limit(p_sx, p_dx, wavelength, distance_z)
    if k_y < 1 or k_x < 1:
        raise DegeneratePlan(
            "band-limited kernel keeps no taps "
            f"(half-widths y={k_y}, x={k_x}); the destination pitch or "
            "distance leaves the convolution chirp undersampled everywhere"
        )

    pad_y = _padded_length(rows, k_y)
    pad_x = _padded_length(cols, k_x)
    src_y, kern_y, out_y = _axis_tables(
        rows, p_sy, p_dy, wavelength, distance_z, sh_y, k_y, pad_y
    )
    src_x, kern_x, out_x = _axis_tables(
        cols, p_sx, p_dx, wavelength, distance_z, sh_x, k_x, pad_x
    )
    const = p_sy * p_sx * np.exp(2j * math.pi * distance_z / wavelength) / (
        1j * wavelength * distance_z
    )
    return PropagationPlan(
        distance_z=distance_z,
        source_pitch_y=p_sy,
        source_pitch_x=p_sx,
        dest_pitch_y=p_dy,
        dest_pitch_x=p_dx,
        wavelength=wavelength,
        rows=rows,
        cols=cols,
        shift_y=sh_y,
        shift_x=sh_x,
        band_limit_y=k_y,
        band_limit_x=k_x,
        tables=_PlanTables(src_y, src_x, kern_y, kern_x, out_y, out_x, complex(const)),
    )


def _pair(value: float | tuple[float, float]) -> tuple[float, float]:
    if isinstance(value, tuple):
        return float(value[0]), float(value[1])
    return float(value), float(value)


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=0.0)


def _check_field(plan: PropagationPlan, field: ComplexField, pitch_y: float, pitch_x: float):
    if field.samples.shape != (plan.rows, plan.cols):
        raise PlanMismatch(
            f"field grid {field.samples.shape} != plan grid ({plan.rows}, {plan.cols})"
        )
    if not (_close(field.pitch_y, pitch_y) and _close(field.pitch_x, pitch_x)):
        raise PlanMismatch(
            f"field pitch ({field.pitch_y}, {field.pitch_x}) != "
            f"plan pitch ({pitch_y}, {pitch_x})"
        )
    if not _close(field.wavelength, plan.wavelength):
        raise PlanMismatch(
            f"field wavelength {field.wavelength} != plan wavelength {plan.wavelength}"
        )


def propagate(plan: PropagationPlan, field: ComplexField) -> ComplexField:
    """Propagate `field` from the plan's source plane to its destination.

    The field must live on the plan's source grid (same shape, pitches, and
    wavelength, to within 1e-9 relative). Returns the destination-plane
    field sampled at the destination pitch on the (possibly shifted) window.

    Two per-thread scratch buffers of the padded size (up to 4x the field
    area each, complex128) are retained between calls to keep the hot path
    free of large allocations.
    """
    _check_field(plan, field, plan.source_pitch_y, plan.source_pitch_x)
    t = plan.tables
    rows, cols = plan.rows, plan.cols
    pad_y, pad_x = t.kern_y.size, t.kern_x.size
    oy = (pad_y - rows) // 2
    band = slice(oy, oy + rows)
    buf = kernels.padded_source(
        field.samples, t.src_y, t.src_x, (pad_y, pad_x), out=_scratch_slot("pad", (pad_y, pad_x))
    )
    # The fftshift/ifftshift pair that would normally bracket the diagonal
    # kernel multiply cancels exactly for even padded dims, so the whole
    # convolution runs shift-free. The per-axis transforms are pruned: on
    # the way in only the central rows are nonzero, and on the way out only
    # the central rows are kept, so each x-direction pass skips the padding
    # rows. The y-direction transforms run on a transposed copy so they
    # sweep contiguous memory: on buffers past cache size a strided sweep
    # costs about twice what the two band transposes add.
    rows_fft = _fft.fft(buf[band], axis=1, workers=-1, overwrite_x=True)
    alt = kernels.transpose_into_band(_scratch_slot("alt", (pad_x, pad_y)), rows_fft, oy)
    spectrum = _fft.fft(alt, axis=1, workers=-1, overwrite_x=True)
    kernels.apply_kernel(spectrum, t.kern_x, t.kern_y)
    back = _fft.ifft(spectrum, axis=1, workers=-1, overwrite_x=True)
    core = _fft.ifft(
        kernels.transpose_from_band(buf[band], back, oy), axis=1, workers=-1, overwrite_x=True
    )
    samples = kernels.modulated_crop(core, t.out_y, t.out_x, t.const)
    return ComplexField(samples, plan.dest_pitch_y, plan.dest_pitch_x, plan.wavelength)


def inverse_plan(plan: PropagationPlan) -> PropagationPlan:
    """The plan that undoes `plan`: negated distance, swapped pitches,
    negated window shift. Its band limits equal the forward plan's."""
    return make_plan(
        -plan.distance_z,
        (plan.dest_pitch_y, plan.dest_pitch_x),
        (plan.source_pitch_y, plan.source_pitch_x),
        plan.wavelength,
        (plan.rows, plan.cols),
        (-plan.shift_y, -plan.shift_x),
    )


def propagate_inverse(plan: PropagationPlan, field: ComplexField) -> ComplexField:
    """Propagate a destination-plane field back to the plan's source plane.

    `field` must live on the plan's destination grid. Equivalent to
    ``propagate(inverse_plan(plan), field)``.
    """
    _check_field(plan, field, plan.dest_pitch_y, plan.dest_pitch_x)
    return propagate(inverse_plan(plan), field)


def propagate_direct_dft(
    field: ComplexField,
    distance_z: float,
    dest_pitch: float | tuple[float, float],
    shift: float | tuple[float, float] = 0.0,
    *,
    allow_large: bool = False,
) -> ComplexField:
    """Brute-force reference propagator: the literal double sum

        out[p, q] = C * sum_{n, m} u[n, m]
                    * exp(1j * pi * ((yd_p - ys_n)^2 + (xd_q - xs_m)^2)
                          / (wavelength * z))

    with C = pitch_y * pitch_x * exp(2j pi z / wavelength) / (1j wavelength
    z). No FFT, no padding, no band limit; cost is O(N^2 M^2), so grids above
    128 x 128 raise :class:`OracleTooLarge` unless `allow_large` is set.
    """
    p_dy, p_dx = _pair(dest_pitch)
    sh_y, sh_x = _pair(shift)
    distance_z = float(distance_z)
    if distance_z == 0.0 or not math.isfinite(distance_z):
        raise InvalidGeometry(f"distance_z must be finite and nonzero, got {distance_z}")
    if p_dy <= 0.0 or p_dx <= 0.0:
        raise InvalidGeometry(f"dest pitch must be positive, got ({p_dy}, {p_dx})")
    rows, cols = field.samples.shape
    if rows * cols > _ORACLE_LIMIT and not allow_large:
        raise OracleTooLarge(
            f"direct summation on {rows}x{cols} is O(N^4); pass allow_large=True to force"
        )
    wavelength = field.wavelength
    ys = (np.arange(rows, dtype=np.float64) - rows // 2) * field.pitch_y
    xs = (np.arange(cols, dtype=np.float64) - cols // 2) * field.pitch_x
    yd = (np.arange(rows, dtype=np.float64) - rows // 2) * p_dy + sh_y
    xd = (np.arange(cols, dtype=np.float64) - cols // 2) * p_dx + sh_x
    coef = math.pi / (wavelength * distance_z)
    const = field.pitch_y * field.pitch_x * np.exp(
        2j * math.pi * distance_z / wavelength
    ) / (1j * wavelength * distance_z)
    samples = const * kernels.direct_fresnel_sum(field.samples, ys, xs, yd, xd, coef)
    return ComplexField(samples, p_dy, p_dx, wavelength)
