"""Hot numeric kernels with runtime implementation selection.

The compiled Cython module is preferred when it imported cleanly; setting
the environment variable HOLOSCALE_PURE=1 before import forces the pure
NumPy fallback. `IMPL` names the active implementation ("cython" or
"numpy").
"""

import os

from . import _numpy as _numpy_impl

_impl = _numpy_impl
if os.environ.get("HOLOSCALE_PURE", "0").strip() in ("", "0"):
    try:
        from . import _fast as _fast_impl

        _impl = _fast_impl
    except ImportError:
        pass

IMPL: str = _impl.IMPL
padded_source = _impl.padded_source
apply_kernel = _impl.apply_kernel
transpose_into_band = _impl.transpose_into_band
transpose_from_band = _impl.transpose_from_band
modulated_crop = _impl.modulated_crop
direct_fresnel_sum = _impl.direct_fresnel_sum
local_stats = _impl.local_stats

__all__ = [
    "IMPL",
    "padded_source",
    "apply_kernel",
    "transpose_into_band",
    "transpose_from_band",
    "modulated_crop",
    "direct_fresnel_sum",
    "local_stats",
]
