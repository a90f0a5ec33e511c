"""Build script for the optional compiled kernels.

The package installs and runs without the extension; `holoscale._kernels`
falls back to pure NumPy implementations when the compiled module is absent.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "holoscale._kernels._fast",
        ["src/holoscale/_kernels/_fast.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(extensions, language_level="3") if cythonize else [],
)
