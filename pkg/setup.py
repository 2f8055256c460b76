"""Builds the optional Cython statevector kernel.

The package works without the extension (a pure-numpy fallback is selected
at import time), so compilation failures are non-fatal.
"""
import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "springq._kernels",
                ["src/springq/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
