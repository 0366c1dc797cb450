"""Build script for the optional compiled kernels.

The extension accelerates the Morton transforms and the nearest-neighbor
beam search; the package falls back to the pure NumPy implementation when
compilation is unavailable, so a failed build is not fatal.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "spatialmem._native._kernels",
        sources=["src/spatialmem/_native/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        language="c++",
        extra_compile_args=["-O3", "-std=c++17"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
