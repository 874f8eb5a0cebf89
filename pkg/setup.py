"""Build script for the compiled search engine.

The extension is optional at runtime: batchfocal falls back to the pure
Python engine when the compiled module is missing (see batchfocal.backend).
-ffp-contract=off keeps float arithmetic bit-identical to the pure engine;
do not add -ffast-math.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "batchfocal._core",
    ["src/batchfocal/_core.pyx"],
    language="c++",
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-std=c++17", "-ffp-contract=off"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level=3))
