"""Build script for the optional compiled kernels.

The Cython extension is skipped when Cython or a C compiler is unavailable;
``entrodyn.kernels`` then falls back to the numpy implementation.
"""
import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "entrodyn._ckernels",
                sources=["src/entrodyn/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
