"""Builds the optional RK4 extension; the package works without it."""
import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    flags = [] if os.name == "nt" else ["-O3", "-fcx-limited-range"]
    ext_modules = cythonize(
        [Extension("qframes.kernels._rk4", ["src/qframes/kernels/_rk4.pyx"],
                   extra_compile_args=flags)],
        compiler_directives={"language_level": "3"},
        quiet=True,
    )

setup(ext_modules=ext_modules)
