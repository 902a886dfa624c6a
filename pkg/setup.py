"""Build script: compiles the optional fast kernels when Cython and a C
compiler are available, and falls back to a pure-Python install otherwise.
The package selects the backend at import time."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("TAILCERT_PURE_PYTHON", "0") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools.extension import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tailcert._kernels._native",
                    sources=["src/tailcert/_kernels/_native.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except Exception:
        ext_modules = []

setup(ext_modules=ext_modules)
