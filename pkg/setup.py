"""Build script: compiles the optional Cython kernel.

Set DFIREES_PURE=1 to skip the extension; the package falls back to the
pure-Python kernel at import time either way.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("DFIREES_PURE") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "dfirees._kernel._speedups",
                    ["src/dfirees/_kernel/_speedups.pyx"],
                    extra_compile_args=["-O2"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
