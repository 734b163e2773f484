"""Build script: compiles the Cython stepping kernel when a toolchain is
available.  The package works without it (pure-Python kernel is selected at
import time), so any build failure here is non-fatal."""

import os
import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/windffs/_kernel/_core_cy.pyx"],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        # no -ffast-math: the compiled kernel must match the pure-Python
        # kernel's IEEE double arithmetic
        ext.extra_compile_args = ["-O2"]
except ImportError:
    if os.environ.get("WINDFFS_REQUIRE_EXT"):
        raise
    print("Cython not available; building pure-Python windffs", file=sys.stderr)

setup(ext_modules=ext_modules)
