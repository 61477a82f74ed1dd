"""Build script: compiles the trajectory hot-loop kernel.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed build is downgraded to a warning rather than an
install error.
"""

import warnings

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "weberatom._kernel",
                ["src/weberatom/_kernel.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"Cython unavailable ({exc}); installing pure-Python kernel only")
    extensions = []

setup(ext_modules=extensions)
