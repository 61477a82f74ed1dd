"""Selects the trajectory kernel: compiled extension or pure Python.

The compiled module is preferred when importable.  Set
WEBERATOM_FORCE_PYTHON=1 to force the pure-Python kernel (useful for
debugging and for the parity tests, which compare both).
"""

import os

from . import _kernel_py

if os.environ.get("WEBERATOM_FORCE_PYTHON") == "1":
    kernel = _kernel_py
    backend_name = "python"
else:
    try:
        from . import _kernel

        kernel = _kernel
        backend_name = "cython"
    except ImportError:
        kernel = _kernel_py
        backend_name = "python"

KernelParams = _kernel_py.KernelParams


def available_backends():
    """Names of the kernels importable in this installation."""
    names = ["python"]
    try:
        from . import _kernel  # noqa: F401
    except ImportError:
        pass
    else:
        names.insert(0, "cython")
    return names


def get_kernel(name=None):
    """Return a kernel module by name (default: the selected one)."""
    if name is None:
        return kernel
    if name == "python":
        return _kernel_py
    if name == "cython":
        from . import _kernel

        return _kernel
    raise ValueError(f"unknown backend {name!r}")
