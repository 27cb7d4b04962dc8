"""Pick the compiled kernels when available, else the numpy fallback.

Set ``PRIMESERIES_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

kernels = _kernels_py
if not os.environ.get("PRIMESERIES_PURE_PYTHON"):
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:  # extension not built
        kernels = _kernels_py

BACKEND: str = kernels.BACKEND


def get_kernels(name: str | None = None):
    """Return a kernel module by name ('compiled' or 'python'); default is the active one."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "compiled":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
