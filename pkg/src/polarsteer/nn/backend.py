"""Kernel backend selection.

The compiled extension is used when it imported cleanly; set
POLARSTEER_BACKEND=python to force the pure-numpy fallback (or =cython to
require the extension).
"""

import os

_requested = os.environ.get("POLARSTEER_BACKEND", "auto").lower()

if _requested == "python":
    from . import _pybackend as kernels
elif _requested == "cython":
    from . import _fastcore as kernels  # type: ignore[no-redef]
else:
    try:
        from . import _fastcore as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _pybackend as kernels

BACKEND_NAME = kernels.NAME


def get_backend(name=None):
    """Return a kernel module by name ('python' or 'cython'); default: active."""
    if name is None:
        return kernels
    if name == "python":
        from . import _pybackend
        return _pybackend
    if name == "cython":
        from . import _fastcore
        return _fastcore
    raise ValueError(f"unknown backend {name!r}")
