"""Selection between the compiled and the numpy outage kernels.

The compiled extension is preferred when importable; set NNOMA_BACKEND to
"numpy" or "compiled" to force one.  Both produce bit-identical flags, so
the choice only affects speed.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels_cy

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - depends on build environment
    _kernels_cy = None
    HAVE_COMPILED = False

BACKENDS = ("numpy", "compiled")

_env = os.environ.get("NNOMA_BACKEND", "").strip().lower()
if _env and _env not in BACKENDS:
    raise ImportError(f"NNOMA_BACKEND must be one of {BACKENDS}, got {_env!r}")
if _env == "compiled" and not HAVE_COMPILED:
    raise ImportError("NNOMA_BACKEND=compiled but the extension is not built")

_DEFAULT = _env or ("compiled" if HAVE_COMPILED else "numpy")


def active_backend() -> str:
    """Name of the kernel backend used when none is requested explicitly."""
    return _DEFAULT


def get_kernel(backend: str | None = None):
    """The outage_flags kernel for `backend` (default: active_backend())."""
    name = backend or _DEFAULT
    if name not in BACKENDS:
        raise ValueError(f"backend must be one of {BACKENDS}, got {name!r}")
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled backend requested but the extension is not built")
        return _kernels_cy.outage_flags
    return _kernels_py.outage_flags
