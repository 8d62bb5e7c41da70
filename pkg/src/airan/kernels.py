"""Kernel backend selection.

The compiled ``airan._kernels`` extension is used when it imports; otherwise,
or when ``AIRAN_PURE_PYTHON=1`` is set, the numpy fallback is used. Both
backends return identical results, so simulation digests do not depend on
which one is active.
"""
import os

from . import _kernels_py

if os.environ.get("AIRAN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
energy_breakdown = _impl.energy_breakdown
best_split = _impl.best_split


def available_backends():
    """Modules implementing the kernel API that can be imported here."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
        found["cython"] = _kernels
    except ImportError:
        pass
    return found
