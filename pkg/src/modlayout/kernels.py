"""Kernel backend selection.

The compiled extension is used when it is importable; set
``MODLAYOUT_PURE_PYTHON=1`` to force the numpy fallback.  Both backends
expose ``attraction``, ``repulsion_exact`` and ``bh_repulsion`` with
identical signatures and semantics.
"""
from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("MODLAYOUT_PURE_PYTHON", "") not in ("", "0"):
    _backend = _pykernels
else:
    try:
        from . import _ckernels as _backend
    except ImportError:  # extension not built
        _backend = _pykernels

BACKEND = "compiled" if _backend is not _pykernels else "python"

attraction = _backend.attraction
repulsion_exact = _backend.repulsion_exact
bh_repulsion = _backend.bh_repulsion

__all__ = ["BACKEND", "attraction", "repulsion_exact", "bh_repulsion"]
