"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when ``H2P_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
pure-Python ``_pykernels`` module is used. Both expose the same functions.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels


def _load_compiled() -> ModuleType | None:
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels


def _select() -> tuple[ModuleType, str]:
    if os.environ.get("H2P_PURE_PYTHON", "0") not in ("", "0"):
        return _pykernels, "python"
    compiled = _load_compiled()
    if compiled is None:
        return _pykernels, "python"
    return compiled, "compiled"


kernels, BACKEND = _select()


def available_backends() -> dict[str, ModuleType]:
    """All importable kernel modules, keyed by backend name."""
    out = {"python": _pykernels}
    compiled = _load_compiled()
    if compiled is not None:
        out["compiled"] = compiled
    return out
