"""Engine backend selection.

The compiled extension (batchfocal._core) is preferred when importable; the
pure-Python twin is the fallback.  Both expose the same run_search and
dijkstra_cost entry points and produce identical results; only speed
differs.  Set BATCHFOCAL_BACKEND=pure (or =compiled) to force one.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _core_py

_FORCED = os.environ.get("BATCHFOCAL_BACKEND", "").strip().lower()

try:
    from . import _core as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

if _FORCED == "pure":
    _default = _core_py
elif _FORCED == "compiled":
    if _compiled is None:
        raise ImportError("BATCHFOCAL_BACKEND=compiled but the extension is not built")
    _default = _compiled
else:
    _default = _compiled if _compiled is not None else _core_py


def kernel(name: str | None = None) -> ModuleType:
    """Resolve an engine module: None for the default, 'pure' or 'compiled'."""
    if name is None:
        return _default
    if name == "pure":
        return _core_py
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled engine requested but the extension is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r} (use 'pure' or 'compiled')")


def backend_name() -> str:
    return "compiled" if _default is _compiled else "pure"


def compiled_available() -> bool:
    return _compiled is not None
