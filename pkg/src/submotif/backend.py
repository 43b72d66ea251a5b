"""Walker backend selection: compiled extension when available, pure Python otherwise.

Set ``SUBMOTIF_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _walk_py

try:
    from . import _walk as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _walk_py.Walker}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled.Walker

_requested = os.environ.get("SUBMOTIF_BACKEND", "").strip().lower()
if _requested and _requested not in _BACKENDS:
    raise ImportError(f"walker backend {_requested!r} is not available")
BACKEND = _requested or ("cython" if _compiled is not None else "python")
Walker = _BACKENDS[BACKEND]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def walker_class(name: str | None = None):
    """The walker class for ``name`` (default: the active backend)."""
    return _BACKENDS[name or BACKEND]
