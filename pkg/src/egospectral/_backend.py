"""Select compiled or pure-Python kernels at import time.

Set ``EGOSPECTRAL_BACKEND=python`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

try:
    if os.environ.get("EGOSPECTRAL_BACKEND", "").lower() == "python":
        raise ImportError("pure-Python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

DEFAULT = "compiled" if _compiled is not None else "python"


def get(name: str | None = None):
    """Kernel module by name; ``None`` picks the default."""
    name = name or DEFAULT
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable (have {sorted(BACKENDS)})") from None
