"""Gibbs kernel backend selection.

Prefers the compiled extension (anflo._gibbs) and falls back to the pure
Python twin (anflo._gibbs_py) when the extension is missing.  Setting the
environment variable ANFLO_PURE_PYTHON to a non-empty value forces the
fallback.  Both backends produce bit-identical output for the same inputs,
so the choice only affects speed.
"""

from __future__ import annotations

import os

from . import _gibbs_py

__all__ = ["backend_name", "available_backends", "get_backend"]

_FORCE_PURE = bool(os.environ.get("ANFLO_PURE_PYTHON"))

if not _FORCE_PURE:
    try:
        from . import _gibbs as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _gibbs_py
else:
    _impl = _gibbs_py

train_lda = _impl.train_lda
infer_lda = _impl.infer_lda


def backend_name() -> str:
    """Name of the active backend: "cython" or "python"."""
    return _impl.BACKEND


def available_backends() -> dict[str, object]:
    """All importable kernel modules keyed by backend name."""
    backends: dict[str, object] = {_gibbs_py.BACKEND: _gibbs_py}
    try:
        from . import _gibbs  # type: ignore[attr-defined]

        backends[_gibbs.BACKEND] = _gibbs
    except ImportError:
        pass
    return backends


def get_backend(name: str):
    try:
        return available_backends()[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available") from None
