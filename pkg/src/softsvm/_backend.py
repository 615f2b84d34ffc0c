"""Kernel backend selection.

Two interchangeable backends provide the elementwise kernels: a compiled
Cython extension (``softsvm._kernels``) and a pure-NumPy fallback
(``softsvm._kernels_py``). The compiled one is preferred when it imported
cleanly; the environment variable ``SOFTSVM_BACKEND`` forces a choice
("compiled" or "python"). All family and solver code reaches the kernels
through the module attribute ``kernels`` so the selection is a single
point of truth (and easy to monkeypatch in tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

kernels = _kernels_py
_import_error: str | None = None

_forced = os.environ.get("SOFTSVM_BACKEND", "").strip().lower()

if _forced not in ("", "python", "compiled"):
    raise ImportError(
        f"SOFTSVM_BACKEND must be 'python' or 'compiled', got {_forced!r}"
    )

if _forced != "python":
    try:
        from . import _kernels  # type: ignore[attr-defined]

        kernels = _kernels
    except ImportError as exc:
        _import_error = str(exc)
        if _forced == "compiled":
            raise ImportError(
                "SOFTSVM_BACKEND=compiled but the compiled extension is "
                f"unavailable: {exc}"
            ) from exc


def backend_name() -> str:
    """Name of the active kernel backend: "compiled" or "python"."""
    return kernels.BACKEND


def elementwise(func_name: str, *args):
    """Apply a named array kernel elementwise to the last argument.

    Leading ``args`` are scalar parameters; the final argument is array-like
    of any shape (or a scalar). Returns an array of the same shape, or a
    float for scalar input.
    """
    *params, x = args
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = getattr(kernels, func_name)(*params, flat)
    if arr.ndim == 0:
        return float(out[0])
    return out.reshape(arr.shape)
