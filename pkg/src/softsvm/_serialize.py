"""Deterministic JSON and text rendering helpers.

Documents written by this package must be byte-identical across reruns
and lossless under read-back, so floats are rendered with an explicit
17-significant-digit format instead of repr, and JSON objects preserve
the field order they were built with.
"""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = ["fmt_float", "render_json", "write_text"]


def fmt_float(x: float) -> str:
    """Render a finite float with 17 significant digits (lossless)."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    return format(x, ".17g")


def _is_scalar(v) -> bool:
    return v is None or isinstance(v, (bool, int, float, str, np.integer, np.floating))


def _render_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt_float(v)
    if isinstance(v, str):
        return json.dumps(v)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def _render(obj, out: list, level: int) -> None:
    pad = "  " * level
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, val) in enumerate(items):
            out.append("  " * (level + 1) + json.dumps(str(key)) + ": ")
            _render(val, out, level + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "}")
        return
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            out.append("[]")
            return
        if all(_is_scalar(v) for v in seq):
            out.append("[" + ", ".join(_render_scalar(v) for v in seq) + "]")
            return
        out.append("[\n")
        for i, val in enumerate(seq):
            out.append("  " * (level + 1))
            _render(val, out, level + 1)
            out.append(",\n" if i < len(seq) - 1 else "\n")
        out.append(pad + "]")
        return
    out.append(_render_scalar(obj))


def render_json(obj) -> str:
    """Serialize nested dicts/lists/scalars to indented JSON text."""
    out: list = []
    _render(obj, out, 0)
    out.append("\n")
    return "".join(out)


def write_text(path, text: str) -> None:
    """Write UTF-8 text with untranslated newlines."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
