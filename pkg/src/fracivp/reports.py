"""Deterministic JSON/CSV emission.

Identical inputs must produce byte-identical outputs, so this module owns
all number formatting: floats are printed with 17 significant digits and
dictionaries keep their insertion order (never sorted).
"""

import json
import math
from typing import Any

__all__ = ["format_float", "dumps", "solution_csv"]


def format_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite float {value!r}")
    return format(value, ".17g")


def dumps(value: Any, indent: int = 0) -> str:
    """Render value as JSON with stable key order and .17g floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(key))}: {dumps(item, indent + 1)}"
            for key, item in value.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{dumps(item, indent + 1)}" for item in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def solution_csv(grid, values, residuals) -> str:
    """CSV with header x,u,residual and 17-significant-digit floats."""
    lines = ["x,u,residual"]
    for x, u, r in zip(grid, values, residuals):
        lines.append(f"{format_float(float(x))},{format_float(float(u))},{format_float(float(r))}")
    return "\n".join(lines) + "\n"
