"""Deterministic report emission.

Reports must be byte-identical across runs for golden-file regression, so
floats are rendered with a fixed 17-significant-digit format instead of
the shortest-roundtrip repr, and JSON key order follows construction
order.  CSV numbers use full-precision scientific notation.
"""

from __future__ import annotations

import math

from .errors import ValidationError

__all__ = ["format_float", "dumps_json", "csv_text", "complex_pair"]


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(float(x), ".17g")


def complex_pair(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _encode(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if not isinstance(k, str):
                raise ValidationError("report keys must be strings")
            if i:
                out.append(", ")
            _encode(k, out)
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        try:
            import numpy as np

            if isinstance(obj, np.integer):
                out.append(str(int(obj)))
                return
            if isinstance(obj, np.floating):
                out.append(format_float(float(obj)))
                return
            if isinstance(obj, np.bool_):
                out.append("true" if obj else "false")
                return
        except ImportError:  # pragma: no cover
            pass
        raise ValidationError(f"cannot serialize {type(obj).__name__} into a report")


def dumps_json(obj) -> str:
    out: list = []
    _encode(obj, out)
    out.append("\n")
    return "".join(out)


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    try:
        import numpy as np

        if isinstance(v, np.integer):
            return str(int(v))
    except ImportError:  # pragma: no cover
        pass
    x = float(v)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17e")


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"
