"""Byte-stable JSON writer: sorted keys, floats with 17 significant digits."""

import json
import math


def _float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite float {x!r} cannot be written as JSON")
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2) -> str:
    parts: list[str] = []
    _write(obj, parts, indent, 0)
    return "".join(parts)


def _write(obj, out, indent, level):
    if obj is None or isinstance(obj, (bool, str)):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, dict):
        items = sorted(obj.items())
        if not items:
            out.append("{}")
            return
        out.append("{")
        for n, (k, v) in enumerate(items):
            if n:
                out.append(",")
            _newline(out, indent, level + 1)
            out.append(json.dumps(str(k), ensure_ascii=False))
            out.append(": ")
            _write(v, out, indent, level + 1)
        _newline(out, indent, level)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for n, v in enumerate(obj):
            if n:
                out.append(",")
            _newline(out, indent, level + 1)
            _write(v, out, indent, level + 1)
        _newline(out, indent, level)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def _newline(out, indent, level):
    if indent is None:
        if out and out[-1] == ",":
            out.append(" ")
        return
    out.append("\n" + " " * (indent * level))
