"""Universal values used for states, inputs, outputs and results.

Plain immutable Python objects serve as values: ``str`` atoms, numbers,
booleans, tuples (pairs, tuples and finite sequences), ``frozenset`` for finite
sets, :class:`FrozenMap` for finite maps and :class:`Tagged` for injections
into sums. Equality is Python's structural equality; :func:`sort_key` gives a
total, run-independent order used wherever iteration order is observable.
"""

from __future__ import annotations

import dataclasses
import math
from collections.abc import Mapping
from typing import Any

Value = Any

STAR = "*"
UNIT = ()


@dataclasses.dataclass(frozen=True, slots=True)
class Tagged:
    """An injection ``value`` into the summand named ``tag``."""

    tag: str
    value: Any

    def __repr__(self):
        return f"{self.tag}({self.value!r})"


def inl(v):
    return Tagged("L", v)


def inr(v):
    return Tagged("R", v)


class FrozenMap(Mapping):
    """Hashable finite map; equality ignores insertion order."""

    __slots__ = ("_d", "_hash")

    def __init__(self, items=()):
        self._d = dict(items)
        self._hash = None

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._d.items()))
        return self._hash

    def __eq__(self, other):
        if isinstance(other, FrozenMap):
            return self._d == other._d
        return NotImplemented

    def __repr__(self):
        return f"FrozenMap({self._d!r})"


def sort_key(v) -> tuple:
    """Total order on values, stable across interpreter runs."""
    if v is None:
        return (0,)
    if isinstance(v, bool):
        return (1, int(v))
    if isinstance(v, (int, float)):
        if isinstance(v, float) and math.isnan(v):
            return (2, math.inf, 1)
        return (2, v, 0)
    if isinstance(v, str):
        return (3, v)
    if isinstance(v, tuple):
        return (4, len(v), tuple(sort_key(x) for x in v))
    if isinstance(v, Tagged):
        return (5, v.tag, sort_key(v.value))
    if isinstance(v, frozenset):
        return (6, len(v), tuple(sorted(sort_key(x) for x in v)))
    if isinstance(v, FrozenMap):
        return (7, len(v), tuple(sorted((sort_key(k), sort_key(x)) for k, x in v.items())))
    own = getattr(v, "sort_key", None)
    if callable(own):
        return (8, type(v).__name__, own())
    if dataclasses.is_dataclass(v):
        return (9, type(v).__name__,
                tuple(sort_key(getattr(v, f.name)) for f in dataclasses.fields(v)))
    return (10, type(v).__name__, repr(v))


def sorted_values(values):
    return sorted(values, key=sort_key)


def to_json(v):
    """Plain JSON-compatible encoding of a value (tuples become lists)."""
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, tuple):
        return [to_json(x) for x in v]
    if isinstance(v, Tagged):
        return {"tag": v.tag, "value": to_json(v.value)}
    if isinstance(v, frozenset):
        return {"set": [to_json(x) for x in sorted_values(v)]}
    if isinstance(v, FrozenMap):
        keys = sorted_values(v)
        return {"map": [[to_json(k), to_json(v[k])] for k in keys]}
    if hasattr(v, "to_json"):
        return v.to_json()
    if dataclasses.is_dataclass(v):
        out = {"type": type(v).__name__}
        for f in dataclasses.fields(v):
            out[f.name] = to_json(getattr(v, f.name))
        return out
    return repr(v)


def show(v) -> str:
    """Compact human-readable rendering used in text output and DOT labels."""
    if isinstance(v, str):
        return v
    if isinstance(v, float):
        return format(v, ".6g")
    if isinstance(v, tuple):
        return "(" + ",".join(show(x) for x in v) + ")"
    if isinstance(v, Tagged):
        return f"{v.tag}:{show(v.value)}"
    if isinstance(v, frozenset):
        return "{" + ",".join(show(x) for x in sorted_values(v)) + "}"
    return repr(v)
