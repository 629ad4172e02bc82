"""Deterministic, non-deterministic and probabilistic choice.

A :class:`Choice` is an immutable container of one of three kinds:

* ``DET``  holds a single value,
* ``NDET`` holds a finite non-empty set of values,
* ``PROB`` holds a finite distribution (value -> probability).

The module-level functions give the functorial action (:func:`map_choice`)
and the three natural transformations used by the process combinators:
:func:`flatten` (choice of choices to a single choice), :func:`distribute`
(pushing a choice out of ``A + B x C(X)``) and :func:`pair` (product of two
choices).
"""

from __future__ import annotations

import enum
import math
from typing import Callable, Iterable, Mapping

from .errors import InvalidChoiceError, MixedChoiceError
from .values import Tagged, sort_key

PROB_TOL = 1e-12
NORM_TOL = 1e-9


class Kind(enum.Enum):
    DET = "det"
    NDET = "ndet"
    PROB = "prob"

    def __str__(self):
        return self.value


def combine(k1: Kind, k2: Kind) -> Kind:
    """Kind of a choice made by ``k1`` followed by (or alongside) ``k2``."""
    if k1 is Kind.DET:
        return k2
    if k2 is Kind.DET or k1 is k2:
        return k1
    raise MixedChoiceError(f"cannot combine {k1} choice with {k2} choice")


class Choice:
    __slots__ = ("kind", "_data", "_support", "_hash")

    def __init__(self, kind: Kind, data):
        # use the det/ndet/prob constructors; they validate
        self.kind = kind
        self._data = data
        self._support = None
        self._hash = None

    @classmethod
    def det(cls, value) -> Choice:
        return cls(Kind.DET, value)

    @classmethod
    def ndet(cls, values: Iterable) -> Choice:
        s = frozenset(values)
        if not s:
            raise InvalidChoiceError("non-deterministic choice must be non-empty")
        return cls(Kind.NDET, s)

    @classmethod
    def prob(cls, dist: Mapping | Iterable) -> Choice:
        items = dist.items() if isinstance(dist, Mapping) else dist
        acc: dict = {}
        for v, p in items:
            p = float(p)
            if not (p >= 0.0) or math.isinf(p):
                raise InvalidChoiceError(f"probability {p!r} for {v!r} is not in [0, 1]")
            acc[v] = acc.get(v, 0.0) + p
        acc = {v: p for v, p in acc.items() if p > 0.0}
        if not acc:
            raise InvalidChoiceError("distribution has no mass")
        for v, p in acc.items():
            if p > 1.0 + NORM_TOL:
                raise InvalidChoiceError(f"probability {p!r} for {v!r} exceeds 1")
        total = math.fsum(acc.values())
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidChoiceError(f"probabilities sum to {total!r}, not 1")
        return cls(Kind.PROB, acc)

    @property
    def value(self):
        if self.kind is not Kind.DET:
            raise AttributeError("only deterministic choices have a single value")
        return self._data

    def support(self) -> list:
        """Values with non-zero weight, in canonical order."""
        if self._support is None:
            if self.kind is Kind.DET:
                self._support = [self._data]
            else:
                self._support = sorted(self._data, key=sort_key)
        return self._support

    def items(self) -> list[tuple]:
        """``(value, weight)`` pairs in canonical order; weight is None unless PROB."""
        if self.kind is Kind.PROB:
            return [(v, self._data[v]) for v in self.support()]
        return [(v, None) for v in self.support()]

    def probability(self, v) -> float:
        if self.kind is Kind.PROB:
            return self._data.get(v, 0.0)
        if self.kind is Kind.DET:
            return 1.0 if v == self._data else 0.0
        raise TypeError("non-deterministic choices carry no probabilities")

    def total(self) -> float:
        if self.kind is Kind.PROB:
            return math.fsum(self._data.values())
        return 1.0

    def __len__(self):
        return 1 if self.kind is Kind.DET else len(self._data)

    def __eq__(self, other):
        if not isinstance(other, Choice):
            return NotImplemented
        if self.kind is not other.kind:
            return False
        if self.kind is not Kind.PROB:
            return self._data == other._data
        if self._data.keys() != other._data.keys():
            return False
        return all(abs(p - other._data[v]) <= PROB_TOL for v, p in self._data.items())

    def __hash__(self):
        if self._hash is None:
            if self.kind is Kind.DET:
                self._hash = hash((Kind.DET, self._data))
            else:
                self._hash = hash((self.kind, frozenset(self._data)))
        return self._hash

    def sort_key(self):
        return (self.kind.value, tuple((sort_key(v), p or 0.0) for v, p in self.items()))

    def __repr__(self):
        if self.kind is Kind.DET:
            return f"Det({self._data!r})"
        if self.kind is Kind.NDET:
            return "NDet{" + ", ".join(repr(v) for v in self.support()) + "}"
        return "Prob{" + ", ".join(f"{v!r}: {p:.6g}" for v, p in self.items()) + "}"


def _values(c: Choice):
    # unordered iteration for internal use; canonical order is only for display
    return (c._data,) if c.kind is Kind.DET else c._data


def unit(kind: Kind, value) -> Choice:
    """The trivial choice of ``value`` in the given kind."""
    if kind is Kind.DET:
        return Choice.det(value)
    if kind is Kind.NDET:
        return Choice(Kind.NDET, frozenset((value,)))
    return Choice(Kind.PROB, {value: 1.0})


def lift(c: Choice, kind: Kind) -> Choice:
    """Embed a choice into ``kind``; only DET choices can change kind."""
    if c.kind is kind:
        return c
    if c.kind is Kind.DET:
        return unit(kind, c.value)
    raise MixedChoiceError(f"cannot view a {c.kind} choice as {kind}")


def map_choice(c: Choice, f: Callable) -> Choice:
    if c.kind is Kind.DET:
        return Choice.det(f(c._data))
    if c.kind is Kind.NDET:
        return Choice(Kind.NDET, frozenset(f(x) for x in c._data))
    out: dict = {}
    for x, p in c._data.items():
        y = f(x)
        out[y] = out.get(y, 0.0) + p
    return Choice(Kind.PROB, out)


def flatten(outer: Choice) -> Choice:
    """Collapse a choice of choices into one choice of the combined kind."""
    inner_kind = Kind.DET
    for inner in _values(outer):
        if not isinstance(inner, Choice):
            raise TypeError(f"flatten expects a choice of choices, got {inner!r}")
        inner_kind = combine(inner_kind, inner.kind)
    kind = combine(outer.kind, inner_kind)
    if outer.kind is Kind.DET:
        return lift(outer.value, kind)
    if kind is Kind.NDET:
        return Choice(Kind.NDET, frozenset().union(*(lift(z, kind)._data for z in outer._data)))
    out: dict = {}
    for inner, w in outer._data.items():
        for x, p in lift(inner, kind)._data.items():
            out[x] = out.get(x, 0.0) + w * p
    return Choice(Kind.PROB, out)


def distribute(x, kind: Kind) -> Choice:
    """Distributive law ``A + B x C(X) -> C(A + B x X)``.

    ``x`` is either ``Tagged("L", a)`` or ``Tagged("R", (b, choice))``. The
    result is a choice of ``kind`` over ``Tagged("L", a)`` or
    ``Tagged("R", (b, u))``.
    """
    if not isinstance(x, Tagged) or x.tag not in ("L", "R"):
        raise TypeError(f"distribute expects an L/R injection, got {x!r}")
    if x.tag == "L":
        return unit(kind, x)
    b, inner = x.value
    inner = lift(inner, combine(kind, inner.kind))
    return map_choice(inner, lambda u: Tagged("R", (b, u)))


def pair(c1: Choice, c2: Choice) -> Choice:
    """Joint choice over pairs ``(x, y)``."""
    kind = combine(c1.kind, c2.kind)
    if c1.kind is Kind.DET:
        x = c1.value
        d = distribute(Tagged("R", (x, c2)), c2.kind)
        return map_choice(d, lambda t: t.value)
    if c2.kind is Kind.DET:
        y = c2.value
        return map_choice(c1, lambda x: (x, y))
    if kind is Kind.NDET:
        return Choice(Kind.NDET, frozenset((x, y) for x in c1._data for y in c2._data))
    out = {}
    for x, p in c1._data.items():
        for y, q in c2._data.items():
            out[(x, y)] = p * q
    return Choice(Kind.PROB, out)
