"""Processes and the operations that build processes from simpler ones.

A process has states ``S``, inputs ``I``, outputs ``O`` and results ``R``
and a step function ``(state, input) -> Choice`` over
``Result(r) | Continue(state', output)``. Spaces are described at runtime by
:class:`Space` so that sums and products of spaces can be formed by the
combinators.

Injection tags used by the combinators:

* :func:`process_sum` tags states, outputs and results with ``"L"``/``"R"``;
* :func:`process_product` tags results ``"Both"`` (a pair of results),
  ``"L0"`` (only the first component finished) and ``"L1"``;
* :func:`cascade` tags results ``"L"`` (from the first process) and ``"R"``.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Callable, Iterable

from .choice import NORM_TOL, Choice, Kind, combine, distribute, flatten, map_choice, pair
from .errors import (
    InputMismatchError,
    InvalidChoiceError,
    KindMismatchError,
    MembershipError,
    ShapeError,
    ValidationError,
)
from .values import UNIT, Tagged, inl, inr

VALIDATION_LIMIT = 10_000
ENUMERATION_LIMIT = 100_000


@dataclasses.dataclass(frozen=True, slots=True)
class Result:
    value: object

    def __repr__(self):
        return f"Result({self.value!r})"


@dataclasses.dataclass(frozen=True, slots=True)
class Continue:
    state: object
    output: object

    def __repr__(self):
        return f"Continue({self.state!r}, {self.output!r})"


@dataclasses.dataclass(frozen=True, eq=False)
class Space:
    """A set of values, given by an enumeration and/or a membership test.

    Two spaces are equal when their names agree and, if both are enumerated,
    their elements agree. ``ANY`` matches every space in compatibility checks.
    """

    name: str
    contains: Callable[[object], bool] | None = None
    elements: tuple | None = None
    factors: tuple | None = None

    def __post_init__(self):
        if self.elements is not None:
            object.__setattr__(self, "elements", tuple(self.elements))
            object.__setattr__(self, "_members", frozenset(self.elements))

    @property
    def finite(self) -> bool:
        return self.elements is not None

    def __contains__(self, v) -> bool:
        if self.elements is not None:
            try:
                return v in self._members
            except TypeError:
                return False
        if self.contains is not None:
            return bool(self.contains(v))
        return True

    def __bool__(self):
        return True

    def __len__(self):
        if self.elements is None:
            raise TypeError(f"space {self.name} is not enumerated")
        return len(self.elements)

    def __iter__(self):
        if self.elements is None:
            raise TypeError(f"space {self.name} is not enumerated")
        return iter(self.elements)

    def __eq__(self, other):
        if not isinstance(other, Space):
            return NotImplemented
        if self.name != other.name:
            return False
        if self.finite and other.finite:
            return self._members == other._members
        return self.finite == other.finite

    def __hash__(self):
        return hash(self.name)

    def __repr__(self):
        return f"Space({self.name})"


def finite_space(name: str, elements: Iterable) -> Space:
    elements = tuple(dict.fromkeys(elements))
    return Space(name, elements=elements)


def predicate_space(name: str, contains: Callable[[object], bool]) -> Space:
    return Space(name, contains=contains)


ANY = Space("?")
EMPTY = Space("∅", elements=())
UNIT_SPACE = Space("1", elements=(UNIT,))


def reals(n: int) -> Space:
    def contains(v):
        return (isinstance(v, tuple) and len(v) == n
                and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v))
    return Space(f"R^{n}", contains=contains)


def compatible(a: Space, b: Space) -> bool:
    return a is ANY or b is ANY or a == b


def product_space(*spaces: Space) -> Space:
    name = "(" + "×".join(s.name for s in spaces) + ")"
    if any(s.finite and len(s) == 0 for s in spaces):
        return Space(name, elements=(), factors=spaces)
    elements = None
    if all(s.finite for s in spaces) and math.prod(len(s) for s in spaces) <= ENUMERATION_LIMIT:
        elements = tuple(itertools.product(*(s.elements for s in spaces)))

    def contains(v):
        return (isinstance(v, tuple) and len(v) == len(spaces)
                and all(x in s for x, s in zip(v, spaces)))
    return Space(name, contains=contains, elements=elements, factors=spaces)


def sum_space(summands: dict[str, Space]) -> Space:
    """Tagged union; ``summands`` maps tag -> space."""
    name = "(" + "+".join(f"{t}:{s.name}" for t, s in summands.items()) + ")"
    elements = None
    if all(s.finite for s in summands.values()):
        total = sum(len(s) for s in summands.values())
        if total <= ENUMERATION_LIMIT:
            elements = tuple(Tagged(t, x) for t, s in summands.items() for x in s.elements)

    def contains(v):
        return isinstance(v, Tagged) and v.tag in summands and v.value in summands[v.tag]
    return Space(name, contains=contains, elements=elements)


@dataclasses.dataclass(frozen=True, eq=False)
class Process:
    states: Space
    inputs: Space
    outputs: Space
    results: Space
    kind: Kind
    step: Callable[[object, object], Choice]
    name: str = ""


def _check_choice(p: Process, c, state, inp):
    if not isinstance(c, Choice):
        raise ValidationError(f"step({state!r}, {inp!r}) returned {c!r}, not a Choice")
    if c.kind is not p.kind:
        raise ValidationError(
            f"step({state!r}, {inp!r}) returned a {c.kind} choice; process is {p.kind}")
    if c.kind is Kind.PROB and abs(c.total() - 1.0) > NORM_TOL:
        raise ValidationError(f"step({state!r}, {inp!r}) has total mass {c.total()!r}")
    for x in c.support():
        match x:
            case Result(r):
                if r not in p.results:
                    raise ValidationError(f"result {r!r} is outside {p.results.name}")
            case Continue(s, o):
                if s not in p.states:
                    raise ValidationError(f"state {s!r} is outside {p.states.name}")
                if o not in p.outputs:
                    raise ValidationError(f"output {o!r} is outside {p.outputs.name}")
            case _:
                raise ValidationError(f"step produced {x!r}, expected Result or Continue")


def make_process(states: Space, inputs: Space, outputs: Space, results: Space,
                 kind: Kind, step: Callable, name: str = "") -> Process:
    """Build a process and check it on every (state, input) pair when that is cheap."""
    p = Process(states, inputs, outputs, results, kind, step, name)
    if states.finite and inputs.finite and len(states) * len(inputs) <= VALIDATION_LIMIT:
        for s in states:
            for i in inputs:
                try:
                    c = step(s, i)
                except InvalidChoiceError as exc:
                    raise ValidationError(f"step({s!r}, {i!r}): {exc}") from exc
                _check_choice(p, c, s, i)
    return p


def probe(p: Process, state, inp) -> Choice:
    """Run one step of ``p``, checking arguments against the declared spaces."""
    if state not in p.states:
        raise MembershipError(f"state {state!r} is not in {p.states.name}")
    if inp not in p.inputs:
        raise MembershipError(f"input {inp!r} is not in {p.inputs.name}")
    c = p.step(state, inp)
    if c.kind is not p.kind:
        raise ValidationError(f"process {p.name or '?'} produced a {c.kind} choice, declared {p.kind}")
    return c


def process_sum(p0: Process, p1: Process) -> Process:
    """Either ``p0`` or ``p1`` takes the step, depending on the state's tag."""
    if p0.kind is not p1.kind:
        raise KindMismatchError(f"sum needs equal choice kinds, got {p0.kind} and {p1.kind}")
    if not compatible(p0.inputs, p1.inputs):
        raise InputMismatchError(f"sum needs equal inputs, got {p0.inputs.name} and {p1.inputs.name}")

    def retag(tag):
        def f(x):
            if isinstance(x, Result):
                return Result(Tagged(tag, x.value))
            return Continue(Tagged(tag, x.state), Tagged(tag, x.output))
        return f

    left, right = retag("L"), retag("R")

    def step(s, i):
        match s:
            case Tagged("L", s0):
                return map_choice(p0.step(s0, i), left)
            case Tagged("R", s1):
                return map_choice(p1.step(s1, i), right)
        raise MembershipError(f"sum state {s!r} carries no L/R tag")

    return Process(
        sum_space({"L": p0.states, "R": p1.states}),
        p0.inputs,
        sum_space({"L": p0.outputs, "R": p1.outputs}),
        sum_space({"L": p0.results, "R": p1.results}),
        p0.kind, step, f"({p0.name}+{p1.name})")


def _joint(x):
    x0, x1 = x
    r0, r1 = isinstance(x0, Result), isinstance(x1, Result)
    if r0 and r1:
        return Result(Tagged("Both", (x0.value, x1.value)))
    if r0:
        return Result(Tagged("L0", x0.value))
    if r1:
        return Result(Tagged("L1", x1.value))
    return Continue((x0.state, x1.state), (x0.output, x1.output))


def process_product(p0: Process, p1: Process) -> Process:
    """Both components step simultaneously on a pair of inputs."""
    kind = combine(p0.kind, p1.kind)

    def step(s, i):
        (s0, s1), (i0, i1) = s, i
        return map_choice(pair(p0.step(s0, i0), p1.step(s1, i1)), _joint)

    results = sum_space({
        "Both": product_space(p0.results, p1.results),
        "L0": p0.results,
        "L1": p1.results,
    })
    return Process(
        product_space(p0.states, p1.states),
        product_space(p0.inputs, p1.inputs),
        product_space(p0.outputs, p1.outputs),
        results, kind, step, f"({p0.name}×{p1.name})")


def map_output(p: Process, f: Callable, outputs: Space | None = None) -> Process:
    """Rewrite every ``(state, output)`` pair with ``f``; results pass through."""
    def g(x):
        if isinstance(x, Result):
            return x
        return Continue(*f(x.state, x.output))

    def step(s, i):
        return map_choice(p.step(s, i), g)

    return dataclasses.replace(p, outputs=p.outputs if outputs is None else outputs, step=step,
                               name=f"({p.name}▷f)")


def map_input(f: Callable, p: Process, inputs: Space = ANY) -> Process:
    """Apply ``f`` to each input before stepping ``p``."""
    def step(s, i):
        return p.step(s, f(i))

    return dataclasses.replace(p, inputs=inputs, step=step, name=f"(f▷{p.name})")


def feedback(p: Process) -> Process:
    """Feed the previous output back in as the second input component.

    ``p`` must take inputs ``I x O`` with ``O`` its output space. The new
    process keeps the last output in its state ``(s, c)`` and takes inputs
    ``I``.
    """
    factors = p.inputs.factors
    if factors is None or len(factors) != 2:
        raise ShapeError(f"feedback needs inputs of shape I×O, got {p.inputs.name}")
    if not compatible(factors[1], p.outputs):
        raise ShapeError(
            f"feedback input component {factors[1].name} does not match outputs {p.outputs.name}")

    def loop(x):
        if isinstance(x, Result):
            return x
        return Continue((x.state, x.output), x.output)

    def step(sc, i):
        s, c = sc
        return map_choice(p.step(s, (i, c)), loop)

    return Process(product_space(p.states, p.outputs), factors[0], p.outputs, p.results,
                   p.kind, step, f"{p.name}↺")


def cascade(p: Process, q: Process) -> Process:
    """Run ``p`` and feed each of its outputs to ``q`` as input.

    If ``p`` terminates its result is returned (tag ``"L"``); if ``q``
    terminates its result is returned (tag ``"R"``) and ``p``'s pending state
    is dropped.
    """
    if not compatible(p.outputs, q.inputs):
        raise ShapeError(f"cascade: outputs {p.outputs.name} do not match inputs {q.inputs.name}")
    kind = combine(p.kind, q.kind)

    def attach(t):
        def f(x):
            if isinstance(x, Result):
                return x
            return (x.state, t, x.output)
        return f

    def run_second(x):
        if isinstance(x, Result):
            return inl(x.value)
        s, t, m = x
        return inr((s, q.step(t, m)))

    def distribute_second(x):
        return distribute(x, q.kind)

    def g(x):
        match x:
            case Tagged("L", r):
                return Result(Tagged("L", r))
            case Tagged("R", (_, Result(r))):
                return Result(Tagged("R", r))
            case Tagged("R", (s, Continue(t, o))):
                return Continue((s, t), o)
        raise ValidationError(f"cascade produced unexpected value {x!r}")

    def step(st, i):
        s, t = st
        staged = map_choice(map_choice(p.step(s, i), attach(t)), run_second)
        return map_choice(flatten(map_choice(staged, distribute_second)), g)

    return Process(
        product_space(p.states, q.states), p.inputs, q.outputs,
        sum_space({"L": p.results, "R": q.results}), kind, step,
        f"({p.name}▷{q.name})")
