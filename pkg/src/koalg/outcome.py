"""Outcomes of closed games: a local fold over the game tree.

The fold is given by ``tau_result`` (value of a terminating step) and
``tau_step(u, o)`` (value of a step that outputs ``o`` and continues with
value ``u``). ``tau_step`` must contract in ``u`` with factor ``discount``,
which makes the value of an infinite play the limit of the truncated folds.
A truncated subtree is assigned ``0`` with radius ``M / (1 - discount)``, so
every evaluation comes with a certified sup-norm error bound.
"""

from __future__ import annotations

import dataclasses
import math
import random
from typing import Callable

from .choice import Kind
from .errors import NDetOutcomeError, ResolutionExplosionError, ShapeError, ValidationError
from .game import Game, strip_result
from .process import Process
from .tree import GameTree, Node, unfold

MAX_RESOLUTIONS = 10_000


@dataclasses.dataclass(frozen=True, eq=False)
class OutcomeSpec:
    players: int
    tau_result: Callable[[object], tuple]
    tau_step: Callable[[tuple, object], tuple]
    discount: float
    output_bound: float

    def __post_init__(self):
        if not 0.0 < self.discount < 1.0:
            raise ValidationError(f"discount {self.discount!r} must lie strictly between 0 and 1")
        if not self.output_bound >= 0.0:
            raise ValidationError("output bound must be non-negative")

    @property
    def tail_bound(self) -> float:
        """Sup-norm bound on the value of any subgame."""
        return self.output_bound / (1.0 - self.discount)


@dataclasses.dataclass(frozen=True)
class OutcomeResult:
    value: tuple
    error_bound: float
    exact: bool

    def to_json(self) -> dict:
        return {"value": list(self.value), "error_bound": self.error_bound, "exact": self.exact}


def discounted(players: int, discount: float, stage_payoff: Callable, result_payoff: Callable,
               bound: float) -> OutcomeSpec:
    """Discounted sum: a result counts as is, an output adds to the discounted future."""
    lam = float(discount)

    def tau_step(u, o):
        pay = stage_payoff(o)
        return tuple(lam * x + y for x, y in zip(u, pay))

    def tau_result(r):
        return tuple(float(x) for x in result_payoff(r))

    return OutcomeSpec(players, tau_result, tau_step, lam, float(bound))


def game_outcome_spec(game: Game, discount: float | None = None) -> OutcomeSpec:
    """Discounted outcome of a closed ``game`` (results arrive tagged by the closing)."""
    lam = game.discount if discount is None else discount
    return discounted(game.n_players, lam, game.stage_payoff,
                      lambda r: game.result_payoff(strip_result(r)), game.payoff_bound)


def check_contraction(spec: OutcomeSpec, outputs, samples: int = 100, seed: int = 0) -> bool:
    """Probe ``‖τ(u,o) − τ(v,o)‖∞ ≤ λ‖u − v‖∞`` on random vectors."""
    rng = random.Random(seed)
    outputs = list(outputs)
    scale = spec.tail_bound or 1.0
    for _ in range(samples):
        o = rng.choice(outputs)
        u = tuple(rng.uniform(-scale, scale) for _ in range(spec.players))
        v = tuple(rng.uniform(-scale, scale) for _ in range(spec.players))
        lhs = max(abs(a - b) for a, b in zip(spec.tau_step(u, o), spec.tau_step(v, o)))
        rhs = spec.discount * max(abs(a - b) for a, b in zip(u, v))
        if lhs > rhs + 1e-9:
            return False
    return True


def _single_input(n: Node):
    inputs = {e.input for e in n.edges}
    if len(inputs) > 1:
        raise ShapeError("outcome evaluation needs a closed game tree (one input per node)")


def evaluate(t: GameTree, spec: OutcomeSpec) -> OutcomeResult:
    """Fold a deterministic or probabilistic tree into a value with error bound."""
    if t.kind is Kind.NDET:
        raise NDetOutcomeError("non-deterministic trees have a set of outcomes; use evaluate_ndet")
    zero = (0.0,) * spec.players
    lam = spec.discount
    memo: dict[int, tuple] = {}
    saw_truncation = False

    def value(n: Node) -> tuple[tuple, float]:
        # value of the subgame below n (n's own label not counted)
        nonlocal saw_truncation
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        if n.cls == "truncated":
            saw_truncation = True
            res = (zero, spec.tail_bound)
        else:
            _single_input(n)
            acc = [0.0] * spec.players
            radius = 0.0
            for e in n.edges:
                w = 1.0 if e.probability is None else e.probability
                v, r = contribution(e.target)
                for k in range(spec.players):
                    acc[k] += w * v[k]
                radius += w * r
            if t.kind is Kind.DET and len(n.edges) != 1:
                raise ShapeError("deterministic node without exactly one successor")
            res = (tuple(acc), radius)
        memo[id(n)] = res
        return res

    def contribution(n: Node) -> tuple[tuple, float]:
        if n.cls == "A":
            return spec.tau_result(n.label), 0.0
        v, r = value(n)
        return tuple(spec.tau_step(v, n.label)), lam * r

    v, r = value(t.root)
    exact = not saw_truncation
    return OutcomeResult(tuple(v), 0.0 if exact else r, exact)


def evaluate_ndet(t: GameTree, spec: OutcomeSpec) -> list[OutcomeResult]:
    """Outcomes over every resolution of non-determinism in a closed tree."""
    zero = (0.0,) * spec.players
    lam = spec.discount
    counts: dict[int, int] = {}

    def resolutions(n: Node) -> int:
        hit = counts.get(id(n))
        if hit is None:
            if n.cls in ("A", "truncated"):
                hit = 1
            else:
                _single_input(n)
                hit = sum(resolutions(e.target) for e in n.edges)
            counts[id(n)] = hit
        return hit

    if t.kind is not Kind.NDET and t.kind is not Kind.DET:
        raise NDetOutcomeError("evaluate_ndet handles deterministic or non-deterministic trees")
    total = resolutions(t.root)
    if total > MAX_RESOLUTIONS:
        raise ResolutionExplosionError(
            f"{total} resolutions of non-determinism exceed the cap of {MAX_RESOLUTIONS}")

    memo: dict[int, list] = {}

    def values(n: Node) -> list[tuple[tuple, float]]:
        hit = memo.get(id(n))
        if hit is not None:
            return hit
        if n.cls == "truncated":
            res = [(zero, spec.tail_bound)]
        else:
            res = []
            for e in n.edges:
                if e.target.cls == "A":
                    res.append((tuple(spec.tau_result(e.target.label)), 0.0))
                else:
                    for v, r in values(e.target):
                        res.append((tuple(spec.tau_step(v, e.target.label)), lam * r))
        memo[id(n)] = res
        return res

    seen = {}
    for v, r in values(t.root):
        seen.setdefault((v, r), OutcomeResult(v, r, r == 0.0))
    return sorted(seen.values(), key=lambda o: (o.value, o.error_bound))


def depth_for(spec: OutcomeSpec, eps: float) -> int:
    """Smallest depth whose truncation error ``λ^d · M/(1−λ)`` is at most ``eps``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if spec.tail_bound <= eps:
        return 0
    d = max(0, math.ceil(math.log(eps * (1.0 - spec.discount) / spec.output_bound)
                         / math.log(spec.discount)))
    while spec.discount ** d * spec.tail_bound > eps:
        d += 1
    return d


def evaluate_to_tolerance(closed: Process, initial, spec: OutcomeSpec, eps: float) -> OutcomeResult:
    return evaluate(unfold(closed, initial, depth_for(spec, eps)), spec)
