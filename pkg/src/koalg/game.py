"""Games, strategies and the closing of a game over a strategy profile."""

from __future__ import annotations

import dataclasses
import random
from functools import reduce
from typing import Callable, Mapping, Sequence

from .choice import Choice, Kind, combine, map_choice
from .errors import NDetUnresolvedError, ShapeError, ValidationError
from .process import (
    EMPTY,
    UNIT_SPACE,
    Continue,
    Process,
    Result,
    Space,
    cascade,
    feedback,
    finite_space,
    map_input,
    map_output,
    probe,
    process_product,
    product_space,
)
from .values import STAR, UNIT


@dataclasses.dataclass(frozen=True, eq=False)
class Strategy:
    """A never-terminating process from observations to actions.

    ``step(e, b)`` returns a choice over pairs ``(e', a)``.
    """

    epistemic: Space
    kind: Kind
    step: Callable[[object, object], Choice]
    initial: object = STAR
    name: str = ""

    def with_initial(self, e) -> Strategy:
        return dataclasses.replace(self, initial=e)

    def as_process(self, observations: Space, actions: Space) -> Process:
        def step(e, b):
            return map_choice(self.step(e, b), lambda ea: Continue(ea[0], ea[1]))
        return Process(self.epistemic, observations, actions, EMPTY, self.kind, step,
                       self.name or "σ")


StrategyProfile = Mapping[object, Strategy]


@dataclasses.dataclass(frozen=True, eq=False)
class Game:
    """A process over action profiles plus everything needed to play and score it.

    ``observe[p](output, profile)`` is what player ``p`` sees after a turn.
    ``stage_payoff(output)`` and ``result_payoff(result)`` map outputs and
    results to payoff vectors; ``payoff_bound`` bounds the sup-norm of both.
    """

    players: tuple
    actions: tuple[Space, ...]
    observations: tuple[Space, ...]
    core: Process
    observe: tuple[Callable, ...]
    initial_state: object
    seed_output: object
    seed_actions: tuple
    stage_payoff: Callable[[object], tuple]
    result_payoff: Callable[[object], tuple]
    payoff_bound: float
    discount: float = 0.9
    name: str = ""
    visibility: str = "custom"
    strategies: tuple[str, ...] = ()

    @property
    def n_players(self) -> int:
        return len(self.players)

    def index(self, player) -> int:
        for n, p in enumerate(self.players):
            if p == player or str(p) == str(player):
                return n
        raise KeyError(f"unknown player {player!r}; players are {list(self.players)}")

    def action_space(self) -> Space:
        return product_space(*self.actions)

    def observations_for(self, output, profile) -> tuple:
        return tuple(beta(output, profile) for beta in self.observe)


def make_game(players: Sequence, actions: Sequence[Space], observations: Sequence[Space],
              core: Process, observe: Sequence[Callable], initial_state, seed_output,
              seed_actions: Sequence, stage_payoff: Callable, result_payoff: Callable,
              payoff_bound: float, discount: float = 0.9, name: str = "",
              visibility: str = "custom", strategies: Sequence[str] = ()) -> Game:
    players = tuple(players)
    if not players:
        raise ValidationError("players: the set N of players is empty")
    if len(set(map(str, players))) != len(players):
        raise ValidationError("players: player ids must be distinct")
    actions, observations, observe = tuple(actions), tuple(observations), tuple(observe)
    for what, seq in (("actions", actions), ("observations", observations),
                      ("observation functions", observe)):
        if len(seq) != len(players):
            raise ValidationError(f"{what}: expected one per player, got {len(seq)}")
    for p, a in zip(players, actions):
        if not a.finite or len(a) == 0:
            raise ValidationError(f"actions: A_{p} must be a finite, enumerated, non-empty set")
    profile_space = product_space(*actions)
    if core.inputs.finite and profile_space.finite:
        if set(core.inputs.elements) != set(profile_space.elements):
            raise ValidationError("game step: inputs must be the product of the action sets")
    seed_actions = tuple(seed_actions)
    if seed_actions not in profile_space:
        raise ValidationError(f"seed actions {seed_actions!r} are not an action profile")
    if seed_output not in core.outputs:
        raise ValidationError(f"outputs: seed output {seed_output!r} is not in {core.outputs.name}")
    if initial_state not in core.states:
        raise ValidationError(f"states: initial state {initial_state!r} is not in {core.states.name}")
    for p, beta, b in zip(players, observe, observations):
        seen = beta(seed_output, seed_actions)
        if seen not in b:
            raise ValidationError(
                f"observation function of player {p}: {seen!r} is not in B_{p} ({b.name})")
    if not 0.0 < discount < 1.0:
        raise ValidationError(f"outcome: discount {discount!r} must lie in (0, 1)")
    if not payoff_bound >= 0.0:
        raise ValidationError("outcome: payoff bound must be non-negative")
    return Game(players, actions, observations, core, observe, initial_state, seed_output,
                seed_actions, stage_payoff, result_payoff, float(payoff_bound), discount,
                name, visibility, tuple(strategies))


def dummy_strategy(game: Game, player) -> Strategy:
    """The non-deterministic strategy that offers every action, whatever is observed."""
    acts = game.actions[game.index(player)]
    choice = Choice.ndet((STAR, a) for a in acts)

    def step(e, b):
        return choice

    return Strategy(finite_space("1", (STAR,)), Kind.NDET, step, STAR, "dummy")


def complete_profile(game: Game, profile: StrategyProfile) -> tuple[Strategy, ...]:
    """Strategies in player order, with dummies for players lacking one."""
    given = {}
    for key, strat in (profile or {}).items():
        given[game.index(key)] = strat
    return tuple(given.get(n, None) or dummy_strategy(game, p)
                 for n, p in enumerate(game.players))


def _nest(xs: Sequence):
    return reduce(lambda acc, x: (acc, x), xs[1:], xs[0])


def _unnest(v, n: int) -> tuple:
    out = []
    for _ in range(n - 1):
        v, last = v
        out.append(last)
    out.append(v)
    return tuple(reversed(out))


def fix_strategies(game: Game, profile: StrategyProfile) -> Process:
    """Close ``game`` over the profile, giving a process with unit input.

    Built as ``[[f ▷ ∏σ_p]↺ ▷ γ]↺``: the product of the players' strategies
    reads observations computed from the last output and action profile,
    feeds its actions back into its own state, cascades them into the game
    and finally feeds the game's output back.
    """
    strategies = complete_profile(game, profile)
    kind = game.core.kind
    for s in strategies:
        kind = combine(kind, s.kind)  # raises early on an ndet/prob mix

    procs = [s.as_process(b, a) for s, b, a in zip(strategies, game.observations, game.actions)]
    joint = reduce(process_product, procs)
    n = game.n_players
    profiles = game.action_space()
    flat = map_output(joint, lambda e, acts: (e, _unnest(acts, n)), outputs=profiles)

    def observe(x):
        c, acts = x
        return _nest(game.observations_for(c, acts))

    players = map_input(observe, flat, inputs=product_space(game.core.outputs, profiles))
    players = dataclasses.replace(players, name="players")
    looped = feedback(players)
    # make_game already checked that the core's inputs are these profiles
    staged = cascade(looped, dataclasses.replace(game.core, inputs=looped.outputs))
    staged = map_input(lambda uc: uc[1], staged, inputs=product_space(UNIT_SPACE, staged.outputs))
    closed = feedback(staged)
    return dataclasses.replace(closed, inputs=UNIT_SPACE, name=f"{game.name or 'γ'}[σ]")


def pack_closed_state(game: Game, state, epistemic: Sequence, output, actions: Sequence):
    """Arrange ``(s, ē, c, ā)`` in the nesting used by :func:`fix_strategies`."""
    return (((_nest(tuple(epistemic)), tuple(actions)), state), output)


def unpack_closed_state(game: Game, closed_state) -> tuple:
    """Inverse of :func:`pack_closed_state`: returns ``(s, ē, c, ā)``."""
    ((e, acts), s), c = closed_state
    return s, _unnest(e, game.n_players), c, acts


def initial_closed_state(game: Game, profile: StrategyProfile):
    strategies = complete_profile(game, profile)
    return pack_closed_state(game, game.initial_state, [s.initial for s in strategies],
                             game.seed_output, game.seed_actions)


def close(game: Game, profile: StrategyProfile) -> tuple[Process, object]:
    """Closed process and its initial state."""
    return fix_strategies(game, profile), initial_closed_state(game, profile)


@dataclasses.dataclass(frozen=True)
class TurnRecord:
    turn: int
    state: object = None
    output: object = None
    result: object = None

    @property
    def finished(self) -> bool:
        return self.state is None


def _sample(c: Choice, rng: random.Random, policy: str):
    if c.kind is Kind.DET:
        return c.value
    if c.kind is Kind.NDET:
        options = c.support()
        if len(options) == 1:
            return options[0]
        if policy == "first":
            return options[0]
        if policy == "random":
            return rng.choice(options)
        raise NDetUnresolvedError(
            f"non-deterministic step with {len(options)} options under policy 'error'")
    u = rng.random()
    acc = 0.0
    items = c.items()
    for v, p in items:
        acc += p
        if u < acc:
            return v
    return items[-1][0]


def rollout(closed: Process, initial, turns: int, seed: int | None = 0,
            ndet_policy: str = "error") -> list[TurnRecord]:
    """Simulate a closed process for up to ``turns`` turns."""
    if ndet_policy not in ("first", "random", "error"):
        raise ValueError(f"unknown non-determinism policy {ndet_policy!r}")
    if UNIT not in closed.inputs:
        raise ShapeError("rollout needs a closed process (unit input)")
    rng = random.Random(seed)
    trace = []
    state = initial
    for turn in range(1, turns + 1):
        x = _sample(probe(closed, state, UNIT), rng, ndet_policy)
        if isinstance(x, Result):
            trace.append(TurnRecord(turn, result=x.value))
            break
        state = x.state
        trace.append(TurnRecord(turn, state=x.state, output=x.output))
    return trace


def strip_result(r):
    """Results of a closed game arrive tagged by the cascade; drop the tag."""
    tag = getattr(r, "tag", None)
    if tag in ("L", "R"):
        return r.value
    return r
