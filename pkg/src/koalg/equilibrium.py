"""Best responses, Nash equilibria and subgame perfection over finite candidate sets.

Verdicts are relative to the supplied candidates and, for subgame
perfection, to the modification horizon ``n_max``. Outcomes are evaluated to
a certified precision of ``eps/4``; a comparison is decided only when the
certified interval of ``baseline − alternative`` lies entirely on one side of
``−eps``, otherwise the verdict is ``"inconclusive"``.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from typing import Mapping, Sequence

from .choice import Choice, Kind, map_choice, unit
from .errors import ExplosionError, ValidationError
from .game import Game, Strategy, StrategyProfile, close, complete_profile
from .outcome import OutcomeResult, evaluate_to_tolerance, game_outcome_spec
from .process import finite_space, sum_space
from .values import Tagged, show

MAX_MODIFICATIONS = 10_000

INCONCLUSIVE = "inconclusive"

CandidateSet = Mapping[object, Sequence[Strategy]]


@dataclasses.dataclass
class Verdict:
    kind: str
    holds: bool | str
    eps: float
    outcome: tuple | None = None
    witness: object = None
    n_max: int | None = None
    checks: int = 0

    def to_json(self) -> dict:
        out = {"kind": self.kind, "holds": self.holds, "eps": self.eps}
        if self.outcome is not None:
            out["outcome"] = list(self.outcome)
        if self.witness is not None:
            out["witness"] = self.witness
        if self.n_max is not None:
            out["n_max"] = self.n_max
        return out


def _combine_holds(flags) -> bool | str:
    flags = list(flags)
    if any(f is False for f in flags):
        return False
    if any(f == INCONCLUSIVE for f in flags):
        return INCONCLUSIVE
    return True


def profile_outcome(game: Game, profile: StrategyProfile, eps: float,
                    discount: float | None = None) -> OutcomeResult:
    closed, initial = close(game, profile)
    return evaluate_to_tolerance(closed, initial, game_outcome_spec(game, discount), eps)


def _label(s: Strategy) -> str:
    return s.name or "σ"


def best_response(game: Game, profile: StrategyProfile, deviator, candidates: Sequence[Strategy],
                  eps: float, discount: float | None = None,
                  _baseline: OutcomeResult | None = None) -> Verdict:
    """Is the deviator's strategy in ``profile`` a best response among ``candidates``?"""
    q = game.index(deviator)
    strategies = complete_profile(game, profile)
    base = _baseline or profile_outcome(game, dict(zip(game.players, strategies)), eps / 4, discount)
    worst = None
    flags = []
    for alt in candidates:
        trial = dict(zip(game.players, strategies))
        trial[game.players[q]] = alt
        res = profile_outcome(game, trial, eps / 4, discount)
        diff = base.value[q] - res.value[q]
        slack = base.error_bound + res.error_bound
        if diff - slack >= -eps:
            flag = True
        elif diff + slack < -eps:
            flag = False
        else:
            flag = INCONCLUSIVE
        flags.append(flag)
        if worst is None or res.value[q] > worst[1].value[q]:
            worst = (alt, res, flag)
    holds = _combine_holds(flags)
    witness = None
    if worst is not None and holds is not True:
        alt, res, _ = worst
        witness = {
            "player": str(game.players[q]),
            "strategy": _label(alt),
            "deviation_value": res.value[q],
            "baseline_value": base.value[q],
            "error_bound": base.error_bound + res.error_bound,
        }
    return Verdict("best_response", holds, eps, base.value, witness, checks=len(flags))


def nash_check(game: Game, profile: StrategyProfile, candidates: CandidateSet, eps: float,
               discount: float | None = None) -> Verdict:
    """Every player's strategy is a best response to the others'."""
    strategies = complete_profile(game, profile)
    full = dict(zip(game.players, strategies))
    base = profile_outcome(game, full, eps / 4, discount)
    flags, witnesses, checks = [], [], 0
    for q, player in enumerate(game.players):
        cands = _candidates_for(game, candidates, player)
        v = best_response(game, full, player, cands, eps, discount, _baseline=base)
        flags.append(v.holds)
        checks += v.checks
        if v.witness is not None:
            witnesses.append(v.witness)
    return Verdict("nash", _combine_holds(flags), eps, base.value,
                   witnesses or None, checks=checks)


def _candidates_for(game: Game, candidates: CandidateSet, player) -> list[Strategy]:
    for key, value in candidates.items():
        if game.index(key) == game.index(player):
            if not value:
                raise ValidationError(f"empty candidate set for player {player}")
            return list(value)
    raise ValidationError(f"no candidates for player {player}")


@dataclasses.dataclass(frozen=True)
class NModification:
    """``base`` with its first ``horizon`` turns replaced by a fixed prefix.

    ``prefix[k]`` maps each observation to the action played on turn ``k``.
    """

    base: Strategy
    horizon: int
    prefix: tuple = ()

    def action(self, k: int, observation):
        return dict(self.prefix[k])[observation]

    def describe(self) -> str:
        if self.horizon == 0:
            return _label(self.base)
        turns = ";".join(",".join(f"{show(b)}>{show(a)}" for b, a in row) for row in self.prefix)
        return f"{_label(self.base)}[{turns}]"

    def strategy(self) -> Strategy:
        if self.horizon == 0:
            return self.base
        base, n = self.base, self.horizon
        tables = [dict(row) for row in self.prefix]

        def wrap(c: Choice) -> Choice:
            return map_choice(c, lambda ea: (Tagged("E", ea[0]), ea[1]))

        def step(e, b):
            match e:
                case Tagged("E", inner):
                    return wrap(base.step(inner, b))
                case Tagged("k", k):
                    nxt = Tagged("k", k + 1) if k < n - 1 else Tagged("E", base.initial)
                    return unit(base.kind, (nxt, tables[k][b]))
            raise ValidationError(f"epistemic state {e!r} is not in E + [n]")

        space = sum_space({"E": base.epistemic, "k": finite_space(f"[{n}]", range(n))})
        return Strategy(space, base.kind, step, Tagged("k", 0), self.describe())


def enumerate_nmods(strategy: Strategy, n: int, game: Game, player) -> list[NModification]:
    """All deterministic ``n``-turn prefixes on top of ``strategy``."""
    if n < 0:
        raise ValueError("horizon must be non-negative")
    if n == 0:
        return [NModification(strategy, 0)]
    idx = game.index(player)
    acts, obs = game.actions[idx], game.observations[idx]
    if not obs.finite:
        raise ExplosionError(f"observations of player {player} are not enumerated")
    count = len(acts) ** (n * len(obs))
    if count > MAX_MODIFICATIONS:
        raise ExplosionError(f"{count} modifications exceed the cap of {MAX_MODIFICATIONS}")
    turn_tables = [tuple(zip(obs.elements, choice))
                   for choice in itertools.product(acts.elements, repeat=len(obs))]
    return [NModification(strategy, n, prefix)
            for prefix in itertools.product(turn_tables, repeat=n)]


def subgame_perfect_check(game: Game, profile: StrategyProfile, candidates: CandidateSet,
                          n_max: int, eps: float, discount: float | None = None) -> Verdict:
    """Best responses after every joint prefix of up to ``n_max`` turns.

    For each joint ``n``-modification of the profile and each player ``q``,
    the alternatives are ``q``'s candidates carrying the same ``n``-turn
    prefix. ``n = 0`` is the Nash condition.
    """
    if n_max < 1:
        raise ValidationError("n_max must be at least 1")
    strategies = complete_profile(game, profile)
    for s in strategies:
        if s.kind is Kind.NDET:
            raise ValidationError("subgame perfection needs deterministic or probabilistic strategies")
    per_player = [_candidates_for(game, candidates, p) for p in game.players]
    base_outcome = None
    checks = 0
    flags = []
    witness = None
    for n in range(n_max + 1):
        mods = [enumerate_nmods(s, n, game, p) for s, p in zip(strategies, game.players)]
        total = math.prod(len(m) for m in mods)
        if total > MAX_MODIFICATIONS:
            raise ExplosionError(f"{total} joint modifications exceed the cap of {MAX_MODIFICATIONS}")
        for joint in itertools.product(*mods):
            profile_n = {p: m.strategy() for p, m in zip(game.players, joint)}
            base = profile_outcome(game, profile_n, eps / 4, discount)
            if n == 0:
                base_outcome = base.value
            for q in range(game.n_players):
                alts = [NModification(c, n, joint[q].prefix).strategy() for c in per_player[q]]
                v = best_response(game, profile_n, game.players[q], alts, eps, discount, _baseline=base)
                checks += v.checks
                flags.append(v.holds)
                if v.holds is not True and (witness is None or v.holds is False
                                            and witness["holds"] != False):  # noqa: E712
                    witness = dict(v.witness, n=n, holds=v.holds,
                                   profile=[m.describe() for m in joint])
    holds = _combine_holds(flags)
    if holds is True:
        witness = None
    elif witness is not None:
        witness.pop("holds")
    return Verdict("subgame_perfect", holds, eps, base_outcome, witness, n_max, checks)
