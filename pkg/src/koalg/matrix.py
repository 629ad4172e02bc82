"""Matrix games described in JSON (format ``koalg-matrix/1``).

A description lists the players, each player's action names and one payoff
vector per action profile. ``mode`` selects a one-shot game, which ends
with the payoff as its result, or a repeated game, which outputs the payoff
every turn and never ends.

``visibility`` decides what a player observes after a turn:

* ``full-profile``: the previous action profile (and, when repeated, the
  player's own payoff),
* ``own-payoff-and-signal``: the player's own previous action (and, when
  repeated, own payoff),
* ``opponent-action``: only the other player's previous action (two players
  only).
"""

from __future__ import annotations

import dataclasses
import itertools
import json

import jsonschema

from .choice import Choice, Kind
from .errors import ParseError, ValidationError
from .game import Game, make_game
from .process import (
    EMPTY,
    UNIT_SPACE,
    Continue,
    Result,
    finite_space,
    make_process,
    product_space,
    reals,
)
from .values import STAR, UNIT

FORMAT = "koalg-matrix/1"
VISIBILITIES = ("full-profile", "own-payoff-and-signal", "opponent-action")

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["format", "players", "actions", "payoffs", "mode"],
    "properties": {
        "format": {"const": FORMAT},
        "name": {"type": "string"},
        "players": {"type": "array", "minItems": 1,
                    "items": {"type": "string", "minLength": 1}},
        "actions": {"type": "array", "minItems": 1,
                    "items": {"type": "array", "minItems": 1,
                              "items": {"type": "string", "minLength": 1}}},
        "payoffs": {"type": "array", "items": {
            "type": "object",
            "additionalProperties": False,
            "required": ["profile", "payoff"],
            "properties": {
                "profile": {"type": "array", "items": {"type": "string"}},
                "payoff": {"type": "array", "items": {"type": "number"}},
            },
        }},
        "mode": {"enum": ["one-shot", "repeated"]},
        "discount": {"type": "number"},
        "seed_actions": {"type": "array", "items": {"type": "string"}},
        "seed_output": {"type": "array", "items": {"type": "number"}},
        "visibility": {"enum": list(VISIBILITIES)},
        "strategies": {"type": "array", "items": {"type": "string"}},
    },
}


@dataclasses.dataclass(frozen=True)
class MatrixGameSpec:
    players: tuple[str, ...]
    actions: tuple[tuple[str, ...], ...]
    payoffs: tuple[tuple[tuple[str, ...], tuple[float, ...]], ...]
    mode: str = "one-shot"
    discount: float | None = None
    seed_actions: tuple[str, ...] | None = None
    seed_output: tuple[float, ...] | None = None
    visibility: str = "full-profile"
    name: str = ""
    strategies: tuple[str, ...] = ()

    def __post_init__(self):
        n = len(self.players)
        if len(set(self.players)) != n:
            raise ValidationError("/players: player ids must be distinct")
        if len(self.actions) != n:
            raise ValidationError(f"/actions: expected {n} action lists, got {len(self.actions)}")
        for i, acts in enumerate(self.actions):
            if len(set(acts)) != len(acts):
                raise ValidationError(f"/actions/{i}: duplicated action name")
        seen = {}
        for i, (profile, payoff) in enumerate(self.payoffs):
            if len(profile) != n or any(a not in acts for a, acts in zip(profile, self.actions)):
                raise ValidationError(f"/payoffs/{i}/profile: {list(profile)} is not an action profile")
            if len(payoff) != n:
                raise ValidationError(f"/payoffs/{i}/payoff: expected {n} entries")
            if profile in seen:
                raise ValidationError(f"/payoffs/{i}/profile: {list(profile)} listed twice")
            seen[profile] = payoff
        for profile in itertools.product(*self.actions):
            if profile not in seen:
                raise ValidationError(f"/payoffs: missing profile {list(profile)}")
        if self.mode not in ("one-shot", "repeated"):
            raise ValidationError(f"/mode: unknown mode {self.mode!r}")
        if self.mode == "repeated":
            if self.discount is None:
                raise ValidationError("/discount: repeated games need a discount in (0, 1)")
        if self.discount is not None and not 0.0 < self.discount < 1.0:
            raise ValidationError(f"/discount: {self.discount!r} is not in (0, 1)")
        if self.seed_actions is not None and (
                len(self.seed_actions) != n
                or any(a not in acts for a, acts in zip(self.seed_actions, self.actions))):
            raise ValidationError("/seed_actions: not an action profile")
        if self.seed_output is not None and len(self.seed_output) != n:
            raise ValidationError(f"/seed_output: expected {n} entries")
        if self.visibility not in VISIBILITIES:
            raise ValidationError(f"/visibility: unknown visibility {self.visibility!r}")
        if self.visibility == "opponent-action" and n != 2:
            raise ValidationError("/visibility: opponent-action needs exactly two players")

    def table(self) -> dict:
        return {profile: payoff for profile, payoff in self.payoffs}


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def parse_matrix_spec(text: str) -> MatrixGameSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"{_pointer(exc.absolute_path)}: {exc.message}") from exc
    opt = lambda key: tuple(data[key]) if key in data else None  # noqa: E731
    return MatrixGameSpec(
        players=tuple(data["players"]),
        actions=tuple(tuple(a) for a in data["actions"]),
        payoffs=tuple((tuple(e["profile"]), tuple(float(x) for x in e["payoff"]))
                      for e in data["payoffs"]),
        mode=data["mode"],
        discount=None if "discount" not in data else float(data["discount"]),
        seed_actions=opt("seed_actions"),
        seed_output=None if "seed_output" not in data else tuple(float(x) for x in data["seed_output"]),
        visibility=data.get("visibility", "full-profile"),
        name=data.get("name", ""),
        strategies=tuple(data.get("strategies", ())),
    )


def serialize_matrix_spec(spec: MatrixGameSpec) -> str:
    data = {
        "format": FORMAT,
        "players": list(spec.players),
        "actions": [list(a) for a in spec.actions],
        "payoffs": [{"profile": list(p), "payoff": list(v)} for p, v in spec.payoffs],
        "mode": spec.mode,
        "visibility": spec.visibility,
    }
    if spec.name:
        data["name"] = spec.name
    if spec.strategies:
        data["strategies"] = list(spec.strategies)
    if spec.discount is not None:
        data["discount"] = spec.discount
    if spec.seed_actions is not None:
        data["seed_actions"] = list(spec.seed_actions)
    if spec.seed_output is not None:
        data["seed_output"] = list(spec.seed_output)
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _observers(spec: MatrixGameSpec, table: dict):
    """Observation functions and their (finite) observation spaces."""
    n = len(spec.players)
    repeated = spec.mode == "repeated"
    profiles = list(table)
    seed_out = spec.seed_output or (0.0,) * n
    observers, spaces = [], []
    for p in range(n):
        match spec.visibility:
            case "full-profile":
                signal = lambda acts, p=p: acts  # noqa: E731
            case "own-payoff-and-signal":
                signal = lambda acts, p=p: acts[p]  # noqa: E731
            case "opponent-action":
                signal = lambda acts, p=p: acts[1 - p]  # noqa: E731
        if repeated and spec.visibility != "opponent-action":
            def beta(o, acts, signal=signal, p=p):
                return (signal(acts), o[p])
            seeds = {(signal(a), seed_out[p]) for a in profiles}
            elements = seeds | {(signal(a), table[a][p]) for a in profiles}
        else:
            def beta(o, acts, signal=signal):
                return signal(acts)
            elements = {signal(a) for a in profiles}
        observers.append(beta)
        spaces.append(finite_space(f"B_{spec.players[p]}", elements))
    return observers, spaces


def build_matrix_game(spec: MatrixGameSpec) -> Game:
    n = len(spec.players)
    table = {k: tuple(float(x) for x in v) for k, v in spec.table().items()}
    action_spaces = [finite_space(f"A_{p}", acts) for p, acts in zip(spec.players, spec.actions)]
    profiles = product_space(*action_spaces)
    states = finite_space("S", (STAR,))
    bound = max(abs(x) for v in table.values() for x in v)
    zero = (0.0,) * n

    if spec.mode == "one-shot":
        def step(s, acts):
            return Choice.det(Result(table[acts]))
        outputs, results, seed_output = UNIT_SPACE, reals(n), UNIT
        stage = lambda o: zero  # noqa: E731
        result_payoff = lambda r: r  # noqa: E731
    else:
        def step(s, acts):
            return Choice.det(Continue(STAR, table[acts]))
        outputs, results = reals(n), EMPTY
        seed_output = spec.seed_output or zero
        bound = max(bound, max(abs(x) for x in seed_output))
        stage = lambda o: o  # noqa: E731
        result_payoff = lambda r: zero  # noqa: E731

    core = make_process(states, profiles, outputs, results, Kind.DET, step, spec.name or "matrix")
    observers, spaces = _observers(spec, table)
    seed_actions = spec.seed_actions or tuple(acts[0] for acts in spec.actions)
    return make_game(spec.players, action_spaces, spaces, core, observers, STAR, seed_output,
                     seed_actions, stage, result_payoff, bound,
                     discount=spec.discount if spec.discount is not None else 0.9,
                     name=spec.name, visibility=spec.visibility, strategies=spec.strategies)
