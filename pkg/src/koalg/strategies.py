"""Named strategies usable with the catalog games.

Strategies are looked up by name for a given game and player:

* ``always-deny`` / ``always-confess``: play ``d`` / ``c`` whatever happens,
* ``tit-for-tat``: repeat the opponent's last action,
* ``copy-2/3``: copy the opponent's last action with probability 2/3,
  play the other action otherwise,
* ``grim-trigger``: play ``c`` until the opponent has played ``d`` once (or,
  when actions are hidden, until the public signal was ``B`` once), then ``d``,
* ``type-contingent:X,Y``: in the Bayesian game, play ``X`` in the first cell
  of the information partition and ``Y`` in the second,
* ``always-d-with-history``: play ``d`` and record the own action and the
  public signal in a bounded history,
* ``play:A``: always play action ``A``.
"""

from __future__ import annotations

from typing import Callable

from .choice import Choice, Kind
from .errors import UnknownStrategy, ValidationError
from .game import Game, Strategy
from .process import UNIT_SPACE, finite_space, predicate_space
from .values import STAR

HISTORY_WINDOW = 16

NAMES = ("always-deny", "always-confess", "tit-for-tat", "copy-2/3", "grim-trigger",
         "type-contingent:X,Y", "always-d-with-history", "play:A")

_ONE = finite_space("1", (STAR,))


def _constant(game: Game, player, action, name: str) -> Strategy:
    acts = game.actions[game.index(player)]
    if action not in acts:
        raise ValidationError(f"{name}: action {action!r} is not available to player {player}")
    choice = Choice.det((STAR, action))
    return Strategy(_ONE, Kind.DET, lambda e, b: choice, STAR, name)


def opponent_action(game: Game, player) -> Callable | None:
    """How to read the opponent's last action off an observation, if visible."""
    if game.n_players != 2:
        return None
    q = 1 - game.index(player)
    repeated = game.core.outputs != UNIT_SPACE
    match game.visibility:
        case "opponent-action":
            return lambda b: b
        case "full-profile":
            return (lambda b: b[0][q]) if repeated else (lambda b: b[q])
    return None


def _need_cd(game: Game, player, name: str):
    acts = set(game.actions[game.index(player)])
    if acts != {"c", "d"}:
        raise ValidationError(f"{name} needs the actions c and d")


def _reader(game: Game, player, name: str) -> Callable:
    read = opponent_action(game, player)
    if read is None:
        raise ValidationError(f"{name} needs the opponent's actions to be observable")
    return read


def tit_for_tat(game: Game, player) -> Strategy:
    _need_cd(game, player, "tit-for-tat")
    read = _reader(game, player, "tit-for-tat")
    return Strategy(_ONE, Kind.DET, lambda e, b: Choice.det((STAR, read(b))), STAR, "tit-for-tat")


def copy_two_thirds(game: Game, player) -> Strategy:
    _need_cd(game, player, "copy-2/3")
    read = _reader(game, player, "copy-2/3")
    flip = {"c": "d", "d": "c"}

    def step(e, b):
        x = read(b)
        return Choice.prob({(STAR, x): 2 / 3, (STAR, flip[x]): 1 / 3})

    return Strategy(_ONE, Kind.PROB, step, STAR, "copy-2/3")


def grim_trigger(game: Game, player) -> Strategy:
    _need_cd(game, player, "grim-trigger")
    read = opponent_action(game, player)
    if read is None:
        if game.visibility != "public-signal":
            raise ValidationError("grim-trigger needs observable actions or a public signal")
        triggered_by = lambda b: b[1] == "B"  # noqa: E731
    else:
        triggered_by = lambda b: read(b) == "d"  # noqa: E731

    def step(e, b):
        if e == "triggered" or triggered_by(b):
            return Choice.det(("triggered", "d"))
        return Choice.det(("calm", "c"))

    return Strategy(finite_space("E", ("calm", "triggered")), Kind.DET, step, "calm",
                    "grim-trigger")


def type_contingent(game: Game, player, first, second) -> Strategy:
    if game.visibility != "type-partition":
        raise ValidationError("type-contingent strategies need the Bayesian game")
    p = game.index(player)
    acts = game.actions[p]
    for a in (first, second):
        if a not in acts:
            raise ValidationError(f"type-contingent: {a!r} is not an action of player {player}")
    cells = [b for b in game.observations[p] if b != STAR]
    cells.sort(key=lambda cell: sorted(cell))
    # the cell holding MP comes first for both players
    cells.sort(key=lambda cell: "MP" not in cell)
    table = {STAR: first, cells[0]: first, cells[1]: second}

    def step(e, b):
        return Choice.det((STAR, table[b]))

    return Strategy(_ONE, Kind.DET, step, STAR, f"type-contingent:{first},{second}")


def _is_history(h) -> bool:
    return (isinstance(h, tuple) and len(h) <= HISTORY_WINDOW
            and all(isinstance(x, tuple) and len(x) == 2 for x in h))


def always_d_with_history(game: Game, player, window: int = HISTORY_WINDOW) -> Strategy:
    """Play ``d`` and extend the history by the own action and the signal."""
    if game.visibility != "public-signal":
        raise ValidationError("always-d-with-history needs the public-monitoring game")
    if "d" not in game.actions[game.index(player)]:
        raise ValidationError("always-d-with-history needs the action d")

    def step(h, b):
        _, y, a = b
        return Choice.det(((h + ((a, y),))[-window:], "d"))

    return Strategy(predicate_space("(A×Y)*", _is_history), Kind.DET, step, (),
                    "always-d-with-history")


def builtin_strategy(name: str, game: Game, player) -> Strategy:
    """The strategy called ``name`` for ``player`` in ``game``."""
    match name.split(":", 1):
        case ["always-deny"]:
            return _constant(game, player, "d", name)
        case ["always-confess"]:
            return _constant(game, player, "c", name)
        case ["tit-for-tat"]:
            return tit_for_tat(game, player)
        case ["copy-2/3"]:
            return copy_two_thirds(game, player)
        case ["grim-trigger"]:
            return grim_trigger(game, player)
        case ["always-d-with-history"]:
            return always_d_with_history(game, player)
        case ["play", action]:
            return _constant(game, player, action, name)
        case ["type-contingent", table]:
            parts = table.split(",")
            if len(parts) != 2:
                raise UnknownStrategy(f"type-contingent needs two actions, got {table!r}")
            return type_contingent(game, player, *parts)
    raise UnknownStrategy(f"unknown strategy {name!r}; known: {', '.join(NAMES)}")
