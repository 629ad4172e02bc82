"""Built-in games, addressed by stable names.

=================  ==========================================================
``pd``             one-shot prisoner's dilemma
``pd-repeated``    infinitely repeated prisoner's dilemma
``monitoring``     repeated dilemma with imperfect public monitoring
``bayesian``       two-round game of incomplete information over four tables
``network``        friendship network formation on 2 to 6 nodes
=================  ==========================================================
"""

from __future__ import annotations

import dataclasses
import itertools

from .choice import Choice, Kind
from .errors import ParamError, SizeError, ValidationError
from .game import Game, Strategy, make_game
from .matrix import MatrixGameSpec, build_matrix_game
from .process import (
    EMPTY,
    Continue,
    Result,
    finite_space,
    make_process,
    predicate_space,
    product_space,
    reals,
)
from .strategies import builtin_strategy
from .values import STAR

PD_TABLE = {
    ("c", "c"): (1.0, 1.0),
    ("c", "d"): (-1.0, 2.0),
    ("d", "c"): (2.0, -1.0),
    ("d", "d"): (0.0, 0.0),
}

PD_STRATEGIES = ("always-deny", "always-confess", "tit-for-tat", "grim-trigger", "copy-2/3")


def pd_spec(repeated: bool = False, discount: float = 0.9) -> MatrixGameSpec:
    return MatrixGameSpec(
        players=("1", "2"),
        actions=(("c", "d"), ("c", "d")),
        payoffs=tuple(PD_TABLE.items()),
        mode="repeated" if repeated else "one-shot",
        discount=discount,
        seed_actions=("c", "c"),
        seed_output=(0.0, 0.0) if repeated else None,
        visibility="opponent-action",
        name="pd-repeated" if repeated else "pd",
        strategies=PD_STRATEGIES,
    )


def build_pd(discount: float = 0.9) -> Game:
    return build_matrix_game(pd_spec(False, discount))


def build_pd_repeated(discount: float = 0.9) -> Game:
    return build_matrix_game(pd_spec(True, discount))


@dataclasses.dataclass(frozen=True)
class MonitoringParams:
    k: float = 0.9
    m: float = 0.5
    n: float = 0.1

    def __post_init__(self):
        if not (1.0 >= self.k > self.m > self.n >= 0.0):
            raise ParamError(f"need 1 ≥ k > m > n ≥ 0, got k={self.k}, m={self.m}, n={self.n}")

    def reward(self, a: str, y: str) -> float:
        k, m, n = self.k, self.m, self.n
        match a, y:
            case "c", "G":
                return float(1 + (2 - 2 * k) / (k - m))
            case "c", "B":
                return float(1 - 2 * k / (k - m))
            case "d", "G":
                return float((2 - 2 * n) / (m - n))
            case "d", "B":
                return float(-2 * n / (m - n))
        raise ValidationError(f"no reward for action {a!r} and signal {y!r}")

    def good_signal(self, acts: tuple) -> float:
        cooperators = acts.count("c")
        return {2: self.k, 1: self.m, 0: self.n}[cooperators]


def build_monitoring(params: MonitoringParams | None = None, discount: float = 0.9) -> Game:
    params = params or MonitoringParams()
    actions = finite_space("A", ("c", "d"))
    profiles = product_space(actions, actions)
    signals = ("G", "B")

    def outcome(acts, y):
        return (params.reward(acts[0], y), params.reward(acts[1], y), y)

    def step(s, acts):
        g = params.good_signal(acts)
        dist = {Continue(STAR, outcome(acts, "G")): g, Continue(STAR, outcome(acts, "B")): 1 - g}
        return Choice.prob(dist)

    def is_output(o):
        return (isinstance(o, tuple) and len(o) == 3 and o[2] in signals
                and all(isinstance(x, float) for x in o[:2]))

    core = make_process(finite_space("S", (STAR,)), profiles, predicate_space("R²×Y", is_output),
                        EMPTY, Kind.PROB, step, "monitoring")

    def observer(p):
        def beta(o, acts):
            return (o[p], o[2], acts[p])
        return beta

    obs = finite_space("B", [(params.reward(a, y), y, a) for a in ("c", "d") for y in signals])
    bound = max(abs(params.reward(a, y)) for a in ("c", "d") for y in signals)
    seed = params.reward("c", "G")
    return make_game(
        ("1", "2"), (actions, actions), (obs, obs), core, (observer(0), observer(1)), STAR,
        (seed, seed, "G"), ("c", "c"), lambda o: (o[0], o[1]), lambda r: (0.0, 0.0), bound,
        discount=discount, name="monitoring", visibility="public-signal",
        strategies=("always-d-with-history", "always-deny", "always-confess", "grim-trigger"))


def expected_stage_payoff(game: Game, acts, state=None) -> tuple:
    """Expected stage payoff of one step from ``state`` under the action profile."""
    c = game.core.step(game.initial_state if state is None else state, tuple(acts))
    acc = [0.0] * game.n_players
    for x, w in c.items():
        w = 1.0 if w is None else w
        pay = game.stage_payoff(x.output) if isinstance(x, Continue) else game.result_payoff(x.value)
        for i, v in enumerate(pay):
            acc[i] += w * v
    return tuple(acc)


TYPE_PRIOR = {"MP": 0.3, "PD": 0.1, "CG": 0.2, "BS": 0.4}

BAYESIAN_TABLES = {
    "MP": {("U", "L"): (2.0, 0.0), ("U", "R"): (0.0, 2.0),
           ("D", "L"): (0.0, 2.0), ("D", "R"): (2.0, 0.0)},
    "PD": {("U", "L"): (2.0, 2.0), ("U", "R"): (0.0, 3.0),
           ("D", "L"): (3.0, 0.0), ("D", "R"): (1.0, 1.0)},
    "CG": {("U", "L"): (2.0, 0.0), ("U", "R"): (0.0, 0.0),
           ("D", "L"): (0.0, 0.0), ("D", "R"): (1.0, 1.0)},
    "BS": {("U", "L"): (2.0, 1.0), ("U", "R"): (0.0, 0.0),
           ("D", "L"): (0.0, 0.0), ("D", "R"): (1.0, 2.0)},
}

INFORMATION_PARTITION = (
    (frozenset({"MP", "PD"}), frozenset({"CG", "BS"})),
    (frozenset({"MP", "CG"}), frozenset({"PD", "BS"})),
)


def build_bayesian(prior=None, tables=None, discount: float = 0.9) -> Game:
    prior = dict(TYPE_PRIOR if prior is None else prior)
    tables = BAYESIAN_TABLES if tables is None else tables
    states = finite_space("S", (STAR, *prior))
    a1, a2 = finite_space("A_1", ("U", "D")), finite_space("A_2", ("L", "R"))

    def step(s, acts):
        if s == STAR:
            return Choice.prob({Continue(t, t): w for t, w in prior.items()})
        return Choice.prob({Result(tables[s][acts]): 1.0})

    core = make_process(states, product_space(a1, a2), states, reals(2), Kind.PROB, step,
                        "bayesian")

    def observer(p):
        def beta(o, acts):
            if o == STAR:
                return STAR
            return next(cell for cell in INFORMATION_PARTITION[p] if o in cell)
        return beta

    obs = [finite_space(f"B_{p + 1}", (STAR, *INFORMATION_PARTITION[p])) for p in range(2)]
    bound = max(abs(x) for t in tables.values() for v in t.values() for x in v)
    names = tuple(f"type-contingent:{x},{y}" for acts in ("UD", "LR")
                  for x, y in itertools.product(acts, repeat=2))
    return make_game(("1", "2"), (a1, a2), obs, core, (observer(0), observer(1)), STAR, STAR,
                     ("U", "L"), lambda o: (0.0, 0.0), lambda r: r, bound, discount=discount,
                     name="bayesian", visibility="type-partition", strategies=names)


def _edge(p, q):
    return (p, q) if p < q else (q, p)


def build_network(nodes: int = 3, discount: float = 0.9) -> Game:
    """Players befriend or unfriend each other; the state is the friendship graph.

    All toggles of a turn apply at once; when one player befriends and the
    other unfriends the same pair, the friendship ends. Each player's stage
    payoff is the number of friends it has after the turn.
    """
    if not 2 <= nodes <= 6:
        raise SizeError(f"network game supports 2 to 6 nodes, got {nodes}")
    players = tuple(range(1, nodes + 1))
    pairs = [_edge(p, q) for p, q in itertools.combinations(players, 2)]
    graphs = [frozenset(c) for r in range(len(pairs) + 1) for c in itertools.combinations(pairs, r)]
    states = finite_space("graphs", graphs)
    actions = [finite_space(f"A_{p}", ["pass"] + [(verb, q) for verb in ("befriend", "unfriend")
                                                  for q in players if q != p])
               for p in players]

    def apply(graph, acts):
        add, remove = set(), set()
        for p, a in zip(players, acts):
            if a == "pass":
                continue
            verb, q = a
            (add if verb == "befriend" else remove).add(_edge(p, q))
        return frozenset((graph | add) - remove)

    def step(graph, acts):
        new = apply(graph, acts)
        return Choice.det(Continue(new, new))

    profiles = product_space(*actions)
    core = make_process(states, profiles, states, EMPTY, Kind.DET, step, f"network-{nodes}")

    def degree(graph):
        return tuple(float(sum(p in e for e in graph)) for p in players)

    observe = [lambda o, acts: o for _ in players]
    seed = tuple("pass" for _ in players)
    return make_game(players, actions, [states] * nodes, core, observe, frozenset(), frozenset(),
                     seed, degree, lambda r: (0.0,) * nodes, float(nodes - 1),
                     discount=discount, name="network", visibility="full-state",
                     strategies=("play:pass",))


GAMES = ("pd", "pd-repeated", "monitoring", "bayesian", "network")


def build_game(name: str, discount: float | None = None, k: float | None = None,
               m: float | None = None, n: float | None = None, nodes: int | None = None) -> Game:
    """Catalog game by name; parameters that do not apply are ignored."""
    lam = 0.9 if discount is None else discount
    match name:
        case "pd":
            return build_pd(lam)
        case "pd-repeated":
            return build_pd_repeated(lam)
        case "monitoring":
            defaults = MonitoringParams()
            params = MonitoringParams(defaults.k if k is None else k, defaults.m if m is None else m,
                                      defaults.n if n is None else n)
            return build_monitoring(params, lam)
        case "bayesian":
            return build_bayesian(discount=lam)
        case "network":
            return build_network(3 if nodes is None else nodes, lam)
    raise ValidationError(f"unknown game {name!r}; catalog games are {', '.join(GAMES)}")


def default_candidates(game: Game, names=None) -> dict:
    """Candidate strategies per player: every listed name that applies to that player."""
    names = game.strategies if names is None else names
    out = {}
    for p in game.players:
        cands: list[Strategy] = []
        for name in names:
            try:
                cands.append(builtin_strategy(name, game, p))
            except ValidationError:
                continue
        if not cands:
            raise ValidationError(f"no candidate strategy applies to player {p}")
        out[p] = cands
    return out


def check_expectation_identity(params: MonitoringParams) -> float:
    """Largest deviation of the expected monitoring payoffs from the dilemma table."""
    game = build_monitoring(params)
    return max(abs(x - y) for acts, pay in PD_TABLE.items()
               for x, y in zip(expected_stage_payoff(game, acts), pay))

