"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS`` or ``criterion N: FAIL``
line (shown even when pytest captures output) before asserting.
"""

import itertools
import math
import os
import random
import subprocess
import sys
import time

import pytest

from conftest import random_process
from koalg.catalog import (
    BAYESIAN_TABLES,
    GAMES,
    INFORMATION_PARTITION,
    PD_TABLE,
    TYPE_PRIOR,
    MonitoringParams,
    build_bayesian,
    build_game,
    build_pd,
    build_pd_repeated,
    check_expectation_identity,
    default_candidates,
)
from koalg.choice import Choice, Kind, distribute, flatten, map_choice, pair
from koalg.equilibrium import NModification, enumerate_nmods, nash_check, subgame_perfect_check
from koalg.game import close, rollout
from koalg.outcome import discounted, evaluate, evaluate_to_tolerance, game_outcome_spec
from koalg.process import Continue, Result, finite_space, make_process, probe
from koalg.strategies import builtin_strategy
from koalg.tree import check_commutes, unfold, validate_tree
from koalg.values import STAR, UNIT, Tagged

PD_CANDIDATES = ["always-deny", "always-confess", "tit-for-tat"]


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail=""):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}"
        with capsys.disabled():
            print(f"\n{line}" + (f" ({detail})" if detail else ""))
        assert ok, detail
    return emit


def profile(game, *names):
    return {p: builtin_strategy(n, game, p) for p, n in zip(game.players, names)}


def test_criterion_1_one_shot_table(report):
    g = build_pd()
    expected = {("c", "c"): (1, 1), ("c", "d"): (-1, 2), ("d", "c"): (2, -1), ("d", "d"): (0, 0)}
    got = {acts: probe(g.core, STAR, acts) for acts in expected}
    ok = all(got[a] == Choice.det(Result(tuple(float(x) for x in v))) for a, v in expected.items())
    report(1, ok, ", ".join(f"{a}->{got[a].value.value}" for a in expected))


def test_criterion_2_always_deny_nash(report):
    g = build_pd_repeated(0.9)
    start = time.perf_counter()
    v = nash_check(g, profile(g, "always-deny", "always-deny"),
                   default_candidates(g, PD_CANDIDATES), 1e-6)
    elapsed = time.perf_counter() - start
    ok = v.holds is True and all(abs(x) <= 1e-6 for x in v.outcome) and elapsed < 5.0
    report(2, ok, f"holds={v.holds}, outcome={v.outcome}, {elapsed:.2f}s")


def stream_value(game, prof, lam, turns=400):
    """Discounted payoff of player streams read off a long deterministic rollout."""
    closed, s0 = close(game, prof)
    total = [0.0] * game.n_players
    for n, r in enumerate(rollout(closed, s0, turns)):
        pay = game.stage_payoff(r.output)
        total = [t + lam ** n * x for t, x in zip(total, pay)]
    return total


def witness_oracle(game, prof_names, witness, lam):
    """Recompute a subgame-perfection witness from geometric sums over a rollout."""
    n = witness["n"]
    base = [builtin_strategy(name, game, p) for p, name in zip(game.players, prof_names)]
    mods = [enumerate_nmods(s, n, game, p) for s, p in zip(base, game.players)]
    joint = [next(m for m in ms if m.describe() == d) for ms, d in zip(mods, witness["profile"])]
    q = game.index(witness["player"])
    baseline = stream_value(game, {p: m.strategy() for p, m in zip(game.players, joint)}, lam)
    for name in PD_CANDIDATES:
        alt = NModification(builtin_strategy(name, game, game.players[q]), n, joint[q].prefix)
        if alt.describe() == witness["strategy"]:
            trial = {p: m.strategy() for p, m in zip(game.players, joint)}
            trial[game.players[q]] = alt.strategy()
            return baseline[q], stream_value(game, trial, lam)[q]
    raise AssertionError(f"witness strategy {witness['strategy']} not among the candidates")


def test_criterion_3_subgame_perfection(report):
    lam = 0.5
    g = build_pd_repeated(lam)
    cands = default_candidates(g, PD_CANDIDATES)
    deny = subgame_perfect_check(g, profile(g, "always-deny", "always-deny"), cands, 1, 1e-9)
    tft = subgame_perfect_check(g, profile(g, "tit-for-tat", "tit-for-tat"), cands, 1, 1e-9)
    ok = deny.holds is True and tft.holds is False
    detail = f"always-deny holds={deny.holds}, tit-for-tat holds={tft.holds}"
    if tft.holds is False:
        baseline, deviation = witness_oracle(g, ["tit-for-tat"] * 2, tft.witness, lam)
        ok = ok and abs(tft.witness["baseline_value"] - baseline) <= 1e-9
        ok = ok and abs(tft.witness["deviation_value"] - deviation) <= 1e-9
        detail += f", witness {tft.witness['strategy']} {deviation} vs {baseline}"
    report(3, ok, detail)


def test_criterion_4_monitoring_expectation(report):
    rng = random.Random(4)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        while True:
            k, m, n = sorted((rng.random() for _ in range(3)), reverse=True)
            if k > m > n:
                break
        worst = max(worst, check_expectation_identity(MonitoringParams(k, m, n)))
    elapsed = time.perf_counter() - start
    report(4, worst <= 1e-12 and elapsed < 1.0, f"max deviation {worst:.3g}, {elapsed:.3f}s")


def contingent(player, name, t):
    first, second = name.split(":")[1].split(",")
    return first if t in INFORMATION_PARTITION[player][0] else second


def test_criterion_5_bayesian_oracle(report):
    lam = 0.9
    g = build_bayesian(discount=lam)
    names1 = [f"type-contingent:{x},{y}" for x, y in itertools.product("UD", repeat=2)]
    names2 = [f"type-contingent:{x},{y}" for x, y in itertools.product("LR", repeat=2)]
    worst, rounds_ok = 0.0, True
    for a, b in itertools.product(names1, names2):
        closed, s0 = close(g, profile(g, a, b))
        t = unfold(closed, s0, 3)
        value = evaluate(t, game_outcome_spec(g)).value
        oracle = [0.0, 0.0]
        for typ, w in TYPE_PRIOR.items():
            pay = BAYESIAN_TABLES[typ][(contingent(0, a, typ), contingent(1, b, typ))]
            oracle = [o + w * lam * x for o, x in zip(oracle, pay)]
        worst = max(worst, max(abs(x - y) for x, y in zip(value, oracle)))
        first = {e.target.label: e.probability for e in t.root.edges}
        rounds_ok = rounds_ok and first == {"MP": 0.3, "PD": 0.1, "CG": 0.2, "BS": 0.4}
    report(5, worst <= 1e-12 and rounds_ok,
           f"16 profiles, max gap {worst:.3g}, round-1 probabilities exact={rounds_ok}")


def test_criterion_6_commuting_square(report):
    rng = random.Random(6)
    failures = []
    for name in GAMES:
        g = build_game(name)
        for depth in range(1, 5):
            if not check_commutes(g.core, g.initial_state, depth):
                failures.append(f"{name}@{depth}")
    for kind in Kind:
        for i in range(50):
            p = random_process(rng, kind)
            for depth in range(1, 5):
                if not check_commutes(p, 0, depth):
                    failures.append(f"{kind.value}#{i}@{depth}")
    report(6, not failures, "all commute" if not failures else ", ".join(failures[:5]))


def test_criterion_7_tree_structure(report):
    problems = []
    trees = [(name, unfold(build_game(name).core, build_game(name).initial_state, 4))
             for name in GAMES]
    for name in ("pd", "pd-repeated"):
        g = build_game(name)
        closed, s0 = close(g, {})
        trees.append((f"{name} (dummies)", unfold(closed, s0, 4)))
    for name, t in trees:
        problems += [f"{name}: {p}" for p in validate_tree(t)]
    kinds = sorted({t.kind.value for _, t in trees})
    report(7, not problems, f"{len(trees)} trees of kinds {kinds}" if not problems else problems[0])


ATOMS = list(range(-3, 4)) + list("abcde")
FUNCS = [lambda x: x, lambda x: str(x)[:1], lambda x: 0, lambda x: (x, x)]


def random_choice(rng, kind, values=None):
    draw = (lambda: rng.choice(ATOMS)) if values is None else values
    if kind is Kind.DET:
        return Choice.det(draw())
    support = [draw() for _ in range(rng.randint(1, 4))]
    if kind is Kind.NDET:
        return Choice.ndet(support)
    weights = [rng.randint(1, 9) for _ in support]
    total = sum(weights)
    return Choice.prob([(v, w / total) for v, w in zip(support, weights)])


def close_to(a, b, tol=1e-12):
    if a.kind is not b.kind:
        return False
    if a.kind is not Kind.PROB:
        return a == b
    keys = set(a.support()) | set(b.support())
    return all(abs(a.probability(v) - b.probability(v)) <= tol for v in keys)


def test_criterion_8_functor_laws(report):
    rng = random.Random(8)
    checked, failures = 0, []
    for i in range(1200):
        kind = rng.choice(list(Kind))
        f, g = rng.choice(FUNCS), rng.choice(FUNCS)
        c = random_choice(rng, kind)
        laws = {
            "identity": close_to(map_choice(c, lambda x: x), c),
            "composition": close_to(map_choice(c, lambda x: f(g(x))),
                                    map_choice(map_choice(c, g), f)),
        }
        cc = random_choice(rng, kind, values=lambda: random_choice(rng, kind))
        laws["flatten"] = close_to(map_choice(flatten(cc), f),
                                   flatten(map_choice(cc, lambda inner: map_choice(inner, f))))
        x = Tagged("L", rng.choice(ATOMS)) if rng.random() < 0.3 else Tagged(
            "R", (rng.choice(ATOMS), c))
        on_sum = (lambda v: Tagged("L", f(v.value)) if v.tag == "L"
                  else Tagged("R", (v.value[0], map_choice(v.value[1], g))))
        after = (lambda v: Tagged("L", f(v.value)) if v.tag == "L"
                 else Tagged("R", (v.value[0], g(v.value[1]))))
        laws["distribute"] = close_to(distribute(on_sum(x), kind),
                                      map_choice(distribute(x, kind), after))
        other_kind = Kind.DET if rng.random() < 0.5 else kind
        d = random_choice(rng, other_kind)
        laws["pair"] = close_to(pair(map_choice(c, f), map_choice(d, g)),
                                map_choice(pair(c, d), lambda xy: (f(xy[0]), g(xy[1]))))
        checked += 1
        failures += [f"{law}#{i}" for law, ok in laws.items() if not ok]
    report(8, not failures and checked >= 1000,
           f"{checked} random choices" if not failures else ", ".join(failures[:5]))


def test_criterion_9_truncation_certificate(report):
    lam = 0.5
    stream = make_process(finite_space("S", (STAR,)), finite_space("1", (UNIT,)),
                          finite_space("O", ((1.0, 1.0),)), finite_space("R", ()), Kind.DET,
                          lambda s, c: Choice.det(Continue(STAR, (1.0, 1.0))))
    spec = discounted(2, lam, lambda o: o, lambda r: r, 1.0)
    r = evaluate_to_tolerance(stream, STAR, spec, 1e-6)
    depth = math.ceil(math.log(1e-6 * (1 - lam) / 1.0) / math.log(lam))
    doubled = evaluate(unfold(stream, STAR, 2 * depth), spec)
    change = max(abs(a - b) for a, b in zip(r.value, doubled.value))
    ok = all(abs(v - 2.0) <= 1e-6 for v in r.value) and change < r.error_bound
    report(9, ok, f"value {r.value[0]!r} +/- {r.error_bound:.3g}, doubling moves {change:.3g}")


GOLDEN = [
    ["tree", "pd", "--depth", "1", "--format", "json"],
    ["nash", "pd-repeated", "--strategy", "1=always-deny", "--strategy", "2=always-deny",
     "--lambda", "0.9", "--eps", "1e-6", "--candidates", ",".join(PD_CANDIDATES)],
    ["spc", "pd-repeated", "--strategy", "1=tit-for-tat", "--strategy", "2=tit-for-tat",
     "--lambda", "0.5", "--nmax", "1", "--candidates", ",".join(PD_CANDIDATES)],
]


def test_criterion_10_cli_determinism(report):
    outputs = []
    for run in range(2):
        env = dict(os.environ, PYTHONHASHSEED=str(run + 1))
        outputs.append([subprocess.run([sys.executable, "-m", "koalg", *argv, "--seed", "7"],
                                       capture_output=True, env=env) for argv in GOLDEN])
    ok = all(a.returncode == 0 and a.stdout == b.stdout and a.stdout
             for a, b in zip(*outputs))
    report(10, ok, f"{len(GOLDEN)} invocations, byte-identical={ok}")
