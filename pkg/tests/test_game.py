import dataclasses

import pytest

from koalg.catalog import build_bayesian, build_monitoring, build_pd, build_pd_repeated, MonitoringParams
from koalg.choice import Choice, Kind
from koalg.errors import MixedChoiceError, NDetUnresolvedError, ShapeError, ValidationError
from koalg.game import (
    close,
    complete_profile,
    dummy_strategy,
    fix_strategies,
    initial_closed_state,
    make_game,
    pack_closed_state,
    rollout,
    strip_result,
    unpack_closed_state,
)
from koalg.process import Continue, finite_space, make_process, probe, product_space, reals
from koalg.strategies import builtin_strategy
from koalg.values import STAR, UNIT


def profile(game, *names):
    return {p: builtin_strategy(n, game, p) for p, n in zip(game.players, names)}


def outputs(trace):
    return [r.output for r in trace]


def test_always_deny_pays_zero_every_turn():
    g = build_pd_repeated(0.9)
    closed, s0 = close(g, profile(g, "always-deny", "always-deny"))
    assert outputs(rollout(closed, s0, 6)) == [(0.0, 0.0)] * 6


def test_tit_for_tat_pair_cooperates():
    g = build_pd_repeated(0.5)
    closed, s0 = close(g, profile(g, "tit-for-tat", "tit-for-tat"))
    assert outputs(rollout(closed, s0, 5)) == [(1.0, 1.0)] * 5


def test_tit_for_tat_against_defector_retaliates_after_one_turn():
    g = build_pd_repeated(0.5)
    closed, s0 = close(g, profile(g, "tit-for-tat", "always-deny"))
    assert outputs(rollout(closed, s0, 4)) == [(-1.0, 2.0)] + [(0.0, 0.0)] * 3


def test_one_shot_constant_profile_ends_with_result():
    g = build_pd()
    closed, s0 = close(g, profile(g, "always-confess", "always-deny"))
    trace = rollout(closed, s0, 5)
    assert len(trace) == 1 and trace[0].finished
    assert strip_result(trace[0].result) == (-1.0, 2.0)


def test_zero_turns_gives_empty_trace():
    g = build_pd_repeated(0.5)
    closed, s0 = close(g, profile(g, "tit-for-tat", "tit-for-tat"))
    assert rollout(closed, s0, 0) == []


def test_rollout_needs_closed_process():
    with pytest.raises(ShapeError):
        rollout(build_pd().core, STAR, 1)


def test_closed_state_round_trip():
    g = build_pd_repeated(0.5)
    packed = pack_closed_state(g, STAR, ["e1", "e2"], (1.0, 1.0), ("c", "d"))
    assert unpack_closed_state(g, packed) == (STAR, ("e1", "e2"), (1.0, 1.0), ("c", "d"))
    prof = profile(g, "tit-for-tat", "grim-trigger")
    s, es, c, acts = unpack_closed_state(g, initial_closed_state(g, prof))
    assert s == g.initial_state and c == g.seed_output and acts == g.seed_actions
    assert es == tuple(st.initial for st in complete_profile(g, prof))


def test_first_observations_come_from_seed():
    # tit-for-tat copies the seed opponent action on turn one
    g = build_pd_repeated(0.5)
    seeded = dataclasses.replace(g, seed_actions=("d", "c"))
    closed, s0 = close(seeded, profile(seeded, "tit-for-tat", "tit-for-tat"))
    assert outputs(rollout(closed, s0, 3)) == [(-1.0, 2.0), (2.0, -1.0), (-1.0, 2.0)]


def test_closed_state_after_one_turn():
    g = build_pd_repeated(0.5)
    closed, s0 = close(g, profile(g, "always-confess", "always-deny"))
    x = probe(closed, s0, UNIT).value
    s, _, c, acts = unpack_closed_state(g, x.state)
    assert (s, c, acts) == (STAR, (-1.0, 2.0), ("c", "d"))
    assert x.output == (-1.0, 2.0)


def test_dummies_fill_missing_players():
    g = build_pd()
    closed, s0 = close(g, {"1": builtin_strategy("always-deny", g, "1")})
    c = probe(closed, s0, UNIT)
    assert c.kind is Kind.NDET
    results = {strip_result(x.value) for x in c.support()}
    assert results == {(2.0, -1.0), (0.0, 0.0)}
    d = dummy_strategy(g, "2")
    assert d.step(STAR, "anything") == Choice.ndet([(STAR, "c"), (STAR, "d")])


def test_ndet_policy_in_rollout():
    g = build_pd()
    closed, s0 = close(g, {})
    with pytest.raises(NDetUnresolvedError):
        rollout(closed, s0, 1)
    first = rollout(closed, s0, 1, ndet_policy="first")
    assert first == rollout(closed, s0, 1, ndet_policy="first")
    a = rollout(closed, s0, 1, seed=3, ndet_policy="random")
    assert a == rollout(closed, s0, 1, seed=3, ndet_policy="random")


def test_probabilistic_game_cannot_close_with_dummies():
    g = build_monitoring(MonitoringParams(), 0.9)
    with pytest.raises(MixedChoiceError):
        fix_strategies(g, {})


def test_monitoring_rollout_is_seed_stable():
    g = build_monitoring(MonitoringParams(), 0.9)
    closed, s0 = close(g, profile(g, "grim-trigger", "grim-trigger"))
    a = rollout(closed, s0, 8, seed=11)
    assert a == rollout(closed, s0, 8, seed=11)
    assert all(r.output[2] in ("G", "B") for r in a)


def test_bayesian_game_draws_types_then_stops():
    g = build_bayesian()
    closed, s0 = close(g, profile(g, "type-contingent:U,D", "type-contingent:L,R"))
    first = probe(closed, s0, UNIT)
    assert first.kind is Kind.PROB and len(first) == 4
    trace = rollout(closed, s0, 5, seed=2)
    assert len(trace) == 2 and trace[-1].finished


def test_make_game_rejects_inconsistent_input():
    g = build_pd_repeated(0.5)
    base = (g.players, g.actions, g.observations, g.core, g.observe, STAR, g.seed_output,
            g.seed_actions, g.stage_payoff, g.result_payoff, g.payoff_bound)

    def build(**changes):
        args = dict(zip(("players", "actions", "observations", "core", "observe",
                         "initial_state", "seed_output", "seed_actions", "stage_payoff",
                         "result_payoff", "payoff_bound"), base))
        args.update(changes)
        return make_game(**args)

    with pytest.raises(ValidationError):
        build(players=())
    with pytest.raises(ValidationError):
        build(players=("1", "1"))
    with pytest.raises(ValidationError):
        build(seed_actions=("c", "x"))
    with pytest.raises(ValidationError):
        build(seed_output="nope")
    with pytest.raises(ValidationError):
        build(initial_state="elsewhere")
    with pytest.raises(ValidationError):
        build(observe=(lambda o, a: "z", g.observe[1]))
    with pytest.raises(ValidationError):
        build(actions=(finite_space("A", ()), g.actions[1]))
    with pytest.raises(ValidationError):
        make_game(*base, discount=1.0)
    other = make_process(finite_space("S", (STAR,)), product_space(g.actions[0]), reals(2),
                         finite_space("R", ()), Kind.DET,
                         lambda s, a: Choice.det(Continue(STAR, (0.0, 0.0))))
    with pytest.raises(ValidationError):
        build(core=other)
