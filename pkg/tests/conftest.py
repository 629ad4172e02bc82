import random

import pytest
from hypothesis import strategies as st

from koalg.choice import Choice, Kind
from koalg.process import Continue, Result, finite_space, make_process

ATOMS = st.one_of(st.integers(-3, 3), st.sampled_from("abcde"))


def _normalise(weights):
    total = sum(weights)
    return [w / total for w in weights]


@st.composite
def choices(draw, kind=None, values=ATOMS):
    kind = draw(st.sampled_from(list(Kind))) if kind is None else kind
    if kind is Kind.DET:
        return Choice.det(draw(values))
    support = draw(st.lists(values, min_size=1, max_size=4, unique=True))
    if kind is Kind.NDET:
        return Choice.ndet(support)
    weights = draw(st.lists(st.integers(1, 9), min_size=len(support), max_size=len(support)))
    return Choice.prob(zip(support, _normalise(weights)))


def random_process(rng: random.Random, kind: Kind, n_states=None, n_inputs=None,
                   outputs="xyz", result_rate=0.2):
    """A small process with enumerated spaces and a random step table."""
    states = list(range(n_states or rng.randint(1, 4)))
    inputs = list(range(n_inputs or rng.randint(1, 3)))
    table = {}
    for s in states:
        for i in inputs:
            def draw():
                if rng.random() < result_rate:
                    return Result(float(rng.randint(-2, 2)))
                return Continue(rng.choice(states), rng.choice(outputs))
            if kind is Kind.DET:
                table[s, i] = Choice.det(draw())
            elif kind is Kind.NDET:
                table[s, i] = Choice.ndet(draw() for _ in range(rng.randint(1, 3)))
            else:
                xs = [draw() for _ in range(rng.randint(1, 3))]
                ws = _normalise([rng.randint(1, 5) for _ in xs])
                table[s, i] = Choice.prob(zip(xs, ws))
    results = finite_space("R", [float(r) for r in range(-2, 3)])
    return make_process(finite_space("S", states), finite_space("I", inputs),
                        finite_space("O", outputs), results, kind,
                        lambda s, i: table[s, i], "random")


@pytest.fixture
def rng():
    return random.Random(20261019)
