import itertools

import pytest
from hypothesis import given, strategies as st

from seqplan.exceptions import (
    CyclicStrategy,
    IdleHasNoFactor,
    InvalidRegime,
    LatentConditioning,
    MissingConditioningValue,
    UnknownAction,
)
from seqplan.fixtures import FIG1, FIG3, fig3_query
from seqplan.graph import CausalDiagram
from seqplan.regimes import (
    Atomic,
    Conditional,
    Idle,
    Random,
    Strategy,
    manipulated_graph,
    regime_factor,
    validate_strategy,
)


def test_fig3_strategy_validates_unchanged():
    q = fig3_query()
    nq = validate_strategy(FIG3, q.actions, q.outcome, q.strategy)
    assert nq.actions == {"X1", "X2", "X3"}
    assert nq.covariates == {"Z1", "Z2", "Z3"}
    assert nq.strategy == q.strategy


def test_idle_actions_become_covariates():
    s = Strategy({"X1": Idle(), "X2": Atomic(0)})
    nq = validate_strategy(FIG1, {"X1", "X2"}, {"Y"}, s)
    assert nq.actions == {"X2"}
    assert nq.covariates == {"X1", "Z"}
    assert "X1" not in nq.strategy


def test_mutual_conditioning_is_cyclic():
    g = CausalDiagram({"A", "B"}, edges={("A", "B")})
    s = Strategy({"A": Conditional(("B",), {(0,): 0, (1,): 1}), "B": Conditional(("A",), {(0,): 0, (1,): 1})})
    with pytest.raises(CyclicStrategy):
        validate_strategy(g, {"A", "B"}, set(), s)


def test_conditioning_on_descendant_is_cyclic():
    g = CausalDiagram({"X", "M", "Y"}, edges={("X", "M"), ("M", "Y")})
    s = Strategy({"X": Conditional(("M",), {(0,): 0, (1,): 1})})
    with pytest.raises(CyclicStrategy):
        validate_strategy(g, {"X"}, {"Y"}, s)


def test_latent_conditioning_rejected():
    s = Strategy({"X1": Conditional(("U",), {(0,): 0, (1,): 1})})
    with pytest.raises(LatentConditioning):
        validate_strategy(FIG1, {"X1"}, {"Y"}, s)


def test_unknown_conditioning_rejected():
    s = Strategy({"X1": Conditional(("Q",), {(0,): 0, (1,): 1})})
    with pytest.raises(LatentConditioning):
        validate_strategy(FIG1, {"X1"}, {"Y"}, s)


@pytest.mark.parametrize(
    "actions, outcome, regimes",
    [
        ({"X1"}, {"Y"}, {"X2": Atomic(0)}),  # regime for a non-action
        ({"X1", "X2"}, {"Y"}, {"X1": Atomic(0)}),  # missing regime
        ({"U"}, {"Y"}, {"U": Atomic(0)}),  # latent action
        ({"X1"}, {"X1"}, {"X1": Atomic(0)}),  # action is also outcome
        ({"Q"}, {"Y"}, {"Q": Atomic(0)}),  # unknown node
    ],
)
def test_unknown_action_errors(actions, outcome, regimes):
    with pytest.raises(UnknownAction):
        validate_strategy(FIG1, actions, outcome, Strategy(regimes))


def test_outcome_may_be_conditioned_on():
    g = CausalDiagram({"W", "X", "Y"}, edges={("W", "Y"), ("X", "Y")})
    s = Strategy({"X": Conditional(("W",), {(0,): 1, (1,): 0})})
    nq = validate_strategy(g, {"X"}, {"W", "Y"}, s)
    assert nq.actions == {"X"}


def test_table_checks_with_cardinalities():
    cards = {n: 2 for n in FIG1.nodes}
    partial = Strategy({"X1": Conditional(("X2",), {(0,): 1})})
    with pytest.raises(InvalidRegime, match="not total"):
        validate_strategy(FIG1, {"X1", "X2"}, {"Y"}, Strategy({**partial.assignments, "X2": Atomic(0)}), cards)
    big = Strategy({"X1": Atomic(2), "X2": Atomic(0)})
    with pytest.raises(InvalidRegime):
        validate_strategy(FIG1, {"X1", "X2"}, {"Y"}, big, cards)
    short = Strategy({"X1": Random((), {(): (1.0,)}), "X2": Atomic(0)})
    with pytest.raises(InvalidRegime):
        validate_strategy(FIG1, {"X1", "X2"}, {"Y"}, short, cards)


def test_regime_construction_errors():
    with pytest.raises(InvalidRegime):
        Atomic(-1)
    with pytest.raises(InvalidRegime):
        Random(("Z",), {(0,): (0.5, 0.6)})
    with pytest.raises(InvalidRegime):
        Random(("Z",), {(0,): (-0.5, 1.5)})
    with pytest.raises(InvalidRegime):
        Conditional(("Z", "Z"), {(0, 0): 1})
    with pytest.raises(InvalidRegime):
        Conditional(("Z",), {(0, 1): 1})
    with pytest.raises(InvalidRegime):
        Strategy({"X": Conditional(("X",), {(0,): 0})})
    with pytest.raises(InvalidRegime):
        Strategy({"X": "atomic"})


def test_strategy_mapping_behaviour():
    s = Strategy({"B": Idle(), "A": Atomic(1)})
    assert list(s) == ["A", "B"] and len(s) == 2 and "A" in s
    with pytest.raises(UnknownAction):
        s["C"]
    assert s.without_idle().actions == {"A"}
    assert Strategy.atomic({"A": 1}) == Strategy({"A": Atomic(1)})


# -- manipulated graph -------------------------------------------------------------


def test_atomic_makes_action_parentless():
    g = manipulated_graph(FIG1, Strategy({"X1": Atomic(0)}))
    assert g.parents("X1") == frozenset()
    assert g.edges == FIG1.edges - {("U", "X1")}


def test_fig3_manipulated_parents():
    g = manipulated_graph(FIG3, fig3_query().strategy)
    assert g.parents("X1") == {"Z1"}
    assert g.parents("X2") == {"Z2"}
    assert g.parents("X3") == {"Z3"}
    for e in [("U1", "X1"), ("U2", "X2"), ("X2", "X3")]:
        assert e not in g.edges


def test_all_idle_leaves_diagram():
    assert manipulated_graph(FIG1, Strategy({"X1": Idle(), "X2": Idle()})) == FIG1


def test_manipulated_graph_idempotent():
    s = fig3_query().strategy
    once = manipulated_graph(FIG3, s)
    assert manipulated_graph(once, s) == once


def test_all_atomic_adds_no_edges():
    s = Strategy.atomic({a: 0 for a in ("X1", "X2", "X3")})
    g = manipulated_graph(FIG3, s)
    assert g.edges <= FIG3.edges
    assert all(not g.parents(a) for a in ("X1", "X2", "X3"))


# -- regime factors ------------------------------------------------------------------


def test_atomic_factor():
    assert regime_factor(Atomic(1), 1) == 1.0
    assert regime_factor(Atomic(1), 0) == 0.0


def test_conditional_factor():
    g = Conditional(("Z",), {(0,): 1, (1,): 0})
    assert regime_factor(g, 1, {"Z": 0}) == 1.0
    assert regime_factor(g, 1, {"Z": 1}) == 0.0
    assert g(0) == 1


def test_random_factor():
    r = Random(("Z",), {(0,): (0.25, 0.75), (1,): (0.5, 0.5)})
    assert regime_factor(r, 1, {"Z": 0}) == 0.75


def test_factor_errors():
    with pytest.raises(IdleHasNoFactor):
        regime_factor(Idle(), 0)
    r = Random(("Z",), {(0,): (0.25, 0.75)})
    with pytest.raises(MissingConditioningValue):
        regime_factor(r, 0, {})
    with pytest.raises(MissingConditioningValue):
        regime_factor(r, 0, {"Z": 1})


@st.composite
def regimes(draw):
    n_cond = draw(st.integers(0, 2))
    cond = tuple(f"C{i}" for i in range(n_cond))
    space = list(itertools.product(range(2), repeat=n_cond))
    k = draw(st.integers(2, 4))
    kind = draw(st.sampled_from(["atomic", "conditional", "random"]))
    if kind == "atomic":
        return Atomic(draw(st.integers(0, k - 1))), k
    if kind == "conditional":
        return Conditional(cond, {c: draw(st.integers(0, k - 1)) for c in space}), k
    table = {}
    for c in space:
        w = draw(st.lists(st.floats(0.01, 1.0), min_size=k, max_size=k))
        table[c] = tuple(x / sum(w) for x in w[:-1]) + (1.0 - sum(x / sum(w) for x in w[:-1]),)
    return Random(cond, table), k


@given(regimes(), st.data())
def test_factor_sums_to_one(rk, data):
    regime, k = rk
    cfg = data.draw(st.tuples(*[st.integers(0, 1)] * len(regime.cond)))
    cond = dict(zip(regime.cond, cfg))
    assert abs(sum(regime_factor(regime, x, cond) for x in range(k)) - 1.0) <= 1e-12
