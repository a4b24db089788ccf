"""Random diagrams and plan queries for property checks."""

from __future__ import annotations

import itertools

import numpy as np

from .graph import CausalDiagram, topological_order
from .identification import PlanQuery
from .regimes import Atomic, Conditional, Idle, Random, Strategy

__all__ = ["random_diagram", "random_strategy", "random_query"]

REGIME_KINDS = ("idle", "atomic", "conditional", "random")


def random_diagram(
    rng: np.random.Generator,
    max_observed: int = 6,
    max_latent: int = 3,
    min_observed: int = 2,
    edge_prob: float | None = None,
) -> CausalDiagram:
    """DAG over V0..V(n-1) (edges follow the index order) plus latents U0..

    Most latents are roots with two or three observed children. Now and then
    a latent gets a latent or observed parent, which exercises projection of
    longer latent paths.
    """
    n = int(rng.integers(min_observed, max_observed + 1))
    observed = [f"V{i}" for i in range(n)]
    p = float(rng.uniform(0.25, 0.6)) if edge_prob is None else edge_prob
    edges = {(observed[i], observed[j]) for i, j in itertools.combinations(range(n), 2) if rng.random() < p}
    k = int(rng.integers(0, max_latent + 1)) if max_latent > 0 else 0
    latent = [f"U{i}" for i in range(k)]
    first_child = {}
    for i, u in enumerate(latent):
        size = min(n, int(rng.integers(2, 4)))
        kids = sorted(int(c) for c in rng.choice(n, size=size, replace=False))
        edges.update((u, observed[c]) for c in kids)
        first_child[u] = kids[0]
        roll = rng.random()
        # a latent sits just before its first child, which keeps the order acyclic
        before = [w for w in latent[:i] if first_child[w] <= kids[0]]
        if roll < 0.15 and before:
            edges.add((before[int(rng.integers(0, len(before)))], u))
        elif roll < 0.3 and kids[0] > 0:
            edges.add((observed[int(rng.integers(0, kids[0]))], u))
    return CausalDiagram(set(observed), set(latent), edges)


def _random_regime(rng, kind: str, action: str, earlier: list[str], cards) -> object:
    if kind == "idle":
        return Idle()
    k = cards.get(action, 2)
    if kind == "atomic":
        return Atomic(int(rng.integers(0, k)))
    size = int(rng.integers(0, min(2, len(earlier)) + 1))
    cond = tuple(sorted(str(c) for c in rng.choice(earlier, size=size, replace=False))) if size else ()
    space = list(itertools.product(*(range(cards.get(c, 2)) for c in cond)))
    if kind == "conditional":
        return Conditional(cond, {cfg: int(rng.integers(0, k)) for cfg in space})
    table = {}
    for cfg in space:
        row = rng.dirichlet(np.ones(k))
        table[cfg] = tuple(row)
    return Random(cond, table)


def random_strategy(
    rng: np.random.Generator,
    diagram: CausalDiagram,
    actions,
    cardinalities=None,
    kinds=REGIME_KINDS,
) -> Strategy:
    """Regimes conditioning only on observed nodes earlier in the topological
    order, so the manipulated graph is always acyclic."""
    cards = dict(cardinalities or {})
    order = [v for v in topological_order(diagram) if v in diagram.observed]
    regimes = {}
    for a in sorted(actions):
        earlier = order[: order.index(a)]
        kind = kinds[int(rng.integers(0, len(kinds)))]
        regimes[a] = _random_regime(rng, kind, a, earlier, cards)
    return Strategy(regimes)


def random_query(
    rng: np.random.Generator,
    diagram: CausalDiagram,
    cardinalities=None,
    kinds=REGIME_KINDS,
    max_actions: int = 3,
    max_outcome: int = 2,
) -> PlanQuery:
    observed = sorted(diagram.observed)
    n_act = int(rng.integers(1, min(max_actions, len(observed) - 1) + 1))
    actions = sorted(str(a) for a in rng.choice(observed, size=n_act, replace=False))
    rest = [v for v in observed if v not in actions]
    n_out = int(rng.integers(1, min(max_outcome, len(rest)) + 1))
    outcome = sorted(str(y) for y in rng.choice(rest, size=n_out, replace=False))
    strategy = random_strategy(rng, diagram, actions, cardinalities, kinds)
    return PlanQuery(diagram, frozenset(actions), frozenset(outcome), strategy, cardinalities)
