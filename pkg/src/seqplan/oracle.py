"""Ground truth by exact enumeration.

A :class:`DiscreteModel` fixes a CPT for every node of a causal diagram,
latents included. Observational and interventional distributions are computed
by contracting the CPT tensors with :func:`numpy.einsum` and summing out
everything but the requested variables.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .exceptions import ModelError, StateSpaceTooLarge, UnknownVariable
from .graph import CausalDiagram, topological_order
from .regimes import Idle, Strategy, regime_factor

__all__ = [
    "MAX_STATES",
    "MIN_PROB",
    "DiscreteModel",
    "JointTable",
    "observational",
    "interventional",
    "truncated_product_effect",
    "random_model",
    "compare",
    "check_counterexample",
]

MAX_STATES = 2 ** 20
MIN_PROB = 0.01
ROW_TOL = 1e-12


@dataclass(frozen=True)
class JointTable:
    """Dense distribution over ``variables`` (axis i belongs to ``variables[i]``)."""

    variables: tuple[str, ...]
    probs: np.ndarray = field(compare=False, repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.ndim != len(self.variables):
            raise ModelError(f"table has {probs.ndim} axes for {len(self.variables)} variables")
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "probs", probs)

    @cached_property
    def _axis(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    @cached_property
    def _marginals(self) -> dict:
        return {}

    def cardinality(self, var: str) -> int:
        try:
            return self.probs.shape[self._axis[var]]
        except KeyError:
            raise UnknownVariable(f"{var!r} is not in the table") from None

    def marginal(self, variables: Iterable[str]) -> np.ndarray:
        """Marginal array with axes in sorted variable order."""
        key = tuple(sorted(set(variables)))
        hit = self._marginals.get(key)
        if hit is None:
            for v in key:
                if v not in self._axis:
                    raise UnknownVariable(f"{v!r} is not in the table")
            drop = tuple(i for i, v in enumerate(self.variables) if v not in key)
            m = self.probs.sum(axis=drop) if drop else self.probs
            kept = [v for v in self.variables if v in key]
            hit = np.transpose(m, [kept.index(v) for v in key]) if key else np.asarray(m)
            self._marginals[key] = hit
        return hit

    def prob(self, assignment: Mapping[str, int]) -> float:
        key = tuple(sorted(assignment))
        m = self.marginal(key)
        return float(m[tuple(int(assignment[v]) for v in key)])

    def conditional(self, targets: Mapping[str, int], given: Mapping[str, int]) -> float:
        """P(targets | given); 0 when P(given) = 0 or the two disagree on a shared variable."""
        joint = dict(given)
        for v, val in targets.items():
            if joint.get(v, val) != val:
                return 0.0
            joint[v] = val
        num = self.prob(joint)
        if not given:
            return num
        den = self.prob(given)
        return num / den if den > 0 else 0.0

    def distribution(self) -> dict[tuple[int, ...], float]:
        return {cfg: float(self.probs[cfg]) for cfg in np.ndindex(*self.probs.shape)}

    def total(self) -> float:
        return float(self.probs.sum())


@dataclass(frozen=True)
class DiscreteModel:
    """CPT for every node; ``cpts[n]`` has axes ``sorted(parents(n))`` then ``n``."""

    diagram: CausalDiagram
    cardinalities: Mapping[str, int] = field(hash=False)
    cpts: Mapping[str, np.ndarray] = field(hash=False, repr=False)

    def __post_init__(self):
        cards = {n: int(k) for n, k in dict(self.cardinalities).items()}
        cpts = {n: np.asarray(t, dtype=float) for n, t in dict(self.cpts).items()}
        for n in sorted(self.diagram.nodes):
            if cards.get(n, 0) < 2:
                raise ModelError(f"{n}: cardinality must be at least 2")
            if n not in cpts:
                raise ModelError(f"{n}: missing CPT")
            shape = tuple(cards[p] for p in self.parents(n)) + (cards[n],)
            t = cpts[n]
            if t.shape != shape:
                raise ModelError(f"{n}: CPT shape {t.shape}, expected {shape}")
            if (t < 0).any() or not np.allclose(t.sum(axis=-1), 1.0, rtol=0, atol=ROW_TOL * 10):
                raise ModelError(f"{n}: CPT rows must be probability vectors")
        extra = set(cpts) - self.diagram.nodes
        if extra:
            raise ModelError(f"CPT for unknown node {sorted(extra)[0]!r}")
        states = math.prod(cards[n] for n in self.diagram.nodes)
        if states > MAX_STATES:
            raise StateSpaceTooLarge(f"{states} joint configurations exceed the limit of {MAX_STATES}")
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "cpts", cpts)

    def parents(self, node: str) -> tuple[str, ...]:
        return tuple(sorted(self.diagram.parents(node)))

    @property
    def observed(self) -> tuple[str, ...]:
        return tuple(sorted(self.diagram.observed))


def _regime_tensor(regime, action: str, cards: Mapping[str, int]) -> np.ndarray:
    shape = tuple(cards[c] for c in regime.cond) + (cards[action],)
    t = np.zeros(shape)
    for cfg in itertools.product(*(range(cards[c]) for c in regime.cond)):
        cond = dict(zip(regime.cond, cfg))
        for x in range(cards[action]):
            t[cfg + (x,)] = regime_factor(regime, x, cond)
    return t


def _contract(model: DiscreteModel, strategy: Strategy | None, keep: Iterable[str]) -> JointTable:
    nodes = sorted(model.diagram.nodes)
    label = {n: i for i, n in enumerate(nodes)}
    keep = tuple(sorted(keep))
    for v in keep:
        if v not in model.diagram.observed:
            raise UnknownVariable(f"{v!r} is not an observed variable")
    operands = []
    for n in nodes:
        regime = strategy.assignments.get(n) if strategy is not None else None
        if regime is None or isinstance(regime, Idle):
            operands += [model.cpts[n], [label[p] for p in model.parents(n)] + [label[n]]]
        else:
            operands += [_regime_tensor(regime, n, model.cardinalities),
                         [label[c] for c in regime.cond] + [label[n]]]
    out = np.einsum(*operands, [label[v] for v in keep], optimize="greedy")
    return JointTable(keep, out)


def observational(model: DiscreteModel) -> JointTable:
    """P(v) over the observed variables, latents summed out."""
    return _contract(model, None, model.observed)


def interventional(model: DiscreteModel, strategy: Strategy, outcome: Iterable[str]) -> JointTable:
    """P(y; sigma) over the outcome variables."""
    return _contract(model, strategy, outcome)


def truncated_product_effect(model: DiscreteModel, strategy: Strategy, outcome: Iterable[str]) -> dict:
    """Plain-loop reference for :func:`interventional` on small models.

    Walks every joint configuration of all nodes and multiplies the kept CPT
    entries with the regime factors. Returns ``{y-configuration: probability}``
    with keys ordered like ``sorted(outcome)``.
    """
    outcome = tuple(sorted(outcome))
    nodes = topological_order(model.diagram)
    cards = model.cardinalities
    result = {cfg: 0.0 for cfg in itertools.product(*(range(cards[y]) for y in outcome))}
    for values in itertools.product(*(range(cards[n]) for n in nodes)):
        v = dict(zip(nodes, values))
        p = 1.0
        for n in nodes:
            regime = strategy.assignments.get(n)
            if regime is None or isinstance(regime, Idle):
                idx = tuple(v[q] for q in model.parents(n)) + (v[n],)
                p *= float(model.cpts[n][idx])
            else:
                p *= regime_factor(regime, v[n], v)
            if p == 0.0:
                break
        result[tuple(v[y] for y in outcome)] += p
    return result


def _row(rng: np.random.Generator, k: int, min_prob: float) -> np.ndarray:
    return min_prob + (1.0 - min_prob * k) * rng.dirichlet(np.ones(k))


def random_model(
    diagram: CausalDiagram,
    cardinalities: Mapping[str, int] | None = None,
    seed: int | np.random.Generator = 0,
    min_prob: float = MIN_PROB,
) -> DiscreteModel:
    """Random strictly positive model; every CPT entry is at least ``min_prob``.

    Nodes missing from ``cardinalities`` are binary. CPTs are drawn in sorted
    node order, so the result depends only on the arguments.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cards = {n: 2 for n in diagram.nodes}
    cards.update(cardinalities or {})
    cpts = {}
    for n in sorted(diagram.nodes):
        pshape = tuple(cards[p] for p in sorted(diagram.parents(n)))
        k = cards[n]
        rows = [_row(rng, k, min_prob) for _ in range(math.prod(pshape))]
        cpts[n] = np.array(rows).reshape(pshape + (k,))
    return DiscreteModel(diagram, cards, cpts)


def compare(model: DiscreteModel, strategy: Strategy, outcome: Iterable[str], estimand) -> float:
    """Max over y of |estimand(y) - P(y; sigma)|."""
    from .estimand import evaluate

    truth = interventional(model, strategy, outcome)
    obs = observational(model)
    worst = 0.0
    for cfg, p in truth.distribution().items():
        value = evaluate(estimand, obs, strategy, dict(zip(truth.variables, cfg)))
        worst = max(worst, abs(value - p))
    return worst


def check_counterexample(
    model_a: DiscreteModel, model_b: DiscreteModel, strategy: Strategy, outcome: Iterable[str]
) -> tuple[float, float]:
    """(max observational difference, max interventional gap) between two models."""
    oa, ob = observational(model_a), observational(model_b)
    if oa.variables != ob.variables or oa.probs.shape != ob.probs.shape:
        raise ModelError("models disagree on the observed variables")
    ia, ib = interventional(model_a, strategy, outcome), interventional(model_b, strategy, outcome)
    return float(np.abs(oa.probs - ob.probs).max()), float(np.abs(ia.probs - ib.probs).max())

