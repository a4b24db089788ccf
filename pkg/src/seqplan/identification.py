"""Identification of plan effects from the observational distribution.

The engine works on the latent projection of a diagram. ``identify_Q``
expresses ``Q[S]`` (the distribution of ``S`` under atomic interventions on
all other observed variables) through c-component factors. ``identify_plan``
assembles the plan estimand from ``Q[Y+Z_D]``, the joint Q-factor of the
outcome and its covariate ancestors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .estimand import (
    Estimand,
    Fixed,
    Fn,
    Indicator,
    ObsProb,
    Quotient,
    StrategyFactor,
    Sym,
    make_product,
    make_sum,
    simplify,
    substitute,
)
from .exceptions import EstimandError, LatentsPresent, NotACComponent
from .graph import (
    CausalDiagram,
    ProjectedDiagram,
    ancestors,
    c_components,
    has_latent_chains,
    induced_subgraph,
    project_latents,
    topological_order,
)
from .regimes import Atomic, Conditional, Random, Strategy, manipulated_graph, validate_strategy

__all__ = [
    "PlanQuery",
    "Identified",
    "CriterionFails",
    "IdentificationOutcome",
    "QFailure",
    "c_factor",
    "identify_component",
    "identify_Q",
    "identify_plan",
    "identify_unconditional",
    "g_formula",
]


@dataclass(frozen=True)
class PlanQuery:
    diagram: CausalDiagram
    actions: frozenset[str]
    outcome: frozenset[str]
    strategy: Strategy
    cardinalities: Mapping[str, int] | None = field(default=None, hash=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "actions", frozenset(self.actions))
        object.__setattr__(self, "outcome", frozenset(self.outcome))


@dataclass(frozen=True)
class Identified:
    estimand: Estimand


@dataclass(frozen=True)
class CriterionFails:
    """The sufficient criterion does not hold; ``Q[failing_set]`` is not
    identifiable inside ``failing_component``."""

    failing_set: frozenset[str]
    failing_component: frozenset[str]


@dataclass(frozen=True)
class QFailure:
    failing_set: frozenset[str]
    failing_component: frozenset[str]


@dataclass(frozen=True)
class IdentificationOutcome:
    verdict: Union[Identified, CriterionFails]
    z_d: frozenset[str]
    x_d: frozenset[str]
    notes: tuple[str, ...] = ()

    @property
    def identified(self) -> bool:
        return isinstance(self.verdict, Identified)

    @property
    def estimand(self) -> Estimand | None:
        return self.verdict.estimand if self.identified else None


# -- Q-level identification ---------------------------------------------------------


def _block_of(projection: ProjectedDiagram, node: str) -> frozenset[str]:
    for block in c_components(projection):
        if node in block:
            return block
    raise NotACComponent(f"{node!r} is not in the projection")  # pragma: no cover


def c_factor(T: Iterable[str], projection: ProjectedDiagram, order: list[str], minimal: bool = False) -> Estimand:
    """Q[T] for a c-component ``T`` as a product of observational conditionals.

    By default each member is conditioned on all its predecessors in
    ``order``. With ``minimal=True`` member ``v`` is conditioned only on the
    rest of its c-component in the prefix graph ending at ``v`` plus that
    component's parents, which gives the same value on every compatible model.
    """
    T = frozenset(T)
    if T not in c_components(projection):
        raise NotACComponent(f"{sorted(T)} is not a c-component of the projection")
    if set(order) != set(projection.nodes) or len(order) != len(projection.nodes):
        raise NotACComponent("order must list every node of the projection once")
    factors = []
    for i, v in enumerate(order):
        if v not in T:
            continue
        if minimal:
            prefix = induced_subgraph(projection, order[: i + 1])
            block = _block_of(prefix, v)
            pa = set().union(*(prefix.parents(b) for b in block))
            given = sorted((block | pa) - {v})
        else:
            given = order[:i]
        factors.append(ObsProb((Sym(v),), tuple(Sym(g) for g in given)))
    return make_product(factors)


def identify_component(
    C: Iterable[str], T: Iterable[str], qT: Estimand, projection: ProjectedDiagram
) -> Estimand | QFailure:
    """Q[C] from Q[T] for ``C`` inside the c-component ``T``, or the failing pair."""
    C, T = frozenset(C), frozenset(T)
    while True:
        gT = induced_subgraph(projection, T)
        A = ancestors(gT, C)
        if A == C:
            return simplify(make_sum(T - C, qT))
        if A == T:
            return QFailure(C, T)
        qA = simplify(make_sum(T - A, qT))
        gA = induced_subgraph(projection, A)
        T2 = next(b for b in c_components(gA) if C <= b)
        order = topological_order(gA)
        factors = []
        for i, v in enumerate(order):
            if v not in T2:
                continue
            upto = make_sum(order[i + 1:], qA)
            below = make_sum(order[i:], qA)
            factors.append(Quotient(upto, below))
        T, qT = T2, simplify(make_product(factors))


def identify_Q(S: Iterable[str], projection: ProjectedDiagram) -> Estimand | QFailure:
    """Q[S] as an estimand over the observed variables, or the first failing pair."""
    S = frozenset(S)
    blocks = c_components(projection)
    parts = []
    for Sj in c_components(induced_subgraph(projection, S)):
        Tj = next(b for b in blocks if Sj <= b)
        order = topological_order(projection, first=ancestors(projection, Sj))
        q = c_factor(Tj, projection, order, minimal=True)
        result = identify_component(Sj, Tj, q, projection)
        if isinstance(result, QFailure):
            return result
        parts.append(result)
    return simplify(make_product(parts))


# -- plan identification ---------------------------------------------------------------


def _normalize(query: PlanQuery):
    return validate_strategy(query.diagram, query.actions, query.outcome, query.strategy, query.cardinalities)


def _ancestral_sets(diagram: CausalDiagram, outcome, active: Strategy):
    g_sigma = manipulated_graph(diagram, active)
    anc = ancestors(g_sigma, outcome) & diagram.observed
    x_d = anc & active.actions
    z_d = anc - active.actions - frozenset(outcome)
    return x_d, z_d


def _assemble(q: Estimand, outcome, x_d, z_d, active: Strategy) -> Estimand:
    bound = set(z_d)
    factors = [q]
    fixed = {}
    for x in sorted(x_d):
        regime = active[x]
        stray = set(regime.cond) - set(x_d) - set(z_d) - set(outcome)
        if stray:
            raise EstimandError(f"internal: regime for {x} conditions outside the ancestral set: {sorted(stray)}")
        if isinstance(regime, Atomic):
            fixed[Sym(x)] = Fixed(x)
        elif isinstance(regime, Conditional):
            factors.append(Indicator(Sym(x), Fn(x, tuple(Sym(c) for c in regime.cond))))
            bound.add(x)
        elif isinstance(regime, Random):
            factors.append(StrategyFactor(x, Sym(x), tuple(Sym(c) for c in regime.cond)))
            bound.add(x)
    # Q[Y+Z_D] does not depend on values outside Y, Z_D and their parents in
    # the manipulated graph, so any leftover symbol can take a fixed action
    # value or be averaged against its observational marginal.
    keep = set(outcome) | set(x_d) | set(z_d)
    leftover = sorted({s.var for s in q.free} - keep)
    avg = []
    for w in leftover:
        regime = active.assignments.get(w)
        if isinstance(regime, Atomic):
            fixed[Sym(w)] = Fixed(w)
        else:
            avg.append(w)
    body = substitute(make_product(factors), fixed) if fixed else make_product(factors)
    if avg:
        body = make_sum(avg, make_product([body, ObsProb(tuple(Sym(w) for w in avg))]))
    return simplify(make_sum(sorted(bound), body))


def _plan_outcome(diagram, outcome, active: Strategy, notes: list[str]) -> IdentificationOutcome:
    outcome = frozenset(outcome)
    x_d, z_d = _ancestral_sets(diagram, outcome, active)
    projection = project_latents(diagram)
    result = identify_Q(outcome | z_d, projection)
    if isinstance(result, QFailure):
        verdict = CriterionFails(result.failing_set, result.failing_component)
        return IdentificationOutcome(verdict, z_d, x_d, tuple(notes))
    estimand = _assemble(result, outcome, x_d, z_d, active)
    free = {s.var for s in estimand.free}
    if not free <= outcome or any(s.prime for s in estimand.free):
        raise EstimandError(f"internal: plan estimand has stray free symbols {sorted(free - outcome)}")
    return IdentificationOutcome(Identified(estimand), z_d, x_d, tuple(notes))


def _notes(diagram: CausalDiagram, outcome, strategy: Strategy) -> list[str]:
    notes = []
    if has_latent_chains(diagram):
        notes.append("latent chains present; projection composes latent paths")
    for a, r in strategy.items():
        used = sorted(set(r.cond) & set(outcome))
        if used:
            notes.append(f"regime for {a} conditions on outcome variable(s) {', '.join(used)}")
    return notes


def identify_plan(query: PlanQuery) -> IdentificationOutcome:
    """Identify P(y; sigma) for a plan, or report that the criterion fails.

    ``z_d`` and ``x_d`` are the covariates and intervened actions that are
    ancestors of the outcome in the manipulated graph. Idle actions count as
    covariates.
    """
    nq = _normalize(query)
    notes = _notes(query.diagram, query.outcome, nq.strategy)
    return _plan_outcome(query.diagram, query.outcome, nq.strategy, notes)


def identify_unconditional(
    diagram: CausalDiagram, actions: Iterable[str], outcome: Iterable[str], values: Mapping[str, int]
) -> IdentificationOutcome:
    """P_x(y) for atomic values ``values`` of every action."""
    actions = frozenset(actions)
    strategy = Strategy.atomic({a: values[a] for a in actions})
    return identify_plan(PlanQuery(diagram, actions, frozenset(outcome), strategy))


def g_formula(diagram: CausalDiagram, query: PlanQuery) -> Estimand:
    """Sequential adjustment for latent-free diagrams.

    Every non-intervened variable is conditioned on all its predecessors in
    the lexicographic topological order of the diagram itself, so each
    conditioning set holds only non-descendants.
    """
    if diagram.latent:
        raise LatentsPresent(f"g_formula needs a latent-free diagram, got latents {sorted(diagram.latent)}")
    nq = validate_strategy(diagram, query.actions, query.outcome, query.strategy, query.cardinalities)
    active = nq.strategy
    manipulated_graph(diagram, active)
    order = topological_order(diagram)
    factors = []
    fixed = {}
    bound = []
    for i, v in enumerate(order):
        regime = active.assignments.get(v)
        if regime is None:
            factors.append(ObsProb((Sym(v),), tuple(Sym(p) for p in order[:i])))
        elif isinstance(regime, Atomic):
            fixed[Sym(v)] = Fixed(v)
            continue
        elif isinstance(regime, Conditional):
            factors.append(Indicator(Sym(v), Fn(v, tuple(Sym(c) for c in regime.cond))))
        else:
            factors.append(StrategyFactor(v, Sym(v), tuple(Sym(c) for c in regime.cond)))
        if v not in query.outcome:
            bound.append(v)
    body = make_product(factors)
    if fixed:
        body = substitute(body, fixed)
    return simplify(make_sum(bound, body))
