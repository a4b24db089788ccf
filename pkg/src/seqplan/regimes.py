"""Intervention regimes, strategies and the manipulated graph.

Four regime kinds are supported: :class:`Idle` (no intervention),
:class:`Atomic` (``do(x*)``), :class:`Conditional` (``do(g(c))`` with a
deterministic table ``g``) and :class:`Random` (``x ~ P*(x | c)``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Union

from .exceptions import (
    CycleDetected,
    CyclicStrategy,
    IdleHasNoFactor,
    InvalidRegime,
    LatentConditioning,
    MissingConditioningValue,
    UnknownAction,
)
from .graph import CausalDiagram

__all__ = [
    "Idle",
    "Atomic",
    "Conditional",
    "Random",
    "Regime",
    "Strategy",
    "NormalizedQuery",
    "validate_strategy",
    "manipulated_graph",
    "regime_factor",
]

PROB_TOL = 1e-12


@dataclass(frozen=True)
class Idle:
    cond = ()


@dataclass(frozen=True)
class Atomic:
    value: int
    cond = ()

    def __post_init__(self):
        if int(self.value) != self.value or self.value < 0:
            raise InvalidRegime(f"atomic value must be a category index, got {self.value!r}")
        object.__setattr__(self, "value", int(self.value))


def _cfg_key(cfg) -> tuple[int, ...]:
    if isinstance(cfg, int):
        return (cfg,)
    return tuple(int(v) for v in cfg)


def _check_cond(cond) -> tuple[str, ...]:
    cond = (cond,) if isinstance(cond, str) else tuple(cond)
    if len(set(cond)) != len(cond):
        raise InvalidRegime(f"repeated conditioning variable in {cond}")
    return cond


@dataclass(frozen=True)
class Conditional:
    """``do(X = g(c))``: ``table`` maps each configuration of ``cond`` to a value."""

    cond: tuple[str, ...]
    table: Mapping[tuple[int, ...], int] = field(hash=False)

    def __post_init__(self):
        cond = _check_cond(self.cond)
        table = {}
        for cfg, v in dict(self.table).items():
            key = _cfg_key(cfg)
            if len(key) != len(cond):
                raise InvalidRegime(f"configuration {key} does not match conditioning set {cond}")
            if int(v) != v or v < 0:
                raise InvalidRegime(f"conditional value must be a category index, got {v!r}")
            table[key] = int(v)
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "table", table)

    def __call__(self, *cfg: int) -> int:
        return self.table[_cfg_key(cfg)]


@dataclass(frozen=True)
class Random:
    """``X ~ P*(x | c)``: ``table`` maps configurations of ``cond`` to probability vectors."""

    cond: tuple[str, ...]
    table: Mapping[tuple[int, ...], tuple[float, ...]] = field(hash=False)

    def __post_init__(self):
        cond = _check_cond(self.cond)
        table = {}
        for cfg, probs in dict(self.table).items():
            key = _cfg_key(cfg)
            if len(key) != len(cond):
                raise InvalidRegime(f"configuration {key} does not match conditioning set {cond}")
            probs = tuple(float(p) for p in probs)
            if any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > PROB_TOL:
                raise InvalidRegime(f"P* row for {key} is not a probability vector: {probs}")
            table[key] = probs
        lengths = {len(p) for p in table.values()}
        if len(lengths) > 1:
            raise InvalidRegime("P* rows have different lengths")
        object.__setattr__(self, "cond", cond)
        object.__setattr__(self, "table", table)


Regime = Union[Idle, Atomic, Conditional, Random]


@dataclass(frozen=True)
class Strategy:
    """Mapping from action variables to regimes (the sigma_X of a plan)."""

    assignments: Mapping[str, Regime] = field(hash=False)

    def __post_init__(self):
        regimes = dict(self.assignments)
        for name, r in regimes.items():
            if not isinstance(r, (Idle, Atomic, Conditional, Random)):
                raise InvalidRegime(f"{name}: not a regime: {r!r}")
            if name in r.cond:
                raise InvalidRegime(f"{name}: regime conditions on the action itself")
        object.__setattr__(self, "assignments", regimes)

    def __getitem__(self, action: str) -> Regime:
        try:
            return self.assignments[action]
        except KeyError:
            raise UnknownAction(f"no regime for {action!r}") from None

    def __contains__(self, action) -> bool:
        return action in self.assignments

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self.assignments))

    def __len__(self) -> int:
        return len(self.assignments)

    @property
    def actions(self) -> frozenset[str]:
        return frozenset(self.assignments)

    def items(self):
        return [(a, self.assignments[a]) for a in sorted(self.assignments)]

    def without_idle(self) -> "Strategy":
        return Strategy({a: r for a, r in self.assignments.items() if not isinstance(r, Idle)})

    @classmethod
    def atomic(cls, values: Mapping[str, int]) -> "Strategy":
        return cls({a: Atomic(v) for a, v in values.items()})


class NormalizedQuery(NamedTuple):
    actions: frozenset[str]
    covariates: frozenset[str]
    strategy: Strategy


def _check_tables(action: str, regime: Regime, cards: Mapping[str, int]) -> None:
    k = cards.get(action)
    if isinstance(regime, Atomic):
        if k is not None and regime.value >= k:
            raise InvalidRegime(f"{action}: atomic value {regime.value} outside 0..{k - 1}")
        return
    if isinstance(regime, Idle):
        return
    try:
        space = list(itertools.product(*(range(cards[c]) for c in regime.cond)))
    except KeyError as exc:
        raise InvalidRegime(f"{action}: no cardinality for {exc.args[0]!r}") from None
    missing = [cfg for cfg in space if cfg not in regime.table]
    if missing:
        raise InvalidRegime(f"{action}: table is not total, missing configuration {missing[0]}")
    for cfg, v in regime.table.items():
        if cfg not in space:
            raise InvalidRegime(f"{action}: configuration {cfg} outside the declared space")
        if k is None:
            continue
        if isinstance(regime, Conditional) and v >= k:
            raise InvalidRegime(f"{action}: g{cfg} = {v} outside 0..{k - 1}")
        if isinstance(regime, Random) and len(v) != k:
            raise InvalidRegime(f"{action}: P* row for {cfg} has {len(v)} entries, expected {k}")


def validate_strategy(
    diagram: CausalDiagram,
    actions: Iterable[str],
    outcome: Iterable[str],
    strategy: Strategy,
    cardinalities: Mapping[str, int] | None = None,
) -> NormalizedQuery:
    """Check a plan query and move idle actions to the covariates.

    Conditioning sets must consist of observed variables (latents are
    rejected). Outcome variables are accepted as conditioning variables; the
    acyclicity check on the manipulated graph rules out conditioning on
    descendants. When ``cardinalities`` is given, regime tables are also
    checked for totality and range.
    """
    actions = frozenset(actions)
    outcome = frozenset(outcome)
    for n in sorted(actions | outcome):
        if n not in diagram.observed:
            if n in diagram.latent:
                raise UnknownAction(f"{n!r} is latent; actions and outcomes must be observed")
            raise UnknownAction(f"{n!r} is not a node of the diagram")
    if actions & outcome:
        raise UnknownAction(f"{sorted(actions & outcome)} declared as both action and outcome")
    extra = strategy.actions - actions
    if extra:
        raise UnknownAction(f"regime given for non-action {sorted(extra)[0]!r}")
    missing = actions - strategy.actions
    if missing:
        raise UnknownAction(f"no regime for action {sorted(missing)[0]!r}")
    for a, r in strategy.items():
        for c in r.cond:
            if c in diagram.latent:
                raise LatentConditioning(f"{a}: regime conditions on latent {c!r}")
            if c not in diagram.observed:
                raise LatentConditioning(f"{a}: regime conditions on unknown node {c!r}")
        if cardinalities is not None:
            _check_tables(a, r, cardinalities)
    active = strategy.without_idle()
    manipulated_graph(diagram, active)
    covariates = diagram.observed - outcome - active.actions
    return NormalizedQuery(active.actions, frozenset(covariates), active)


def manipulated_graph(diagram: CausalDiagram, strategy: Strategy) -> CausalDiagram:
    """Cut arrows into every intervened action; add ``C -> X`` for its regime's ``C``.

    Idle regimes leave the diagram untouched.
    """
    active = {a: r for a, r in strategy.items() if not isinstance(r, Idle)}
    edges = {(p, c) for p, c in diagram.edges if c not in active}
    for a, r in active.items():
        edges.update((c, a) for c in r.cond)
    try:
        return CausalDiagram(diagram.observed, diagram.latent, edges)
    except CycleDetected as exc:
        raise CyclicStrategy(f"manipulated graph has a cycle: {' -> '.join(exc.cycle)}") from None


def regime_factor(regime: Regime, action_value: int, cond_values: Mapping[str, int] = None) -> float:
    """P(x | c; sigma) for a non-idle regime."""
    if isinstance(regime, Idle):
        raise IdleHasNoFactor("the idle regime keeps the observational mechanism")
    if isinstance(regime, Atomic):
        return 1.0 if action_value == regime.value else 0.0
    cond_values = cond_values or {}
    try:
        cfg = tuple(int(cond_values[c]) for c in regime.cond)
    except KeyError as exc:
        raise MissingConditioningValue(f"no value for conditioning variable {exc.args[0]!r}") from None
    try:
        entry = regime.table[cfg]
    except KeyError:
        raise MissingConditioningValue(f"regime table has no entry for {cfg}") from None
    if isinstance(regime, Conditional):
        return 1.0 if action_value == entry else 0.0
    if action_value >= len(entry):
        return 0.0
    return entry[action_value]
