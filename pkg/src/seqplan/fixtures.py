"""Reference diagrams, strategies and counterexample model pairs.

``FIG1``, ``FIG2A`` and ``FIG3`` are small diagrams used throughout the tests,
the CLI examples and the README. Each comes with the plan queries exercised on
it. The ``*_counterexample`` functions build two models that share one
observational distribution but disagree on a plan effect, which shows that a
query the engine rejects really cannot be computed from observations.
"""

from __future__ import annotations

import numpy as np

from .graph import CausalDiagram
from .identification import PlanQuery
from .oracle import DiscreteModel, random_model
from .regimes import Atomic, Conditional, Random, Strategy

__all__ = [
    "FIG1",
    "FIG2A",
    "FIG3",
    "fig1_query",
    "fig2a_dynamic_query",
    "fig2a_atomic_query",
    "fig3_query",
    "fig2a_counterexample",
    "fig3_counterexample",
]


def _edges(text: str) -> set[tuple[str, str]]:
    return {tuple(e.split(">")) for e in text.split()}


# U confounds X1 and Z; X2 feeds Z; Y has parents X1, X2, Z.
FIG1 = CausalDiagram(
    observed={"X1", "X2", "Z", "Y"},
    latent={"U"},
    edges=_edges("U>X1 U>Z X2>Z X1>Y X2>Y Z>Y"),
)

# Two-stage plan: X1 -> Z -> X2 -> Y with U1 confounding X1/Z and U2 confounding Z/Y.
FIG2A = CausalDiagram(
    observed={"X1", "Z", "X2", "Y"},
    latent={"U1", "U2"},
    edges=_edges("U1>X1 U1>Z U2>Z U2>Y X1>Z X1>X2 Z>X2 X2>Y X1>Y"),
)

# Three-stage plan with covariates Z1, Z2, Z3 and latents U1 (X1/Z2), U2 (X2/Z3).
FIG3 = CausalDiagram(
    observed={"Z1", "X1", "Z2", "X2", "Z3", "X3", "Y"},
    latent={"U1", "U2"},
    edges=_edges("Z1>X1 U1>X1 U1>Z2 X1>Z2 Z2>X2 U2>X2 U2>Z3 Z3>X3 X2>X3 X1>Y X3>Y Z3>Y"),
)


def fig1_query(p1=(0.3, 0.7), p2=(0.6, 0.4)) -> PlanQuery:
    """Both actions drawn at random, independently of everything else."""
    strategy = Strategy({"X1": Random((), {(): p1}), "X2": Random((), {(): p2})})
    return PlanQuery(FIG1, {"X1", "X2"}, {"Y"}, strategy)


def fig2a_dynamic_query() -> PlanQuery:
    """X1 fixed to 0, then X2 copies the observed Z."""
    strategy = Strategy({
        "X1": Atomic(0),
        "X2": Conditional(("X1", "Z"), {(a, z): z for a in (0, 1) for z in (0, 1)}),
    })
    return PlanQuery(FIG2A, {"X1", "X2"}, {"Y"}, strategy)


def fig2a_atomic_query(x1: int = 0, x2: int = 1) -> PlanQuery:
    return PlanQuery(FIG2A, {"X1", "X2"}, {"Y"}, Strategy.atomic({"X1": x1, "X2": x2}))


def fig3_query() -> PlanQuery:
    """Each X_i reacts to its own covariate Z_i."""
    flip = {(0,): 1, (1,): 0}
    copy = {(0,): 0, (1,): 1}
    strategy = Strategy({
        "X1": Conditional(("Z1",), copy),
        "X2": Conditional(("Z2",), flip),
        "X3": Conditional(("Z3",), flip),
    })
    return PlanQuery(FIG3, {"X1", "X2", "X3"}, {"Y"}, strategy)


def _agree(p: float) -> np.ndarray:
    """Binary CPT with P(child = parent) = p."""
    return np.array([[p, 1 - p], [1 - p, p]])


def fig2a_counterexample(seed: int = 0) -> tuple[DiscreteModel, DiscreteModel, PlanQuery]:
    """Two FIG2A models with equal P(v) but different effects of the dynamic plan.

    In model A, Z tracks U2 with probability 0.7 whatever U1 is. In model B the
    agreement is 0.85 when U1 matches X1 and 0.1 otherwise; since X1 matches U1
    with probability 0.8 this averages to the same 0.7 given X1. Fixing X1
    breaks that match, and P(y=1; plan) goes from 0.34 to 0.52.
    """
    base = random_model(FIG2A, seed=seed)
    cpts = dict(base.cpts)
    cpts["U1"] = np.array([0.5, 0.5])
    cpts["U2"] = np.array([0.5, 0.5])
    cpts["X1"] = _agree(0.8)  # axes U1, X1
    cpts["X2"] = np.array([[[0.75, 0.25], [0.25, 0.75]]] * 2)  # axes X1, Z, X2
    y = np.zeros((2, 2, 2, 2))  # axes U2, X1, X2, Y
    for u2 in (0, 1):
        for x2 in (0, 1):
            p1 = 0.9 if x2 != u2 else 0.1
            y[u2, :, x2] = [1 - p1, p1]
    cpts["Y"] = y
    za = np.zeros((2, 2, 2, 2))  # axes U1, U2, X1, Z
    zb = np.zeros((2, 2, 2, 2))
    for u1 in (0, 1):
        for u2 in (0, 1):
            for x1 in (0, 1):
                a = 0.7
                b = 0.85 if u1 == x1 else 0.1
                za[u1, u2, x1] = [a, 1 - a] if u2 == 0 else [1 - a, a]
                zb[u1, u2, x1] = [b, 1 - b] if u2 == 0 else [1 - b, b]
    model_a = DiscreteModel(FIG2A, base.cardinalities, {**cpts, "Z": za})
    model_b = DiscreteModel(FIG2A, base.cardinalities, {**cpts, "Z": zb})
    return model_a, model_b, fig2a_dynamic_query()


def fig3_counterexample(seed: int = 0) -> tuple[DiscreteModel, DiscreteModel, PlanQuery]:
    """Two FIG3 models with equal P(v) but different Q[{Z2}].

    The query fixes every observed variable except Z2 to 0 and looks at Z2.
    Model A has P(z2 = x1) = 0.7; model B has 0.85 when U1 matches X1 and
    0.1 otherwise, which gives the same observational mixture.
    """
    base = random_model(FIG3, seed=seed)
    cpts = dict(base.cpts)
    cpts["U1"] = np.array([0.5, 0.5])
    cpts["X1"] = np.stack([_agree(0.8)] * 2, axis=1)  # axes U1, Z1, X1
    za = np.zeros((2, 2, 2))  # axes U1, X1, Z2
    zb = np.zeros((2, 2, 2))
    for u1 in (0, 1):
        for x1 in (0, 1):
            b = 0.85 if u1 == x1 else 0.1
            za[u1, x1] = [0.7, 0.3] if x1 == 0 else [0.3, 0.7]
            zb[u1, x1] = [b, 1 - b] if x1 == 0 else [1 - b, b]
    model_a = DiscreteModel(FIG3, base.cardinalities, {**cpts, "Z2": za})
    model_b = DiscreteModel(FIG3, base.cardinalities, {**cpts, "Z2": zb})
    others = sorted(FIG3.observed - {"Z2"})
    query = PlanQuery(FIG3, set(others), {"Z2"}, Strategy.atomic({v: 0 for v in others}))
    return model_a, model_b, query
