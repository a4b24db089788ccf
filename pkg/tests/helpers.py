"""Random estimand trees and joint tables shared by the tests."""

from __future__ import annotations

import numpy as np

from seqplan.estimand import (
    Fixed,
    Fn,
    Indicator,
    ObsProb,
    One,
    Product,
    Quotient,
    StrategyFactor,
    Sum,
    Sym,
    substitute,
)
from seqplan.oracle import JointTable
from seqplan.regimes import Atomic, Conditional, Random, Strategy

VARS = ("A", "B", "C", "D", "E")
# E plays an atomic action: it only ever appears as a fixed value
SYMBOLIC = ("A", "B", "C", "D")
CARDS = {"A": 2, "B": 3, "C": 2, "D": 2, "E": 2}


def random_table(rng: np.random.Generator, floor: float = 0.2) -> JointTable:
    """Strictly positive joint table over ``VARS``."""
    shape = tuple(CARDS[v] for v in VARS)
    p = rng.uniform(floor, 1.0, size=shape)
    return JointTable(VARS, p / p.sum())


def random_tree_strategy(rng: np.random.Generator) -> Strategy:
    """C reacts to A, D is drawn given B, E is fixed."""
    g = {(a,): int(rng.integers(0, 2)) for a in range(2)}
    rows = {(b,): tuple(rng.dirichlet(np.ones(2))) for b in range(3)}
    return Strategy({
        "C": Conditional(("A",), g),
        "D": Random(("B",), rows),
        "E": Atomic(int(rng.integers(0, 2))),
    })


class TreeGen:
    """Random well-formed trees biased toward the patterns simplify rewrites."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def pick(self, seq):
        return seq[int(self.rng.integers(0, len(seq)))]

    def term(self, var: str, scope: list) -> object:
        r = self.rng.random()
        if var == "E":
            return Fixed("E")
        if var == "C" and r < 0.3:
            return Fn("C", (self.term("A", scope),))
        bound = [s for s in scope if s.var == var]
        if bound and r < 0.75:
            return self.pick(bound)
        return Sym(var)

    def prob(self, scope: list, prefer=None) -> ObsProb:
        n_t = int(self.rng.integers(1, 3))
        n_g = int(self.rng.integers(0, 3))
        vs = [str(v) for v in self.rng.permutation(VARS)]
        if prefer is not None:
            vs.remove(prefer.var)
            vs.insert(0, prefer.var)
        targets = []
        for v in vs[:n_t]:
            targets.append(prefer if prefer is not None and v == prefer.var else self.term(v, scope))
        given = [self.term(v, scope) for v in vs[n_t:n_t + n_g]]
        return ObsProb(tuple(targets), tuple(given))

    def leaf(self, scope: list):
        r = self.rng.random()
        if r < 0.55:
            return self.prob(scope)
        if r < 0.7:
            a, b = self.pick(VARS), self.pick(VARS)
            return Indicator(self.term(a, scope), self.term(b, scope))
        if r < 0.85:
            return StrategyFactor("D", self.term("D", scope), (self.term("B", scope),))
        if r < 0.92:
            return One()
        return self.prob(scope)

    def fresh(self, var: str, scope: list) -> Sym:
        k = 0
        while Sym(var, k) in scope:
            k += 1
        return Sym(var, k)

    def normalizer(self, s: Sym, scope: list):
        """A factor that sums to at most 1 over ``s``."""
        r = self.rng.random()
        if r < 0.6:
            return self.prob(scope, prefer=s)
        if r < 0.8 or s.var != "D":
            return Indicator(s, self.term(s.var, [t for t in scope if t != s]))
        return StrategyFactor("D", s, (self.term("B", scope),))

    def node(self, depth: int, scope: list):
        """Trees whose values stay within [0, 1] on any table."""
        if depth <= 1 or self.rng.random() < 0.2:
            return self.leaf(scope)
        r = self.rng.random()
        if r < 0.4:
            names = [str(v) for v in self.rng.choice(SYMBOLIC, size=int(self.rng.integers(1, 3)), replace=False)]
            new = [self.fresh(v, scope) for v in names]
            inner = scope + new
            parts = [self.node(depth - 1, inner) for _ in range(int(self.rng.integers(0, 3)))]
            parts += [self.normalizer(s, inner) for s in new]
            order = self.rng.permutation(len(parts))
            body = Product(tuple(parts[i] for i in order)) if len(parts) > 1 else parts[0]
            return Sum(tuple(new), body)
        if r < 0.7:
            n = int(self.rng.integers(2, 4))
            return Product(tuple(self.node(depth - 1, scope) for _ in range(n)))
        if r < 0.85:
            # x * shared / shared
            x = self.node(depth - 1, scope)
            shared = self.prob(scope)
            return Quotient(Product((shared, x)), shared)
        # partial sums of one body: sum_s B / sum_{s,t} B
        s_var, t_var = (str(v) for v in self.rng.choice(SYMBOLIC, size=2, replace=False))
        s = self.fresh(s_var, scope)
        t = Sym(t_var)
        body = self.node(depth - 1, scope + [s])
        num = Sum((s,), body)
        if t in body.free:
            t2 = self.fresh(t_var, scope + [s])
            den = Sum((s, t2), substitute(body, {t: t2}))
        else:
            den = Sum((s,), body)
        return Quotient(num, den)


def random_tree(rng: np.random.Generator, depth: int = 6):
    return TreeGen(rng).node(depth, [])


def random_assignment(rng: np.random.Generator, e) -> dict:
    return {s.var: int(rng.integers(0, CARDS[s.var])) for s in e.free}
