"""Symbolic estimands over the observational distribution.

An estimand is an immutable expression tree. Leaves are observational
probabilities (:class:`ObsProb`), strategy factors (:class:`StrategyFactor`),
indicators (:class:`Indicator`) and :class:`One`; inner nodes are
:class:`Sum`, :class:`Product` and :class:`Quotient`.

Value terms name the value a variable takes:

* ``Sym(var, prime)``: a symbol for ``var``; free unless an enclosing
  :class:`Sum` binds it. Primes distinguish several bound copies of one variable.
* ``Fixed(var)``: the value fixed by an atomic regime on ``var``.
* ``Fn(var, args)``: ``g_var(args)``, the value chosen by a conditional
  regime on ``var``.

Probability entries pair a variable with a term, ``("X1", Sym("X1"))``, so a
rewrite can put any value in a slot without changing the slot's variable. A
bare term is shorthand for an entry of its own variable.

Rendering grammar (ASCII, byte-stable)::

    estimand := "1" | prob | factor | indicator | sum | product | quotient
    prob     := "P(" entries [ "|" entries ] ")"
    factor   := "S[" entry [ "|" args ] "]"
    indicator:= "delta(" arg "," arg ")"
    sum      := "sum_{" args "} " estimand
    product  := item { " " item }      item := leaf | "[" sum | product | quotient "]"
    quotient := item " / " item
    entry    := arg | name ":=" arg    (the second form when the value is not the slot's own symbol)
    arg      := name { "'" } | gname "(" args ")"
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

from .exceptions import EstimandError, MissingAssignment, UnknownVariable
from .regimes import Atomic, Conditional, regime_factor

__all__ = [
    "Sym",
    "Fixed",
    "Fn",
    "Term",
    "Estimand",
    "One",
    "ObsProb",
    "StrategyFactor",
    "Indicator",
    "Sum",
    "Product",
    "Quotient",
    "P",
    "make_sum",
    "make_product",
    "free_symbols",
    "substitute",
    "simplify",
    "canonical",
    "render",
    "evaluate",
    "to_json",
    "from_json",
]


# -- value terms ----------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Sym:
    var: str
    prime: int = 0

    def __repr__(self):
        return f"Sym({self.var!r}{', ' + str(self.prime) if self.prime else ''})"


@dataclass(frozen=True)
class Fixed:
    var: str


@dataclass(frozen=True)
class Fn:
    var: str
    args: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(_as_term(a) for a in self.args))


Term = Union[Sym, Fixed, Fn]


def _as_term(t) -> Term:
    if isinstance(t, str):
        return Sym(t)
    if isinstance(t, (Sym, Fixed, Fn)):
        return t
    raise TypeError(f"not a value term: {t!r}")


def term_syms(t: Term) -> frozenset[Sym]:
    if isinstance(t, Sym):
        return frozenset((t,))
    if isinstance(t, Fn):
        return frozenset().union(*(term_syms(a) for a in t.args))
    return frozenset()


def _subst_term(t: Term, mapping: Mapping[Sym, Term]) -> Term:
    if isinstance(t, Sym):
        return mapping.get(t, t)
    if isinstance(t, Fn):
        return Fn(t.var, tuple(_subst_term(a, mapping) for a in t.args))
    return t


# -- rendering helpers --------------------------------------------------------------


_INDEXED = re.compile(r"^[Xx](\d+)$")


def _name(var: str) -> str:
    return var.lower()


def _gname(var: str) -> str:
    m = _INDEXED.match(var)
    return "g" + m.group(1) if m else "g_" + var.lower()


def _arg_text(t: Term) -> str:
    if isinstance(t, Sym):
        return _name(t.var) + "'" * t.prime
    if isinstance(t, Fixed):
        return _name(t.var)
    return f"{_gname(t.var)}({','.join(_arg_text(a) for a in t.args)})"


def _entry_text(entry) -> str:
    var, t = entry
    if isinstance(t, (Sym, Fixed)) and t.var == var:
        return _arg_text(t)
    return f"{_name(var)}:={_arg_text(t)}"


def _as_entry(x) -> tuple[str, Term]:
    """``(variable, value-term)``; a bare term stands for its own variable."""
    if isinstance(x, tuple) and len(x) == 2 and isinstance(x[0], str):
        return (x[0], _as_term(x[1]))
    t = _as_term(x)
    return (t.var, t)


def _entry_syms(entries) -> frozenset[Sym]:
    return frozenset().union(*(term_syms(t) for _, t in entries))


# -- tree nodes -------------------------------------------------------------------


class Estimand:
    """Base class of estimand nodes."""

    @cached_property
    def free(self) -> frozenset[Sym]:
        return self._free()

    @cached_property
    def free_sorted(self) -> tuple[Sym, ...]:
        return tuple(sorted(self.free))

    @cached_property
    def text(self) -> str:
        return self._text()

    def __str__(self):
        return self.text

    def _free(self) -> frozenset[Sym]:
        raise NotImplementedError

    def _text(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True, eq=True)
class One(Estimand):
    def _free(self):
        return frozenset()

    def _text(self):
        return "1"


@dataclass(frozen=True)
class ObsProb(Estimand):
    """P(targets | given) of the observational distribution.

    Entries are ``(variable, value-term)`` pairs; a bare term is accepted and
    taken as an entry for its own variable.
    """

    targets: tuple
    given: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(_as_entry(t) for t in self.targets))
        object.__setattr__(self, "given", tuple(_as_entry(t) for t in self.given))

    def _free(self):
        return _entry_syms(self.targets + self.given)

    def _text(self):
        s = ",".join(_entry_text(t) for t in self.targets)
        if self.given:
            s += "|" + ",".join(_entry_text(t) for t in self.given)
        return f"P({s})"


@dataclass(frozen=True)
class StrategyFactor(Estimand):
    """P(x | c; sigma_X) of a random regime; ``cond`` follows the regime's order."""

    action: str
    value: Term
    cond: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "value", _as_term(self.value))
        object.__setattr__(self, "cond", tuple(_as_term(t) for t in self.cond))

    def _free(self):
        return frozenset().union(term_syms(self.value), *(term_syms(t) for t in self.cond))

    def _text(self):
        s = _entry_text((self.action, self.value))
        if self.cond:
            s += "|" + ",".join(_arg_text(t) for t in self.cond)
        return f"S[{s}]"


@dataclass(frozen=True)
class Indicator(Estimand):
    left: Term
    right: Term

    def __post_init__(self):
        object.__setattr__(self, "left", _as_term(self.left))
        object.__setattr__(self, "right", _as_term(self.right))

    def _free(self):
        return term_syms(self.left) | term_syms(self.right)

    def _text(self):
        return f"delta({_arg_text(self.left)},{_arg_text(self.right)})"


@dataclass(frozen=True)
class Sum(Estimand):
    bound: tuple
    body: Estimand

    def __post_init__(self):
        object.__setattr__(self, "bound", tuple(_as_term(s) for s in self.bound))
        for s in self.bound:
            if not isinstance(s, Sym):
                raise EstimandError(f"a sum can only bind symbols, got {s!r}")
        if len(set(self.bound)) != len(self.bound):
            raise EstimandError(f"symbol bound twice in {self.bound}")

    def _free(self):
        return self.body.free - frozenset(self.bound)

    def _text(self):
        names = ",".join(_arg_text(s) for s in self.bound)
        return f"sum_{{{names}}} {self.body.text}"


@dataclass(frozen=True)
class Product(Estimand):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def _free(self):
        return frozenset().union(*(f.free for f in self.factors))

    def _text(self):
        if not self.factors:
            return "1"
        return " ".join(_item_text(f) for f in self.factors)


@dataclass(frozen=True)
class Quotient(Estimand):
    numerator: Estimand
    denominator: Estimand

    def _free(self):
        return self.numerator.free | self.denominator.free

    def _text(self):
        return f"{_side_text(self.numerator)} / {_side_text(self.denominator)}"


def _item_text(e: Estimand) -> str:
    if isinstance(e, (Sum, Quotient, Product)):
        return f"[{e.text}]"
    return e.text


def _side_text(e: Estimand) -> str:
    if isinstance(e, (Sum, Quotient, Product)):
        return f"[{e.text}]"
    return e.text


def P(targets, given=()) -> ObsProb:
    """Shorthand: ``P(["Y"], ["X"])`` is P(y|x)."""
    if isinstance(targets, (str, Sym, Fixed, Fn)):
        targets = [targets]
    if isinstance(given, (str, Sym, Fixed, Fn)):
        given = [given]
    return ObsProb(tuple(targets), tuple(given))


# -- structural helpers ------------------------------------------------------------


def _factors(e: Estimand) -> tuple:
    if isinstance(e, Product):
        return e.factors
    if isinstance(e, One):
        return ()
    return (e,)


def make_product(factors: Iterable[Estimand]) -> Estimand:
    """Flattened product without ``One`` factors."""
    flat = []
    for f in factors:
        flat.extend(_factors(f))
    if not flat:
        return One()
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def all_syms(e: Estimand) -> set[Sym]:
    """Every symbol in ``e``, bound or free."""
    if isinstance(e, Sum):
        return set(e.bound) | all_syms(e.body)
    if isinstance(e, Product):
        return set().union(*(all_syms(f) for f in e.factors))
    if isinstance(e, Quotient):
        return all_syms(e.numerator) | all_syms(e.denominator)
    return set(e.free)


def _binders(e: Estimand) -> set[Sym]:
    if isinstance(e, Sum):
        return set(e.bound) | _binders(e.body)
    if isinstance(e, Product):
        return set().union(*(_binders(f) for f in e.factors))
    if isinstance(e, Quotient):
        return _binders(e.numerator) | _binders(e.denominator)
    return set()


def _fresh(var: str, avoid: set[Sym]) -> Sym:
    k = 1
    while Sym(var, k) in avoid:
        k += 1
    return Sym(var, k)


def _rename_binders(e: Estimand, clash: frozenset[Sym], avoid: set[Sym]) -> Estimand:
    """Alpha-rename every binder of ``e`` that is in ``clash``."""
    if isinstance(e, Sum):
        mapping = {}
        bound = []
        for s in e.bound:
            if s in clash:
                ns = _fresh(s.var, avoid)
                avoid.add(ns)
                mapping[s] = ns
                bound.append(ns)
            else:
                bound.append(s)
        body = substitute(e.body, mapping) if mapping else e.body
        return Sum(tuple(bound), _rename_binders(body, clash, avoid))
    if isinstance(e, Product):
        return Product(tuple(_rename_binders(f, clash, avoid) for f in e.factors))
    if isinstance(e, Quotient):
        return Quotient(_rename_binders(e.numerator, clash, avoid),
                        _rename_binders(e.denominator, clash, avoid))
    return e


def make_sum(bound: Iterable, body: Estimand) -> Estimand:
    """``Sum`` over ``bound`` that never shadows an inner binder.

    Inner sums binding one of the new symbols are alpha-renamed. An empty
    ``bound`` returns ``body`` unchanged.
    """
    syms = sorted({_as_term(b) for b in bound})
    if not syms:
        return body
    clash = frozenset(syms)
    if clash & _binders(body):
        body = _rename_binders(body, clash, all_syms(body) | clash)
    return Sum(tuple(syms), body)


def free_symbols(e: Estimand) -> frozenset[str]:
    """Variables whose symbols occur free in ``e``."""
    return frozenset(s.var for s in e.free)


def substitute(e: Estimand, mapping: Mapping[Sym, Term]) -> Estimand:
    """Capture-avoiding substitution of free symbols."""
    mapping = {k: v for k, v in mapping.items() if k in e.free}
    if not mapping:
        return e
    if isinstance(e, ObsProb):
        return ObsProb(tuple((v, _subst_term(t, mapping)) for v, t in e.targets),
                       tuple((v, _subst_term(t, mapping)) for v, t in e.given))
    if isinstance(e, StrategyFactor):
        return StrategyFactor(e.action, _subst_term(e.value, mapping),
                              tuple(_subst_term(t, mapping) for t in e.cond))
    if isinstance(e, Indicator):
        return Indicator(_subst_term(e.left, mapping), _subst_term(e.right, mapping))
    if isinstance(e, Product):
        return Product(tuple(substitute(f, mapping) for f in e.factors))
    if isinstance(e, Quotient):
        return Quotient(substitute(e.numerator, mapping), substitute(e.denominator, mapping))
    if isinstance(e, Sum):
        incoming = frozenset().union(*(term_syms(t) for t in mapping.values()))
        captured = incoming & frozenset(e.bound)
        if captured:
            avoid = all_syms(e) | set(incoming) | set(mapping)
            e = _rename_binders(e, captured, avoid)
            # only the top binder matters here; inner ones were renamed too
        return Sum(e.bound, substitute(e.body, mapping))
    return e


# -- rewrite system ------------------------------------------------------------------


def _positive(e: Estimand) -> bool:
    """Strictly positive whenever the observational table is."""
    if isinstance(e, (ObsProb, One)):
        return True
    if isinstance(e, Product):
        return all(_positive(f) for f in e.factors)
    if isinstance(e, Sum):
        return _positive(e.body)
    if isinstance(e, Quotient):
        return _positive(e.numerator) and _positive(e.denominator)
    return False


def _summed_out(f: Estimand, s: Sym) -> Estimand | None:
    """Result of summing the single factor ``f`` over ``s``, if it normalizes."""
    if isinstance(f, ObsProb):
        hits = [e for e in f.targets if e[1] == s and e[0] == s.var]
        if len(hits) != 1:
            return None
        others = [e for e in f.targets if e[1] != s]
        if s in _entry_syms(others + list(f.given)):
            return None
        if not others:
            return One()
        return ObsProb(tuple(others), f.given)
    if isinstance(f, StrategyFactor):
        cond_syms = frozenset().union(*(term_syms(t) for t in f.cond))
        if f.value == s and f.action == s.var and s not in cond_syms:
            return One()
    return None


def _rewrite_sum(bound: list, body: Estimand) -> Estimand:
    bound = list(bound)
    while True:
        if not bound:
            return body
        if isinstance(body, Sum):
            inner = body
            if frozenset(inner.bound) & frozenset(bound):
                inner = _rename_binders(inner, frozenset(bound), all_syms(inner) | set(bound))
            bound += list(inner.bound)
            body = inner.body
            continue
        fs = list(_factors(body))
        changed = False
        # (1) delta-collapse
        for s in list(bound):
            for i, f in enumerate(fs):
                if not isinstance(f, Indicator):
                    continue
                # only same-variable terms are guaranteed to lie in s's range
                if f.left == s and f.right.var == s.var and s not in term_syms(f.right):
                    target = f.right
                elif f.right == s and f.left.var == s.var and s not in term_syms(f.left):
                    target = f.left
                else:
                    continue
                bound.remove(s)
                body = substitute(make_product(fs[:i] + fs[i + 1:]), {s: target})
                changed = True
                break
            if changed:
                break
        if changed:
            continue
        # (2) normalization
        for s in list(bound):
            hits = [i for i, f in enumerate(fs) if s in f.free]
            if len(hits) != 1:
                continue
            reduced = _summed_out(fs[hits[0]], s)
            if reduced is None:
                continue
            fs[hits[0]] = reduced
            bound.remove(s)
            body = make_product(fs)
            changed = True
            break
        if changed:
            continue
        # (5) scope minimization
        bset = frozenset(bound)
        inside = [f for f in fs if f.free & bset]
        outside = [f for f in fs if not f.free & bset]
        if inside and outside:
            return make_product(outside + [Sum(tuple(bound), make_product(inside))])
        return Sum(tuple(bound), body)


def _rewrite_quotient(num: Estimand, den: Estimand) -> Estimand:
    while True:
        if isinstance(den, One):
            return num
        if isinstance(num, Quotient):
            num, den = num.numerator, make_product([num.denominator, den])
            continue
        if isinstance(den, Quotient):
            num, den = make_product([num, den.denominator]), den.numerator
            continue
        break
    nums = list(_factors(num))
    dens = []
    for d in _factors(den):
        if _positive(d) and d in nums:
            nums.remove(d)
        else:
            dens.append(d)
    num = make_product(nums)
    if not dens:
        return num
    return Quotient(num, make_product(dens))


def _rewrite_product(factors: list) -> Estimand:
    flat = list(_factors(make_product(factors)))
    if any(isinstance(f, Quotient) for f in flat):
        nums, dens = [], []
        for f in flat:
            if isinstance(f, Quotient):
                nums.extend(_factors(f.numerator))
                dens.extend(_factors(f.denominator))
            else:
                nums.append(f)
        return _rewrite_quotient(make_product(nums), make_product(dens))
    return make_product(flat)


def _rewrite(e: Estimand) -> Estimand:
    if isinstance(e, Sum):
        return _rewrite_sum(list(e.bound), _rewrite(e.body))
    if isinstance(e, Product):
        return _rewrite_product([_rewrite(f) for f in e.factors])
    if isinstance(e, Quotient):
        return _rewrite_quotient(_rewrite(e.numerator), _rewrite(e.denominator))
    if isinstance(e, ObsProb) and not e.targets:
        return One()
    return e


def _rename_canonical(e: Estimand, mapping: dict, scope: set) -> Estimand:
    if isinstance(e, Sum):
        mapping = dict(mapping)
        scope = set(scope)
        bound = []
        for s in sorted(e.bound):
            k = 0
            while Sym(s.var, k) in scope:
                k += 1
            ns = Sym(s.var, k)
            scope.add(ns)
            mapping[s] = ns
            bound.append(ns)
        return Sum(tuple(bound), _rename_canonical(e.body, mapping, scope))
    if isinstance(e, Product):
        return Product(tuple(_rename_canonical(f, mapping, scope) for f in e.factors))
    if isinstance(e, Quotient):
        return Quotient(_rename_canonical(e.numerator, mapping, scope),
                        _rename_canonical(e.denominator, mapping, scope))
    live = {k: v for k, v in mapping.items() if k in e.free and k != v}
    return substitute(e, live) if live else e


def _entry_key(entry):
    return (entry[0], _entry_text(entry))


def _sorted(e: Estimand) -> Estimand:
    if isinstance(e, ObsProb):
        return ObsProb(tuple(sorted(e.targets, key=_entry_key)),
                       tuple(sorted(e.given, key=_entry_key)))
    if isinstance(e, Indicator):
        left, right = sorted((e.left, e.right), key=_arg_text)
        return Indicator(left, right)
    if isinstance(e, Product):
        return Product(tuple(sorted((_sorted(f) for f in e.factors), key=lambda f: f.text)))
    if isinstance(e, Sum):
        return Sum(tuple(sorted(e.bound)), _sorted(e.body))
    if isinstance(e, Quotient):
        return Quotient(_sorted(e.numerator), _sorted(e.denominator))
    return e


def canonical(e: Estimand) -> Estimand:
    """Rename bound symbols by first use and sort factors, entries and binders."""
    return _sorted(_rename_canonical(e, {}, set(e.free)))


_MAX_PASSES = 200


def simplify(e: Estimand) -> Estimand:
    """Rewrite to a fixpoint and return the canonical form.

    Each pass applies, bottom-up: delta-collapse, normalization of summed
    probabilities, flattening, quotient cancellation of strictly positive
    factors, and scope minimization.
    """
    cur = canonical(e)
    for _ in range(_MAX_PASSES):
        nxt = canonical(_rewrite(cur))
        if nxt == cur:
            return cur
        cur = nxt
    raise EstimandError("simplify did not reach a fixpoint")  # pragma: no cover


def render(e: Estimand) -> str:
    return e.text


# -- evaluation ----------------------------------------------------------------------


class _Evaluator:
    def __init__(self, table, strategy):
        self.table = table
        self.strategy = strategy
        self.memo: dict = {}

    def term(self, t: Term, env: Mapping[Sym, int]) -> int:
        if isinstance(t, Sym):
            return env[t]
        regime = self._regime(t.var)
        if isinstance(t, Fixed):
            if not isinstance(regime, Atomic):
                raise EstimandError(f"{t.var}: Fixed term needs an atomic regime")
            return regime.value
        if not isinstance(regime, Conditional):
            raise EstimandError(f"{t.var}: g-term needs a conditional regime")
        return regime.table[tuple(self.term(a, env) for a in t.args)]

    def _regime(self, var):
        if self.strategy is None or var not in self.strategy:
            raise UnknownVariable(f"no regime for {var!r} in the strategy")
        return self.strategy[var]

    def value(self, e: Estimand, env: Mapping[Sym, int]) -> float:
        key = (id(e), tuple(env[s] for s in e.free_sorted))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        v = self._value(e, env)
        self.memo[key] = v
        return v

    def _value(self, e: Estimand, env) -> float:
        if isinstance(e, One):
            return 1.0
        if isinstance(e, ObsProb):
            targets, given = {}, {}
            for side, entries in ((targets, e.targets), (given, e.given)):
                for var, t in entries:
                    val = self.term(t, env)
                    if side.get(var, val) != val:
                        return 0.0
                    side[var] = val
            return self.table.conditional(targets, given)
        if isinstance(e, StrategyFactor):
            regime = self._regime(e.action)
            cond = dict(zip(regime.cond, (self.term(t, env) for t in e.cond)))
            return regime_factor(regime, self.term(e.value, env), cond)
        if isinstance(e, Indicator):
            return 1.0 if self.term(e.left, env) == self.term(e.right, env) else 0.0
        if isinstance(e, Product):
            acc = 1.0
            for f in e.factors:
                acc *= self.value(f, env)
                if acc == 0.0:
                    break
            return acc
        if isinstance(e, Quotient):
            den = self.value(e.denominator, env)
            if den == 0.0:
                return 0.0
            return self.value(e.numerator, env) / den
        if isinstance(e, Sum):
            ranges = [range(self.table.cardinality(s.var)) for s in e.bound]
            total = 0.0
            inner = dict(env)
            for combo in itertools.product(*ranges):
                inner.update(zip(e.bound, combo))
                total += self.value(e.body, inner)
            return total
        raise TypeError(f"not an estimand: {e!r}")


def _mentioned_vars(e: Estimand) -> set[str]:
    if isinstance(e, Sum):
        return {s.var for s in e.bound} | _mentioned_vars(e.body)
    if isinstance(e, Product):
        return set().union(*(_mentioned_vars(f) for f in e.factors))
    if isinstance(e, Quotient):
        return _mentioned_vars(e.numerator) | _mentioned_vars(e.denominator)
    if isinstance(e, ObsProb):
        return {v for v, _ in e.targets + e.given}
    return set()


def evaluate(e: Estimand, observational, strategy=None, assignment: Mapping[str, int] = None) -> float:
    """Exact value of ``e`` on a joint table.

    ``observational`` is a :class:`~seqplan.oracle.JointTable`; ``assignment``
    gives a value to every free symbol of ``e``.
    """
    assignment = dict(assignment or {})
    env = {}
    for s in e.free_sorted:
        if s.prime or s.var not in assignment:
            raise MissingAssignment(f"no value assigned to free symbol {_arg_text(s)!r}")
        env[s] = int(assignment[s.var])
    known = set(observational.variables)
    unknown = sorted(_mentioned_vars(e) - known)
    if unknown:
        raise UnknownVariable(f"variable {unknown[0]!r} is not in the observational table")
    return _Evaluator(observational, strategy).value(e, env)


# -- serialization -------------------------------------------------------------------


def _term_json(t: Term):
    if isinstance(t, Sym):
        return {"sym": t.var, "prime": t.prime} if t.prime else {"sym": t.var}
    if isinstance(t, Fixed):
        return {"fixed": t.var}
    return {"fn": t.var, "args": [_term_json(a) for a in t.args]}


def _term_from(d) -> Term:
    if "sym" in d:
        return Sym(d["sym"], d.get("prime", 0))
    if "fixed" in d:
        return Fixed(d["fixed"])
    if "fn" in d:
        return Fn(d["fn"], tuple(_term_from(a) for a in d.get("args", [])))
    raise EstimandError(f"malformed value term: {d!r}")


def _entry_json(entry):
    return {"var": entry[0], "term": _term_json(entry[1])}


def _entry_from(d):
    return (d["var"], _term_from(d["term"]))


def to_json(e: Estimand) -> dict:
    """Plain-data form of ``e`` suitable for :func:`json.dumps`."""
    if isinstance(e, One):
        return {"kind": "one"}
    if isinstance(e, ObsProb):
        return {"kind": "prob", "targets": [_entry_json(t) for t in e.targets],
                "given": [_entry_json(t) for t in e.given]}
    if isinstance(e, StrategyFactor):
        return {"kind": "strategy", "action": e.action, "value": _term_json(e.value),
                "cond": [_term_json(t) for t in e.cond]}
    if isinstance(e, Indicator):
        return {"kind": "indicator", "left": _term_json(e.left), "right": _term_json(e.right)}
    if isinstance(e, Sum):
        return {"kind": "sum", "bound": [_term_json(s) for s in e.bound], "body": to_json(e.body)}
    if isinstance(e, Product):
        return {"kind": "product", "factors": [to_json(f) for f in e.factors]}
    if isinstance(e, Quotient):
        return {"kind": "quotient", "numerator": to_json(e.numerator),
                "denominator": to_json(e.denominator)}
    raise TypeError(f"not an estimand: {e!r}")


def from_json(d: dict) -> Estimand:
    try:
        kind = d["kind"]
        if kind == "one":
            return One()
        if kind == "prob":
            return ObsProb(tuple(_entry_from(t) for t in d["targets"]),
                           tuple(_entry_from(t) for t in d.get("given", [])))
        if kind == "strategy":
            return StrategyFactor(d["action"], _term_from(d["value"]),
                                  tuple(_term_from(t) for t in d.get("cond", [])))
        if kind == "indicator":
            return Indicator(_term_from(d["left"]), _term_from(d["right"]))
        if kind == "sum":
            return Sum(tuple(_term_from(s) for s in d["bound"]), from_json(d["body"]))
        if kind == "product":
            return Product(tuple(from_json(f) for f in d["factors"]))
        if kind == "quotient":
            return Quotient(from_json(d["numerator"]), from_json(d["denominator"]))
    except (KeyError, TypeError) as exc:
        raise EstimandError(f"malformed estimand document: {exc}") from None
    raise EstimandError(f"unknown estimand kind {kind!r}")
