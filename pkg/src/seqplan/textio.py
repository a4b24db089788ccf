"""Line-oriented text formats for graphs, strategies and models.

Graph files::

    # comment
    observed X1 card=2
    latent U
    edge U X1
    action X1
    outcome Y

Strategy files, one regime per action (a ``{ ... }`` block may span lines)::

    X1 idle
    X2 atomic 0
    X3 conditional Z3 { 0 -> 1 ; 1 -> 0 }
    X4 random Z1 { 0 -> 0.25 0.75 ; 1 -> 0.5 0.5 }
    X5 random { -> 0.3 0.7 }

Model files give one CPT per node, one row per parent configuration::

    cpt U |
    : 0.5 0.5
    cpt X1 | U
    0 : 0.9 0.1
    1 : 0.2 0.8
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .exceptions import GraphError, ParseError, SeqPlanError
from .graph import CausalDiagram
from .oracle import DiscreteModel
from .regimes import Atomic, Conditional, Idle, Random, Strategy

__all__ = [
    "GraphSpec",
    "parse_graph",
    "format_graph",
    "parse_strategy",
    "format_strategy",
    "parse_model",
    "format_model",
]

_NAME = re.compile(r"^[A-Za-z0-9_]+$")


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _int(tok: str, line: int, what: str) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", line) from None
    if v < 0:
        raise ParseError(f"{what} must be nonnegative, got {v}", line)
    return v


def _float(tok: str, line: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a probability, got {tok!r}", line) from None


def _name(tok: str, line: int) -> str:
    if not _NAME.match(tok):
        raise ParseError(f"invalid node name {tok!r}", line)
    return tok


# -- graphs -------------------------------------------------------------------------


@dataclass(frozen=True)
class GraphSpec:
    diagram: CausalDiagram
    actions: frozenset[str]
    outcome: frozenset[str]
    cardinalities: Mapping[str, int] = field(hash=False)


def _card(tokens: list[str], line: int) -> int:
    if not tokens:
        return 2
    if len(tokens) > 1 or not tokens[0].startswith("card="):
        raise ParseError(f"expected 'card=<k>', got {' '.join(tokens)!r}", line)
    k = _int(tokens[0][5:], line, "card")
    if k < 2:
        raise ParseError(f"card must be at least 2, got {k}", line)
    return k


def parse_graph(text: str) -> GraphSpec:
    """Parse a graph file; every error carries the offending line number."""
    declared: dict[str, int] = {}
    observed, latent = [], []
    cards: dict[str, int] = {}
    edges: list[tuple[str, str, int]] = []
    roles = {"action": [], "outcome": []}
    for no, line in _lines(text):
        kw, *rest = line.split()
        if kw in ("observed", "latent"):
            if not rest:
                raise ParseError(f"'{kw}' needs a node name", no)
            n = _name(rest[0], no)
            if n in declared:
                raise ParseError(f"node {n!r} already declared on line {declared[n]}", no)
            declared[n] = no
            cards[n] = _card(rest[1:], no)
            (observed if kw == "observed" else latent).append(n)
        elif kw == "edge":
            if len(rest) != 2:
                raise ParseError("'edge' needs exactly two nodes", no)
            a, b = _name(rest[0], no), _name(rest[1], no)
            if a == b:
                raise ParseError(f"self-loop on {a!r}", no)
            edges.append((a, b, no))
        elif kw in roles:
            if len(rest) != 1:
                raise ParseError(f"'{kw}' needs exactly one node", no)
            roles[kw].append((_name(rest[0], no), no))
        else:
            raise ParseError(f"unknown declaration {kw!r}", no)
    if not declared:
        raise ParseError("no nodes declared")
    for a, b, no in edges:
        for n in (a, b):
            if n not in declared:
                raise ParseError(f"edge refers to undeclared node {n!r}", no)
    for kw, items in roles.items():
        for n, no in items:
            if n not in declared:
                raise ParseError(f"{kw} refers to undeclared node {n!r}", no)
            if n in latent:
                raise ParseError(f"{kw} {n!r} is latent", no)
    try:
        diagram = CausalDiagram(observed, latent, {(a, b) for a, b, _ in edges})
    except GraphError as exc:
        last = edges[-1][2] if edges else None
        cycle = getattr(exc, "cycle", None)
        if cycle:
            pairs = set(zip(cycle, cycle[1:]))
            last = max(no for a, b, no in edges if (a, b) in pairs)
        raise ParseError(str(exc), last) from None
    actions = frozenset(n for n, _ in roles["action"])
    outcome = frozenset(n for n, _ in roles["outcome"])
    both = actions & outcome
    if both:
        raise ParseError(f"{sorted(both)[0]!r} is both action and outcome")
    return GraphSpec(diagram, actions, outcome, cards)


def format_graph(spec: GraphSpec) -> str:
    d = spec.diagram
    out = [f"observed {n} card={spec.cardinalities.get(n, 2)}" for n in sorted(d.observed)]
    for n in sorted(d.latent):
        k = spec.cardinalities.get(n, 2)
        out.append(f"latent {n}" + (f" card={k}" if k != 2 else ""))
    out += [f"edge {a} {b}" for a, b in sorted(d.edges)]
    out += [f"action {n}" for n in sorted(spec.actions)]
    out += [f"outcome {n}" for n in sorted(spec.outcome)]
    return "\n".join(out) + "\n"


# -- strategies -----------------------------------------------------------------------


def _statements(text: str):
    """Yield (line, text) per regime, joining brace blocks across lines."""
    buf, start = [], None
    for no, line in _lines(text):
        if not buf:
            start = no
        buf.append(line)
        joined = " ".join(buf)
        opened, closed = joined.count("{"), joined.count("}")
        if closed > opened or opened > 1 or closed > 1:
            raise ParseError("unbalanced braces", no)
        if opened == closed:
            yield start, joined
            buf = []
    if buf:
        raise ParseError("unterminated '{' block", start)


def _table_rows(body: str, n_cond: int, line: int):
    rows = []
    for entry in body.split(";"):
        entry = entry.strip()
        if not entry:
            continue
        if "->" not in entry:
            raise ParseError(f"table entry {entry!r} lacks '->'", line)
        left, right = entry.split("->", 1)
        cfg = tuple(_int(t, line, "configuration value") for t in left.split())
        if len(cfg) != n_cond:
            raise ParseError(f"configuration {cfg} should list {n_cond} value(s)", line)
        rows.append((cfg, right.split()))
    seen = [cfg for cfg, _ in rows]
    if len(set(seen)) != len(seen):
        raise ParseError("configuration listed twice", line)
    return rows


def parse_strategy(text: str, diagram: CausalDiagram | None = None) -> Strategy:
    """Parse a strategy file. With ``diagram``, every name must be observed in it."""
    regimes = {}
    for no, stmt in _statements(text):
        head, _, tail = stmt.partition("{")
        body = tail.rstrip()
        if tail:
            if not body.endswith("}"):
                raise ParseError("text after '}'", no)
            body = body[:-1]
        toks = head.split()
        if len(toks) < 2:
            raise ParseError("expected '<action> <kind> ...'", no)
        action, kind, args = _name(toks[0], no), toks[1], toks[2:]
        if action in regimes:
            raise ParseError(f"second regime for {action!r}", no)
        names = [action] + (args if kind in ("conditional", "random") else [])
        if diagram is not None:
            for n in names:
                n = _name(n, no)
                if n not in diagram.observed:
                    where = "latent" if n in diagram.latent else "not in the graph"
                    raise ParseError(f"{n!r} is {where}", no)
        try:
            if kind == "idle":
                if args or tail:
                    raise ParseError("'idle' takes no arguments", no)
                regimes[action] = Idle()
            elif kind == "atomic":
                if len(args) != 1 or tail:
                    raise ParseError("'atomic' takes exactly one value", no)
                regimes[action] = Atomic(_int(args[0], no, "atomic value"))
            elif kind in ("conditional", "random"):
                if not tail:
                    raise ParseError(f"'{kind}' needs a '{{ cfg -> ... }}' table", no)
                cond = tuple(_name(a, no) for a in args)
                rows = _table_rows(body, len(cond), no)
                if kind == "conditional":
                    table = {}
                    for cfg, vals in rows:
                        if len(vals) != 1:
                            raise ParseError(f"conditional entry for {cfg} needs one value", no)
                        table[cfg] = _int(vals[0], no, "conditional value")
                    regimes[action] = Conditional(cond, table)
                else:
                    regimes[action] = Random(cond, {cfg: tuple(_float(v, no) for v in vals) for cfg, vals in rows})
            else:
                raise ParseError(f"unknown regime kind {kind!r}", no)
        except ParseError:
            raise
        except SeqPlanError as exc:
            raise ParseError(str(exc), no) from None
    try:
        return Strategy(regimes)
    except SeqPlanError as exc:
        raise ParseError(str(exc)) from None


def _num(x: float) -> str:
    return repr(float(x))


def format_strategy(strategy: Strategy) -> str:
    out = []
    for a, r in strategy.items():
        if isinstance(r, Idle):
            out.append(f"{a} idle")
        elif isinstance(r, Atomic):
            out.append(f"{a} atomic {r.value}")
        else:
            kind = "conditional" if isinstance(r, Conditional) else "random"
            rows = []
            for cfg in sorted(r.table):
                v = r.table[cfg]
                vals = str(v) if isinstance(r, Conditional) else " ".join(_num(p) for p in v)
                rows.append(f"{' '.join(map(str, cfg))} -> {vals}".strip())
            head = " ".join([a, kind, *r.cond])
            out.append(f"{head} {{ {' ; '.join(rows)} }}")
    return "\n".join(out) + "\n"


# -- models -------------------------------------------------------------------------


def parse_model(text: str, diagram: CausalDiagram, cardinalities: Mapping[str, int]) -> DiscreteModel:
    """Parse CPT blocks; parents may be listed in any order."""
    blocks: dict[str, tuple[list[str], dict, int]] = {}
    current = None
    for no, line in _lines(text):
        if line.startswith("cpt ") or line == "cpt":
            head, _, tail = line[3:].partition("|")
            toks = head.split()
            if len(toks) != 1:
                raise ParseError("expected 'cpt <node> | <parents...>'", no)
            node = _name(toks[0], no)
            if node not in diagram.nodes:
                raise ParseError(f"unknown node {node!r}", no)
            if node in blocks:
                raise ParseError(f"second CPT for {node!r}", no)
            parents = [_name(t, no) for t in tail.split()]
            if set(parents) != set(diagram.parents(node)) or len(parents) != len(set(parents)):
                raise ParseError(f"parents of {node} are {sorted(diagram.parents(node))}, got {parents}", no)
            current = node
            blocks[node] = (parents, {}, no)
            continue
        if current is None:
            raise ParseError("row before any 'cpt' header", no)
        left, sep, right = line.partition(":")
        if not sep:
            raise ParseError("row lacks ':'", no)
        parents, rows, _ = blocks[current]
        cfg = tuple(_int(t, no, "configuration value") for t in left.split())
        if len(cfg) != len(parents):
            raise ParseError(f"configuration {cfg} should list {len(parents)} value(s)", no)
        if cfg in rows:
            raise ParseError(f"configuration {cfg} listed twice", no)
        rows[cfg] = [_float(t, no) for t in right.split()]
    cpts = {}
    for node in sorted(diagram.nodes):
        if node not in blocks:
            raise ParseError(f"no CPT for {node!r}")
        parents, rows, no = blocks[node]
        k = cardinalities[node]
        shape = [cardinalities[p] for p in parents]
        table = np.zeros(shape + [k])
        for cfg in itertools.product(*(range(s) for s in shape)):
            if cfg not in rows:
                raise ParseError(f"CPT of {node} has no row for {cfg}", no)
            if len(rows[cfg]) != k:
                raise ParseError(f"CPT row {cfg} of {node} has {len(rows[cfg])} entries, expected {k}", no)
            table[cfg] = rows[cfg]
        extra = [cfg for cfg in rows if any(v >= s for v, s in zip(cfg, shape))]
        if extra:
            raise ParseError(f"CPT of {node} has out-of-range row {extra[0]}", no)
        order = sorted(range(len(parents)), key=lambda i: parents[i])
        cpts[node] = np.transpose(table, order + [len(parents)])
    try:
        return DiscreteModel(diagram, dict(cardinalities), cpts)
    except SeqPlanError as exc:
        raise ParseError(str(exc)) from None


def format_model(model: DiscreteModel) -> str:
    out = []
    for node in sorted(model.diagram.nodes):
        parents = model.parents(node)
        out.append(f"cpt {node} | {' '.join(parents)}".rstrip())
        t = model.cpts[node]
        for cfg in itertools.product(*(range(s) for s in t.shape[:-1])):
            out.append(f"{' '.join(map(str, cfg))} : {' '.join(_num(p) for p in t[cfg])}".strip())
    return "\n".join(out) + "\n"
