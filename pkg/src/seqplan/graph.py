"""Causal diagrams with latent variables and the graph primitives used by the
identification engine.

A :class:`CausalDiagram` is a DAG over observed and latent nodes. Identification
works on its semi-Markovian :class:`ProjectedDiagram`, where every latent
common cause is replaced by a bidirected edge between observed nodes.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

from .exceptions import (
    CycleDetected,
    DuplicateNode,
    InvalidName,
    SelfLoop,
    UnknownNode,
)

__all__ = [
    "CausalDiagram",
    "ProjectedDiagram",
    "validate",
    "ancestors",
    "topological_order",
    "project_latents",
    "c_components",
    "induced_subgraph",
    "has_latent_chains",
]

_NAME_RE = re.compile(r"^[A-Za-z0-9_]+$")


def _frozen_nodes(nodes: Iterable[str]) -> frozenset[str]:
    if isinstance(nodes, str):
        nodes = [nodes]
    seen: set[str] = set()
    for n in nodes:
        if not isinstance(n, str) or not _NAME_RE.match(n):
            raise InvalidName(n)
        if n in seen:
            raise DuplicateNode(n)
        seen.add(n)
    return frozenset(seen)


def _find_cycle(nodes: Iterable[str], parents: dict[str, set[str]]) -> list[str] | None:
    """Return one directed cycle (first node repeated at the end), or None."""
    state: dict[str, int] = {}  # 1 = on stack, 2 = done
    for root in sorted(nodes):
        if root in state:
            continue
        stack = [(root, iter(sorted(parents.get(root, ()))))]
        path = [root]
        state[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                path.pop()
                state[node] = 2
                continue
            if state.get(nxt) == 1:
                # walking parent links, so the cycle comes out reversed
                cyc = path[path.index(nxt):] + [nxt]
                return list(reversed(cyc))
            if nxt not in state:
                state[nxt] = 1
                path.append(nxt)
                stack.append((nxt, iter(sorted(parents.get(nxt, ())))))
    return None


class _DirectedMixin:
    """Parent/child lookups shared by both diagram kinds."""

    @cached_property
    def _parent_map(self) -> dict[str, frozenset[str]]:
        pm: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self._directed():
            pm[b].add(a)
        return {n: frozenset(p) for n, p in pm.items()}

    @cached_property
    def _child_map(self) -> dict[str, frozenset[str]]:
        cm: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self._directed():
            cm[a].add(b)
        return {n: frozenset(c) for n, c in cm.items()}

    def parents(self, node: str) -> frozenset[str]:
        try:
            return self._parent_map[node]
        except KeyError:
            raise UnknownNode(node) from None

    def children(self, node: str) -> frozenset[str]:
        try:
            return self._child_map[node]
        except KeyError:
            raise UnknownNode(node) from None


@dataclass(frozen=True)
class CausalDiagram(_DirectedMixin):
    """A DAG over observed and latent nodes.

    Construction validates the diagram; an invalid diagram cannot exist.

    >>> g = CausalDiagram(observed={"X", "Y"}, latent={"U"},
    ...                   edges={("U", "X"), ("U", "Y"), ("X", "Y")})
    >>> sorted(g.parents("Y"))
    ['U', 'X']
    """

    observed: frozenset[str]
    latent: frozenset[str] = frozenset()
    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "observed", _frozen_nodes(self.observed))
        object.__setattr__(self, "latent", _frozen_nodes(self.latent))
        object.__setattr__(self, "edges", frozenset((str(a), str(b)) for a, b in self.edges))
        validate(self)

    @property
    def nodes(self) -> frozenset[str]:
        return self.observed | self.latent

    def _directed(self):
        return self.edges

    def __repr__(self):
        edges = ", ".join(f"{a}->{b}" for a, b in sorted(self.edges))
        return (f"CausalDiagram(observed={sorted(self.observed)}, "
                f"latent={sorted(self.latent)}, edges=[{edges}])")


@dataclass(frozen=True)
class ProjectedDiagram(_DirectedMixin):
    """Semi-Markovian graph over observed nodes only.

    ``bidirected`` holds unordered pairs stored with lexicographically ordered
    endpoints.
    """

    nodes: frozenset[str]
    directed: frozenset[tuple[str, str]] = frozenset()
    bidirected: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self):
        nodes = _frozen_nodes(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        directed = frozenset((a, b) for a, b in self.directed)
        bi = set()
        for a, b in self.bidirected:
            if a == b:
                raise SelfLoop(a)
            bi.add((a, b) if a < b else (b, a))
        object.__setattr__(self, "directed", directed)
        object.__setattr__(self, "bidirected", frozenset(bi))
        for a, b in directed | self.bidirected:
            for n in (a, b):
                if n not in nodes:
                    raise UnknownNode(n, "projection")
        for a, b in directed:
            if a == b:
                raise SelfLoop(a)
        cycle = _find_cycle(nodes, {n: self._parent_map[n] for n in nodes})
        if cycle:
            raise CycleDetected(cycle)

    def _directed(self):
        return self.directed

    @cached_property
    def _sibling_map(self) -> dict[str, frozenset[str]]:
        sm: dict[str, set[str]] = {n: set() for n in self.nodes}
        for a, b in self.bidirected:
            sm[a].add(b)
            sm[b].add(a)
        return {n: frozenset(s) for n, s in sm.items()}

    def siblings(self, node: str) -> frozenset[str]:
        """Nodes joined to ``node`` by a bidirected edge."""
        try:
            return self._sibling_map[node]
        except KeyError:
            raise UnknownNode(node, "projection") from None

    def __repr__(self):
        d = ", ".join(f"{a}->{b}" for a, b in sorted(self.directed))
        b = ", ".join(f"{a}<->{c}" for a, c in sorted(self.bidirected))
        return f"ProjectedDiagram(nodes={sorted(self.nodes)}, directed=[{d}], bidirected=[{b}])"


Graph = Union[CausalDiagram, ProjectedDiagram]


def validate(diagram: CausalDiagram) -> None:
    """Raise if ``diagram`` violates any structural invariant."""
    overlap = diagram.observed & diagram.latent
    if overlap:
        raise DuplicateNode(min(overlap))
    nodes = diagram.nodes
    parents: dict[str, set[str]] = {n: set() for n in nodes}
    for a, b in sorted(diagram.edges):
        for n in (a, b):
            if n not in nodes:
                raise UnknownNode(n)
        if a == b:
            raise SelfLoop(a)
        parents[b].add(a)
    cycle = _find_cycle(nodes, parents)
    if cycle:
        raise CycleDetected(cycle)


def _check_subset(graph: Graph, nodes: Iterable[str]) -> frozenset[str]:
    s = frozenset(nodes)
    for n in sorted(s - graph.nodes):
        raise UnknownNode(n)
    return s


def ancestors(graph: Graph, nodes: Iterable[str]) -> frozenset[str]:
    """Reflexive-transitive closure of the parent relation applied to ``nodes``."""
    result = set(_check_subset(graph, nodes))
    frontier = list(result)
    while frontier:
        n = frontier.pop()
        for p in graph.parents(n):
            if p not in result:
                result.add(p)
                frontier.append(p)
    return frozenset(result)


def topological_order(graph: Graph, first: Iterable[str] = ()) -> list[str]:
    """Kahn's algorithm, taking the lexicographically smallest available node.

    Nodes in ``first`` are preferred over all others whenever one of them is
    available. If ``first`` is ancestral, its members therefore open the order.
    """
    first = frozenset(first)
    indeg = {n: len(graph.parents(n)) for n in graph.nodes}
    heap = [(n not in first, n) for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        _, n = heapq.heappop(heap)
        order.append(n)
        for c in graph.children(n):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, (c not in first, c))
    if len(order) != len(graph.nodes):
        remaining = {n: graph.parents(n) for n in graph.nodes if n not in order}
        raise CycleDetected(_find_cycle(remaining, remaining) or sorted(remaining))
    return order


def _observed_reach(diagram: CausalDiagram, start: str) -> set[str]:
    """Observed nodes reachable from ``start`` through latent-only interiors."""
    found: set[str] = set()
    seen: set[str] = set()
    frontier = list(diagram.children(start))
    while frontier:
        n = frontier.pop()
        if n in seen:
            continue
        seen.add(n)
        if n in diagram.latent:
            frontier.extend(diagram.children(n))
        else:
            found.add(n)
    return found


def project_latents(diagram: CausalDiagram) -> ProjectedDiagram:
    """Latent projection onto the observed nodes.

    * ``a -> b`` iff the diagram has a directed path from ``a`` to ``b`` whose
      interior nodes are all latent (a plain observed edge included);
    * ``a <-> b`` iff some latent node reaches both ``a`` and ``b`` through
      latent-only directed paths.
    """
    directed = set()
    for a in diagram.observed:
        for b in _observed_reach(diagram, a):
            directed.add((a, b))
    bidirected = set()
    for u in diagram.latent:
        reach = sorted(_observed_reach(diagram, u))
        for i, a in enumerate(reach):
            for b in reach[i + 1:]:
                bidirected.add((a, b))
    return ProjectedDiagram(diagram.observed, directed, bidirected)


def has_latent_chains(diagram: CausalDiagram) -> bool:
    """True when some latent has a latent parent, so projection composes paths."""
    return any(a in diagram.latent and b in diagram.latent for a, b in diagram.edges)


def c_components(projection: ProjectedDiagram) -> list[frozenset[str]]:
    """Maximal bidirected-connected blocks, ordered by their smallest member."""
    seen: set[str] = set()
    blocks = []
    for start in sorted(projection.nodes):
        if start in seen:
            continue
        block = {start}
        frontier = [start]
        while frontier:
            n = frontier.pop()
            for s in projection.siblings(n):
                if s not in block:
                    block.add(s)
                    frontier.append(s)
        seen |= block
        blocks.append(frozenset(block))
    return blocks


def induced_subgraph(projection: ProjectedDiagram, nodes: Iterable[str]) -> ProjectedDiagram:
    s = _check_subset(projection, nodes)
    return ProjectedDiagram(
        s,
        {(a, b) for a, b in projection.directed if a in s and b in s},
        {(a, b) for a, b in projection.bidirected if a in s and b in s},
    )
