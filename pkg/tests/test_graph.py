import pytest
from hypothesis import given, strategies as st

from seqplan.exceptions import CycleDetected, DuplicateNode, InvalidName, SelfLoop, UnknownNode
from seqplan.fixtures import FIG1, FIG2A, FIG3, fig3_query
from seqplan.graph import (
    CausalDiagram,
    ProjectedDiagram,
    ancestors,
    c_components,
    has_latent_chains,
    induced_subgraph,
    project_latents,
    topological_order,
    validate,
)
from seqplan.regimes import manipulated_graph


def chain(*names):
    return CausalDiagram(set(names), edges=set(zip(names, names[1:])))


# -- construction and validation ------------------------------------------------


def test_fixtures_are_valid():
    for g in (FIG1, FIG2A, FIG3):
        validate(g)


def test_self_loop_rejected():
    with pytest.raises(SelfLoop):
        CausalDiagram({"A"}, edges={("A", "A")})


def test_two_cycle_rejected():
    with pytest.raises(CycleDetected) as info:
        CausalDiagram({"A", "B"}, edges={("A", "B"), ("B", "A")})
    cyc = info.value.cycle
    assert cyc[0] == cyc[-1] and set(cyc) == {"A", "B"}


def test_reported_cycle_follows_edges():
    g_edges = {("A", "B"), ("B", "C"), ("C", "A"), ("C", "D")}
    with pytest.raises(CycleDetected) as info:
        CausalDiagram({"A", "B", "C", "D"}, edges=g_edges)
    cyc = info.value.cycle
    assert all((a, b) in g_edges for a, b in zip(cyc, cyc[1:]))


def test_unknown_endpoint():
    with pytest.raises(UnknownNode):
        CausalDiagram({"A"}, edges={("A", "B")})


def test_observed_latent_overlap():
    with pytest.raises(DuplicateNode):
        CausalDiagram({"A"}, {"A"})


def test_duplicate_in_list():
    with pytest.raises(DuplicateNode):
        CausalDiagram(["A", "A"])


@pytest.mark.parametrize("bad", ["", "a b", "x-1", "é"])
def test_invalid_names(bad):
    with pytest.raises(InvalidName):
        CausalDiagram({bad})


def test_empty_diagram_is_legal():
    g = CausalDiagram(set())
    assert topological_order(g) == []
    assert c_components(project_latents(g)) == []
    assert ancestors(g, set()) == frozenset()


# -- ancestors ---------------------------------------------------------------------


def test_ancestors_of_root():
    assert ancestors(FIG3, {"Z1"}) == {"Z1"}


def test_ancestors_fig1():
    assert ancestors(FIG1, {"Y"}) == {"Y", "Z", "X1", "X2", "U"}


def test_ancestors_in_manipulated_fig3():
    g = manipulated_graph(FIG3, fig3_query().strategy)
    anc = ancestors(g, {"Y"})
    assert anc == {"Y", "X1", "X3", "Z1", "Z3", "U2"}
    assert anc & {"Z1", "Z2", "Z3"} == {"Z1", "Z3"}


def test_ancestors_unknown_node():
    with pytest.raises(UnknownNode):
        ancestors(FIG1, {"Q"})


# -- topological order --------------------------------------------------------------


def test_topological_chain():
    assert topological_order(chain("C", "B", "A")) == ["C", "B", "A"]


def test_topological_tie_break():
    assert topological_order(CausalDiagram({"B", "A"})) == ["A", "B"]


def test_topological_fig2a_projection():
    assert topological_order(project_latents(FIG2A)) == ["X1", "Z", "X2", "Y"]


def test_topological_first_preference():
    g = CausalDiagram({"A", "B", "C"}, edges={("B", "C")})
    assert topological_order(g, first={"B", "C"}) == ["B", "C", "A"]


# -- projection -----------------------------------------------------------------------


def test_project_fig1():
    p = project_latents(FIG1)
    assert p.bidirected == {("X1", "Z")}
    assert p.directed == {("X2", "Z"), ("X1", "Y"), ("X2", "Y"), ("Z", "Y")}


def test_project_without_latents_is_identity():
    g = chain("A", "B", "C")
    p = project_latents(g)
    assert p.bidirected == frozenset()
    assert p.directed == g.edges


def test_project_fig3():
    assert project_latents(FIG3).bidirected == {("X1", "Z2"), ("X2", "Z3")}


def test_project_latent_chain():
    # U1 -> U2 -> {A, B}, U1 -> C, and A -> L -> B through a latent mediator
    g = CausalDiagram(
        {"A", "B", "C"},
        {"U1", "U2", "L"},
        {("U1", "U2"), ("U2", "A"), ("U2", "B"), ("U1", "C"), ("A", "L"), ("L", "B")},
    )
    p = project_latents(g)
    assert p.bidirected == {("A", "B"), ("A", "C"), ("B", "C")}
    assert p.directed == {("A", "B")}
    assert has_latent_chains(g)
    assert not has_latent_chains(FIG1)


def test_projection_canonical_pairs():
    p = ProjectedDiagram({"A", "B"}, bidirected={("B", "A")})
    assert p.bidirected == {("A", "B")}
    assert p.siblings("A") == {"B"}


def test_projection_rejects_bad_pairs():
    with pytest.raises(SelfLoop):
        ProjectedDiagram({"A"}, bidirected={("A", "A")})
    with pytest.raises(UnknownNode):
        ProjectedDiagram({"A"}, directed={("A", "B")})
    with pytest.raises(CycleDetected):
        ProjectedDiagram({"A", "B"}, directed={("A", "B"), ("B", "A")})


# -- c-components and subgraphs ---------------------------------------------------------


def test_c_components_fig3():
    blocks = c_components(project_latents(FIG3))
    assert blocks == [{"X1", "Z2"}, {"X2", "Z3"}, {"X3"}, {"Y"}, {"Z1"}]


def test_c_components_fig2a():
    assert c_components(project_latents(FIG2A)) == [{"X1", "Y", "Z"}, {"X2"}]


def test_c_components_singletons():
    assert c_components(project_latents(chain("A", "B"))) == [{"A"}, {"B"}]


def test_induced_identity_and_empty():
    p = project_latents(FIG2A)
    assert induced_subgraph(p, p.nodes) == p
    empty = induced_subgraph(p, set())
    assert empty.nodes == frozenset() and not empty.directed and not empty.bidirected


def test_induced_fig2a_yz():
    s = induced_subgraph(project_latents(FIG2A), {"Y", "Z"})
    assert s.nodes == {"Y", "Z"}
    assert s.directed == frozenset()
    assert s.bidirected == {("Y", "Z")}


def test_induced_unknown():
    with pytest.raises(UnknownNode):
        induced_subgraph(project_latents(FIG1), {"Q"})


# -- properties ----------------------------------------------------------------------


@st.composite
def diagrams(draw, max_nodes=7, latents=True):
    n = draw(st.integers(0, max_nodes))
    names = [f"N{i}" for i in range(n)]
    is_latent = [latents and draw(st.booleans()) and draw(st.booleans()) for _ in names]
    edges = set()
    for j in range(n):
        for i in range(j):
            if draw(st.booleans()):
                edges.add((names[i], names[j]))
    observed = {m for m, lat in zip(names, is_latent) if not lat}
    latent = {m for m, lat in zip(names, is_latent) if lat}
    # shuffle names so lexicographic order differs from the construction order
    perm = draw(st.permutations(names))
    ren = dict(zip(names, perm))
    return CausalDiagram({ren[m] for m in observed}, {ren[m] for m in latent},
                         {(ren[a], ren[b]) for a, b in edges})


@given(diagrams(), st.data())
def test_ancestors_monotone_and_idempotent(g, data):
    nodes = sorted(g.nodes)
    s = set(data.draw(st.lists(st.sampled_from(nodes), unique=True))) if nodes else set()
    t = s | (set(data.draw(st.lists(st.sampled_from(nodes), unique=True))) if nodes else set())
    assert ancestors(g, s) <= ancestors(g, t)
    assert ancestors(g, ancestors(g, s)) == ancestors(g, s)


@given(diagrams())
def test_topological_order_is_valid_and_stable(g):
    order = topological_order(g)
    assert sorted(order) == sorted(g.nodes)
    pos = {n: i for i, n in enumerate(order)}
    assert all(pos[a] < pos[b] for a, b in g.edges)
    assert topological_order(g) == order


@given(diagrams())
def test_projection_keeps_observed_edges(g):
    p = project_latents(g)
    assert p.nodes == g.observed
    obs_edges = {(a, b) for a, b in g.edges if a in g.observed and b in g.observed}
    assert obs_edges <= p.directed
    if not g.latent:
        assert p.directed == g.edges and not p.bidirected


@given(diagrams())
def test_c_components_partition(g):
    p = project_latents(g)
    blocks = c_components(p)
    assert sum(len(b) for b in blocks) == len(p.nodes)
    assert set().union(*blocks) == p.nodes if blocks else not p.nodes
    for a, b in p.bidirected:
        assert any(a in blk and b in blk for blk in blocks)
    mins = [min(b) for b in blocks]
    assert mins == sorted(mins)


@given(diagrams(), st.data())
def test_c_components_relabel_equivariant(g, data):
    p = project_latents(g)
    nodes = sorted(p.nodes)
    perm = data.draw(st.permutations(nodes))
    ren = dict(zip(nodes, [f"R{x}" for x in perm]))
    back = {v: k for k, v in ren.items()}
    q = ProjectedDiagram({ren[n] for n in nodes}, {(ren[a], ren[b]) for a, b in p.directed},
                         {(ren[a], ren[b]) for a, b in p.bidirected})
    mapped = {frozenset(back[n] for n in blk) for blk in c_components(q)}
    assert mapped == set(c_components(p))


@given(diagrams(), st.data())
def test_induced_subgraph_composes(g, data):
    p = project_latents(g)
    nodes = sorted(p.nodes)
    s = set(data.draw(st.lists(st.sampled_from(nodes), unique=True))) if nodes else set()
    t = set(data.draw(st.lists(st.sampled_from(nodes), unique=True))) if nodes else set()
    assert induced_subgraph(induced_subgraph(p, s), s & t) == induced_subgraph(p, s & t)
