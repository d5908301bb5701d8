import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deptw.decomp import (
    DependencyTreeDecomposition,
    check_compatibility,
    decomposition_to_ordering,
    elimination_width,
    fill_in_graph,
    format_td,
    ordering_to_decomposition,
    ordering_width,
    parse_td,
    validate_decomposition,
)
from deptw.errors import DecompositionError, OrderingError
from deptw.poset import DependencyPoset, enumerate_linear_extensions, poset_from_pairs, reverse_poset
from deptw.qbf import PrimalGraph, build_primal_graph, generate_family

from _corpus import family_corpus

PATH = PrimalGraph.from_edges([1, 2, 3], [(1, 2), (2, 3)])
K3 = PrimalGraph.from_edges([1, 2, 3], [(1, 2), (1, 3), (2, 3)])
LIN3 = DependencyPoset.from_pairs([1, 2, 3], [(1, 2), (2, 3)])


def test_fill_in_examples():
    assert fill_in_graph(PATH, (2, 1, 3)).fill_edges == {(1, 3)}
    assert fill_in_graph(PATH, (1, 2, 3)).fill_edges == frozenset()
    c4 = PrimalGraph.from_edges([1, 2, 3, 4], [(1, 2), (2, 3), (3, 4), (1, 4)])
    assert fill_in_graph(c4, (1, 2, 3, 4)).fill_edges == {(2, 4)}


def test_width_examples():
    for order in itertools.permutations([1, 2, 3]):
        assert ordering_width(K3, order) == 2
    assert ordering_width(PrimalGraph.from_edges([1, 2], []), (1, 2)) == 0
    a2 = build_primal_graph(generate_family("A", 2).instance)
    assert ordering_width(a2, (4, 1, 2, 3)) == 3


def test_compatibility():
    assert check_compatibility((3, 2, 1), LIN3)
    assert not check_compatibility((1, 2, 3), LIN3)
    assert check_compatibility((2, 1, 3), DependencyPoset.from_pairs([1, 2, 3], []))
    with pytest.raises(OrderingError):
        check_compatibility((1, 2), LIN3)


def test_ordering_to_decomposition_examples():
    td = ordering_to_decomposition(K3, LIN3, (3, 2, 1))
    assert td.width == 2
    assert validate_decomposition(K3, LIN3, td).ok
    one = PrimalGraph.from_edges([7], [])
    p1 = DependencyPoset.from_pairs([7], [])
    td1 = ordering_to_decomposition(one, p1, (7,))
    assert td1.bags == (frozenset({7}),) and td1.width == 0
    fam = generate_family("A", 2)
    g = build_primal_graph(fam.instance)
    p = poset_from_pairs(fam.instance, fam.poset_pairs)
    td2 = ordering_to_decomposition(g, p, (1, 2, 4, 3))
    assert td2.width == 1
    assert validate_decomposition(g, p, td2).ok
    with pytest.raises(OrderingError):
        ordering_to_decomposition(K3, LIN3, (1, 2, 3))


def test_empty_graph_decomposition():
    g = PrimalGraph.from_edges([], [])
    td = ordering_to_decomposition(g, DependencyPoset.from_pairs([], []), ())
    assert td.bags == (frozenset(),) and td.width == 0


def test_decomposition_to_ordering_examples():
    single = DependencyTreeDecomposition((frozenset({1, 2, 3}),), (-1,))
    assert decomposition_to_ordering(single, LIN3, K3) == (3, 2, 1)
    one = PrimalGraph.from_edges([5], [])
    assert decomposition_to_ordering(
        DependencyTreeDecomposition((frozenset({5}),), (-1,)), DependencyPoset.from_pairs([5], []), one
    ) == (5,)


def test_validate_reports_witnesses():
    bad = DependencyTreeDecomposition((frozenset({1, 2}), frozenset({3})), (-1, 0))
    rep = validate_decomposition(PATH, None, bad)
    assert rep.failed() == {"T2"}
    assert rep.violations[0].witness == (2, 3)
    split = DependencyTreeDecomposition(
        (frozenset({1, 2}), frozenset({2, 3}), frozenset({1})), (-1, 0, 1)
    )
    rep = validate_decomposition(PATH, None, split)
    assert "T3" in rep.failed()
    # x1 introduced above x3 while x1 <= x3 is fine; the reverse is not
    ok = DependencyTreeDecomposition((frozenset({1, 2}), frozenset({2, 3})), (-1, 0))
    assert validate_decomposition(PATH, LIN3, ok).ok
    t4 = DependencyTreeDecomposition((frozenset({3, 2}), frozenset({2, 1})), (-1, 0))
    assert validate_decomposition(PATH, LIN3, t4).failed() == {"T4"}
    with pytest.raises(DecompositionError):
        decomposition_to_ordering(t4, LIN3, PATH)
    missing = DependencyTreeDecomposition((frozenset({1, 2}),), (-1,))
    assert "T1" in validate_decomposition(PATH, None, missing).failed()


def _closure_ok(h):
    pos = h.position
    for v in h.order:
        later = [w for w in h.adjacency[v] if pos[w] > pos[v]]
        for a, b in itertools.combinations(later, 2):
            if not h.has_edge(a, b):
                return False
    return True


def _random_graph(data, max_n=8):
    n = data.draw(st.integers(1, max_n))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    edges = data.draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    return PrimalGraph.from_edges(range(1, n + 1), edges)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_fill_in_closure_and_minimality(data):
    g = _random_graph(data)
    order = tuple(data.draw(st.permutations(g.vertices)))
    h = fill_in_graph(g, order)
    assert _closure_ok(h)
    for a, b in h.fill_edges:
        adj = {v: set(s) for v, s in h.adjacency.items()}
        adj[a].discard(b)
        adj[b].discard(a)
        pruned = type(h)(g, order, h.fill_edges - {(a, b)}, {v: frozenset(s) for v, s in adj.items()})
        assert not _closure_ok(pruned)
    assert ordering_width(g, order) == elimination_width(g, order)


def _unconstrained_tw(g):
    return min(ordering_width(g, o) for o in itertools.permutations(g.vertices))


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_dependency_width_bounds_treewidth(data):
    g = _random_graph(data, max_n=6)
    n = len(g.vertices)
    pairs = [(u, v) for u in range(1, n + 1) for v in range(u + 1, n + 1)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=8) if pairs else st.just([]))
    p = DependencyPoset.from_pairs(g.vertices, chosen)
    dep = min(ordering_width(g, o) for o in enumerate_linear_extensions(reverse_poset(p)))
    assert dep >= _unconstrained_tw(g)


def test_round_trip_on_corpus():
    for label, inst, p in family_corpus():
        g = build_primal_graph(inst)
        if len(g.vertices) > 9:
            continue
        for k, order in enumerate(enumerate_linear_extensions(reverse_poset(p))):
            if k >= 40:
                break
            td = ordering_to_decomposition(g, p, order)
            assert validate_decomposition(g, p, td).ok, label
            assert td.width <= max(ordering_width(g, order), 0)
            back = decomposition_to_ordering(td, p, g)
            assert check_compatibility(back, p)
            assert ordering_width(g, back) <= ordering_width(g, order), label


def test_td_text_roundtrip():
    td = ordering_to_decomposition(K3, LIN3, (3, 2, 1))
    text = format_td(td, K3)
    assert text.splitlines()[0] == "s td 3 3 3"
    again = parse_td(text)
    assert again == td
    assert format_td(again, K3) == text
    with pytest.raises(DecompositionError):
        parse_td("b 1 1 0\n")
