"""Graph types, predicates, canonical forms and surgeries."""
import itertools
import math
import random

import pytest

from digraph_core import (
    BULLET,
    CanonicalBoundError,
    EdgeError,
    GraphError,
    GraphParseError,
    MultiDigraph,
    PointedGraph,
    SurgeryError,
    VertexIndexError,
    add_edge,
    aut_order,
    are_isomorphic,
    canonical_form,
    canonical_graph,
    contract_edge,
    degrees,
    delete_edge,
    disjoint_union,
    essential_edges,
    format_compact,
    from_json,
    is_contractible,
    is_redundant,
    is_semistable,
    is_smoothable,
    is_stable,
    is_strongly_connected,
    parse_compact,
    parse_graph,
    permute,
    smooth_all,
    smooth_vertex,
    stabilize,
    to_json,
    vertex_automorphism_count,
    weak_components,
    weight,
)
from graph_enum import enumerate_pointed_semistable_strong, enumerate_pointed_stable_strong, enumerate_stable


def g(n, *edges):
    return MultiDigraph.from_edges(n, list(edges))


def p(n, *edges):
    return PointedGraph(g(n, *edges))


# ═══════════════════════════════════════════════════════════════════
# TYPES
# ═══════════════════════════════════════════════════════════════════


def test_adjacency_must_be_square():
    with pytest.raises(GraphError):
        MultiDigraph.from_rows([[1, 0], [0]])


def test_negative_multiplicity_rejected():
    with pytest.raises(GraphError):
        MultiDigraph.from_rows([[-1]])


def test_edge_outside_vertex_range():
    with pytest.raises(VertexIndexError):
        g(2, (0, 2, 1))


def test_counts_and_weight():
    two_loops = g(1, (0, 0, 2))
    assert two_loops.vertex_count == 1
    assert two_loops.edge_count == 2
    assert weight(two_loops) == 1


def test_pointed_weight_excludes_bullet():
    gamma = p(2, (1, 0, 2), (0, 1, 2))
    assert gamma.edge_count == 4
    assert weight(gamma) == 3
    assert weight(PointedGraph.bullet(2)) == 2


def test_weight_can_be_negative():
    assert weight(MultiDigraph.empty(3)) == -3


def test_degrees_count_loops_both_ways():
    assert degrees(g(2, (0, 0, 1), (0, 1, 2)), 0) == (3, 1)
    with pytest.raises(VertexIndexError):
        degrees(g(1), 3)


# ═══════════════════════════════════════════════════════════════════
# STABILITY & CONNECTIVITY
# ═══════════════════════════════════════════════════════════════════


def test_two_loops_is_stable():
    assert is_stable(g(1, (0, 0, 2)))
    assert not is_stable(g(1, (0, 0, 1)))


def test_stability_ignores_bullet():
    assert is_stable(p(2, (1, 1, 1), (1, 0, 1), (0, 1, 1)))
    assert is_stable(PointedGraph.bullet(0))


def test_semistable():
    assert is_semistable(p(2, (1, 1, 1), (1, 0, 1), (0, 1, 1)))
    # (1, 1) vertex is not semistable
    assert not is_semistable(p(2, (1, 0, 1), (0, 1, 1)))


def test_strong_connectivity():
    assert is_strongly_connected(p(2, (0, 1, 1), (1, 0, 1)))
    assert not is_strongly_connected(p(2, (0, 1, 1), (1, 1, 2)))
    assert is_strongly_connected(g(1, (0, 0, 3)))


def test_weak_components_in_vertex_order():
    union = disjoint_union(g(1, (0, 0, 2)), g(2, (0, 1, 2), (1, 0, 2)))
    parts = weak_components(union)
    assert [h.vertex_count for h in parts] == [1, 2]
    assert canonical_form(parts[1]) == canonical_form(g(2, (0, 1, 2), (1, 0, 2)))


# ═══════════════════════════════════════════════════════════════════
# CANONICAL FORM
# ═══════════════════════════════════════════════════════════════════


def test_canonical_form_is_relabelling_invariant():
    base = g(3, (0, 1, 1), (1, 2, 2), (2, 0, 1), (0, 0, 1))
    keys = {canonical_form(permute(base, order)) for order in itertools.permutations(range(3))}
    assert keys == {canonical_form(base)}


def test_canonical_form_separates_non_isomorphic():
    a = g(2, (0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 1))
    b = g(2, (0, 1, 2), (1, 0, 2))
    assert canonical_form(a) != canonical_form(b)
    assert not are_isomorphic(a, b)


def test_pointed_relabelling_fixes_bullet():
    # swapping which end is • changes the pointed class
    a = p(2, (1, 1, 2), (1, 0, 1), (0, 1, 1))
    b = p(2, (0, 0, 2), (1, 0, 1), (0, 1, 1))
    assert canonical_form(a) != canonical_form(b)
    with pytest.raises(GraphError):
        permute(a, (1, 0))


def test_pointed_and_unpointed_keys_differ():
    assert canonical_form(g(1, (0, 0, 2))) != canonical_form(PointedGraph.bullet(2))


def test_canonical_graph_has_canonical_key():
    h = g(3, (2, 0, 1), (0, 2, 1), (1, 1, 2), (2, 2, 1), (1, 0, 1), (0, 1, 1))
    assert canonical_form(canonical_graph(h)) == canonical_form(h)


def test_canonical_bound():
    with pytest.raises(CanonicalBoundError):
        canonical_form(MultiDigraph.empty(11))


def _shuffled_orders(n, pointed, rng, count=6):
    head, tail = ([BULLET], list(range(1, n))) if pointed else ([], list(range(n)))
    for _ in range(count):
        rng.shuffle(tail)
        yield tuple(head + tail)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_form_of_shuffled_stable_graphs(n):
    rng = random.Random(n)
    for h in enumerate_stable(n):
        key = canonical_form(h)
        for order in _shuffled_orders(h.vertex_count, False, rng):
            assert canonical_form(permute(h, order)) == key


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_canonical_form_of_shuffled_pointed_graphs(k):
    rng = random.Random(10 + k)
    for gamma in enumerate_pointed_stable_strong(k):
        key = canonical_form(gamma)
        for order in _shuffled_orders(gamma.vertex_count, True, rng):
            shuffled = permute(gamma, order)
            assert shuffled.adjacency[BULLET][BULLET] == gamma.adjacency[BULLET][BULLET]
            assert canonical_form(shuffled) == key


@pytest.mark.parametrize("n", [1, 2])
def test_labelled_copies_times_automorphisms_is_factorial(n):
    for h in enumerate_stable(n):
        size = h.vertex_count
        labelled = {permute(h, order).adjacency for order in itertools.permutations(range(size))}
        assert len(labelled) * vertex_automorphism_count(h) == math.factorial(size)


@pytest.mark.parametrize(
    "graph, expected",
    [
        (g(1, (0, 0, 2)), 2),
        (g(1, (0, 0, 3)), 6),
        (g(2, (0, 0, 2), (1, 1, 2)), 8),
        (g(2, (0, 1, 2), (1, 0, 2)), 8),
        (g(2, (0, 0, 1), (1, 1, 1), (0, 1, 1), (1, 0, 1)), 2),
        (g(3, (0, 1, 2), (1, 2, 2), (2, 0, 2)), 24),
        (p(2, (1, 0, 2), (0, 1, 2)), 4),
        (PointedGraph.bullet(3), 6),
    ],
)
def test_aut_order(graph, expected):
    assert aut_order(graph) == expected


# ═══════════════════════════════════════════════════════════════════
# SURGERIES
# ═══════════════════════════════════════════════════════════════════


def test_delete_and_add_edge():
    h = g(2, (0, 1, 2))
    assert delete_edge(h, 0, 1).adjacency == ((0, 1), (0, 0))
    assert add_edge(h, 1, 0).adjacency == ((0, 2), (1, 0))
    with pytest.raises(EdgeError):
        delete_edge(h, 1, 0)


def test_smooth_vertex():
    gamma = p(3, (0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 2, 1))
    assert is_smoothable(gamma, 1)
    assert not is_smoothable(gamma, 2)
    smoothed = smooth_vertex(gamma, 1)
    assert are_isomorphic(smoothed, p(2, (0, 1, 1), (1, 0, 1), (1, 1, 1)))
    with pytest.raises(SurgeryError):
        smooth_vertex(gamma, 2)


def test_smoothing_a_cycle_through_bullet_leaves_a_loop():
    assert smooth_all(p(3, (0, 1, 1), (1, 2, 1), (2, 0, 1))) == PointedGraph.bullet(1)


def test_smoothing_preserves_weight():
    gamma = p(4, (0, 1, 1), (1, 2, 1), (2, 0, 1), (2, 3, 1), (3, 2, 1), (3, 3, 1))
    assert weight(smooth_all(gamma)) == weight(gamma)


def test_contract_edge_bullet_absorbs_partner():
    gamma = p(2, (0, 1, 1), (1, 0, 2))
    assert is_contractible(gamma, 0, 1)
    merged = contract_edge(gamma, 0, 1)
    assert merged == PointedGraph.bullet(2)
    assert weight(merged) == weight(gamma)


def test_contract_needs_a_degree_one_end():
    gamma = p(2, (1, 0, 2), (0, 1, 2))
    assert not is_contractible(gamma, 1, 0)
    with pytest.raises(SurgeryError):
        contract_edge(gamma, 1, 0)


def test_stabilize_is_stable_and_keeps_weight():
    for w in range(1, 4):
        for gamma in enumerate_pointed_semistable_strong(w):
            stable = stabilize(gamma)
            assert is_stable(stable)
            assert weight(stable) == weight(gamma)


def test_stabilization_converse():
    # semistable pointed graphs whose stabilization is strongly connected are themselves strongly connected
    gamma = p(3, (0, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (1, 1, 1))
    assert is_semistable(gamma)
    assert not is_strongly_connected(stabilize(gamma))
    for w in range(1, 4):
        for h in enumerate_pointed_semistable_strong(w):
            assert is_strongly_connected(stabilize(h))


def test_stabilize_rejects_unsemistable():
    with pytest.raises(SurgeryError):
        stabilize(p(2, (0, 1, 1), (1, 0, 1)))


def test_redundant_edge():
    gamma = p(2, (0, 1, 2), (1, 0, 1))
    assert is_redundant(gamma, 0, 1)
    assert not is_redundant(gamma, 1, 0)
    with pytest.raises(EdgeError):
        is_redundant(gamma, 1, 1)


def test_removing_a_redundant_edge_keeps_semistable_graphs_stabilizable():
    for w in range(1, 4):
        for gamma in enumerate_pointed_semistable_strong(w):
            for u, v, _ in gamma.edges():
                if not is_redundant(gamma, u, v):
                    continue
                reduced = smooth_all(delete_edge(gamma, u, v))
                if is_semistable(reduced):
                    assert is_strongly_connected(stabilize(reduced))


def test_essential_edge_bound():
    for w in range(1, 4):
        for gamma in enumerate_pointed_semistable_strong(w):
            assert len(essential_edges(gamma)) <= 2 * gamma.vertex_count - 2


@pytest.mark.parametrize("w", [1, 2, 3, pytest.param(4, marks=pytest.mark.slow)])
def test_redundant_edge_lemma(w):
    graphs = [gamma for gamma in enumerate_pointed_semistable_strong(w) if gamma.vertex_count >= 2]
    # at weight 1 only • with a loop survives
    assert bool(graphs) == (w > 1)
    for gamma in graphs:
        assert any(is_redundant(gamma, u, v) for u, v, _ in gamma.edges()), str(gamma)


def test_essential_edges_of_a_cycle():
    assert essential_edges(g(3, (0, 1, 1), (1, 2, 1), (2, 0, 1))) == [(0, 1), (1, 2), (2, 0)]


# ═══════════════════════════════════════════════════════════════════
# SERIALIZATION
# ═══════════════════════════════════════════════════════════════════


def test_json_form():
    h = g(2, (1, 0, 1), (0, 1, 2))
    assert to_json(h) == {"vertices": 2, "pointed": False, "edges": [[0, 1, 2], [1, 0, 1]]}
    assert from_json(to_json(PointedGraph(h))) == PointedGraph(h)


def test_compact_form():
    h = g(2, (0, 0, 1), (0, 1, 2))
    assert format_compact(h) == "2; 0>0, 0>1*2"
    assert parse_compact("2; 0>1, 0>1, 0>0") == h
    assert parse_compact("1;") == MultiDigraph.empty(1)


@pytest.mark.parametrize("text", ["0>1", "x; 0>1", "2; 0-1", "2; 0>5", "-2;"])
def test_parse_errors(text):
    with pytest.raises(GraphError):
        parse_compact(text)


def test_negative_vertex_count_rejected():
    with pytest.raises(GraphParseError):
        parse_compact("-2;")
    with pytest.raises(GraphParseError):
        from_json({"vertices": -1, "edges": []})
    with pytest.raises(GraphError):
        MultiDigraph.from_edges(-1, [])


def test_parse_graph_accepts_both_forms():
    assert parse_graph('{"vertices": 1, "edges": [[0, 0, 2]]}') == g(1, (0, 0, 2))
    assert parse_graph("1; 0>0*2", pointed=True) == PointedGraph.bullet(2)
    with pytest.raises(GraphParseError):
        parse_graph("{not json")


def test_enumerated_graphs_survive_the_compact_form():
    for h in enumerate_stable(3):
        assert canonical_form(parse_compact(format_compact(h))) == canonical_form(h)
