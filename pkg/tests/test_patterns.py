import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flipbreak.flips import recover_edge
from flipbreak.graphs import BipartiteRepr, Graph
from flipbreak.patterns import (
    ComparabilityGrid,
    find_induced,
    layerwise_flip,
    make_co_matching,
    make_comparability_grid,
    make_crossing,
    make_half_graph,
    make_matching,
    make_radius_r_encoding,
)


def test_crossing_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_crossing("star", 0, 3)
    with pytest.raises(ValueError):
        make_crossing("star", 2, 0)
    with pytest.raises(ValueError):
        make_crossing("fan", 2, 3)


def test_star_crossing_small_counts():
    c = make_crossing("star", 1, 2)
    assert c.graph.n == 8
    assert c.graph.num_edges == 8
    # every a-root sees exactly the starts of its own paths
    for i in (1, 2):
        assert sorted(c.graph.neighbors(c.a(i))) == sorted(
            c.p(i, j, 1) for j in (1, 2))


def test_layer_sizes():
    for kind in ("star", "clique", "halfgraph"):
        c = make_crossing(kind, 3, 4)
        sizes = [len(layer) for layer in c.layers()]
        assert sizes == [4, 16, 16, 16, 4]
        assert c.graph.n == 2 * 4 + 3 * 16


def test_paths_are_disjoint_and_connected():
    c = make_crossing("star", 4, 3)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            for t in range(1, 4):
                assert c.graph.has_edge(c.p(i, j, t), c.p(i, j, t + 1))
            # interior path vertices touch nothing else
            for t in range(2, 4):
                assert c.graph.degree(c.p(i, j, t)) == 2


def test_star_root_degrees():
    c = make_crossing("star", 2, 5)
    for i in range(1, 6):
        assert c.graph.degree(c.a(i)) == 5
        assert c.graph.degree(c.b(i)) == 5


def test_clique_differs_from_star_only_in_end_layers():
    star = make_crossing("star", 2, 3)
    cl = make_crossing("clique", 2, 3)
    diff = set(cl.graph.edges()) ^ set(star.graph.edges())
    assert diff == set(cl.graph.edges()) - set(star.graph.edges())
    for u, v in diff:
        lu, lv = cl.layer_of(u), cl.layer_of(v)
        assert lu == lv and lu in (1, cl.r)


def test_clique_end_layers_are_cliques_per_root():
    cl = make_crossing("clique", 1, 3)
    for i in range(1, 4):
        starts = [cl.p(i, j, 1) for j in range(1, 4)]
        for x in range(3):
            for y in range(x + 1, 3):
                assert cl.graph.has_edge(starts[x], starts[y])


def test_halfgraph_crossing_degrees():
    n, r = 4, 2
    c = make_crossing("halfgraph", r, n)
    for i in range(1, n + 1):
        assert c.graph.degree(c.a(i)) == (n - i + 1) * n
        assert c.graph.degree(c.b(i)) == (n - i + 1) * n
    # a_1 reaches the start of every path, a_n only its own row
    assert all(c.graph.has_edge(c.a(1), c.p(i, j, 1))
               for i in range(1, n + 1) for j in range(1, n + 1))
    assert not c.graph.has_edge(c.a(n), c.p(1, 1, 1))


def test_comparability_grid_small():
    g1 = make_comparability_grid(1)
    assert g1.graph.n == 1 and g1.graph.num_edges == 0
    g2 = make_comparability_grid(2)
    assert g2.graph.n == 4
    assert g2.graph.num_edges == 5
    # the two anti-diagonal corners are the unique non-edge
    u = g2.vertex_of(1, 2)
    v = g2.vertex_of(2, 1)
    assert not g2.graph.has_edge(u, v)


def test_comparability_grid_rule_matches_bruteforce():
    g = make_comparability_grid(4)
    for x in range(16):
        i, j = g.coord_of(x)
        assert g.vertex_of(i, j) == x
        for y in range(x + 1, 16):
            i2, j2 = g.coord_of(y)
            want = i == i2 or j == j2 or ((i < i2) == (j < j2))
            assert g.graph.has_edge(x, y) == want


def test_layerwise_flip_empty_rel_is_identity():
    c = make_crossing("clique", 2, 3)
    g, spec = layerwise_flip(c, ())
    assert g == c.graph
    assert not spec.flips


def test_layerwise_flip_round_trips():
    rng = random.Random(7)
    c = make_crossing("halfgraph", 2, 3)
    layers = sorted({c.layer_of(v) for v in range(c.graph.n)})
    for _ in range(10):
        rel = {tuple(sorted(rng.sample(layers, 2))) for _ in range(3)}
        flipped, spec = layerwise_flip(c, rel)
        for u in range(0, c.graph.n, 5):
            for v in range(u + 1, c.graph.n, 7):
                assert recover_edge(flipped, spec, u, v) == \
                    c.graph.has_edge(u, v)


def _complete_bipartite_repr(n):
    left = frozenset(range(n))
    right = frozenset(range(n, 2 * n))
    edges = frozenset((u, v) for u in left for v in right)
    return BipartiteRepr(left, right, edges)


def test_encoding_of_complete_base_is_the_crossing():
    for kind in ("star", "clique", "halfgraph"):
        enc = make_radius_r_encoding(_complete_bipartite_repr(3), kind, 2)
        assert enc.graph == make_crossing(kind, 2, 3).graph
        assert enc.old_of == tuple(range(enc.graph.n))


def test_encoding_size_mismatch_rejected():
    b = BipartiteRepr(frozenset({0, 1}), frozenset({2}), frozenset())
    with pytest.raises(ValueError):
        make_radius_r_encoding(b, "star", 1)


def test_encoding_edgeless_base_keeps_only_roots():
    b = BipartiteRepr(frozenset({0, 1}), frozenset({2, 3}), frozenset())
    enc = make_radius_r_encoding(b, "star", 3)
    assert enc.graph.n == 4
    assert enc.graph.num_edges == 0


def test_encoding_single_edge_star():
    b = BipartiteRepr(frozenset({0, 1}), frozenset({2, 3}),
                      frozenset({(0, 2)}))
    enc = make_radius_r_encoding(b, "star", 2)
    assert enc.graph.n == 2 * 2 + 2
    # the surviving path joins a_1 to b_1
    a1 = enc.old_of.index(0)
    b1 = enc.old_of.index(2)
    assert enc.graph.degree(a1) == 1
    assert enc.graph.degree(b1) == 1


def test_encoding_vertex_count_formula():
    rng = random.Random(3)
    for _ in range(10):
        n = rng.randint(1, 4)
        r = rng.randint(1, 3)
        left = frozenset(range(n))
        right = frozenset(range(n, 2 * n))
        edges = frozenset((u, v) for u in left for v in right
                          if rng.random() < 0.5)
        enc = make_radius_r_encoding(BipartiteRepr(left, right, edges),
                                     "star", r)
        assert enc.graph.n == 2 * n + r * len(edges)


def test_encoding_intra_edges_validated_and_pruned():
    b = BipartiteRepr(frozenset({0, 1}), frozenset({2, 3}),
                      frozenset({(0, 2)}))
    cross = make_crossing("star", 1, 2)
    with pytest.raises(ValueError):
        make_radius_r_encoding(b, "star", 1,
                               intra_edges=[(cross.a(1), cross.p(1, 1, 1))])
    # an intra edge whose endpoint path dies is dropped with it
    enc = make_radius_r_encoding(
        b, "star", 1, intra_edges=[(cross.p(1, 1, 1), cross.p(2, 2, 1))])
    assert enc.graph.n == 5
    surv = enc.old_of.index(cross.p(1, 1, 1))
    assert enc.graph.degree(surv) == 2  # just its two roots
    # between two survivors it stays: complete base, roots tied together
    enc2 = make_radius_r_encoding(
        _complete_bipartite_repr(2), "star", 1,
        intra_edges=[(cross.p(1, 1, 1), cross.p(2, 2, 1))])
    assert enc2.graph.has_edge(cross.p(1, 1, 1), cross.p(2, 2, 1))


def test_encoding_layer_flip_applied_last():
    b = _complete_bipartite_repr(2)
    enc = make_radius_r_encoding(b, "star", 1, layer_rel=[(0, 2)])
    plain = make_crossing("star", 1, 2)
    # a-roots and b-roots now completely joined, previously untouched
    for i in (1, 2):
        for j in (1, 2):
            assert enc.graph.has_edge(plain.a(i), plain.b(j))


def test_half_graph_matching_co_matching():
    assert make_half_graph(1) == Graph(2, [(0, 1)])
    h = make_half_graph(3)
    assert h.num_edges == 6
    assert h.has_edge(0, 3) and h.has_edge(0, 5)
    assert not h.has_edge(2, 3)
    m = make_matching(3)
    assert m.num_edges == 3 and m.has_edge(1, 4)
    cm = make_co_matching(3)
    assert cm.num_edges == 6 and not cm.has_edge(1, 4)
    assert cm.has_edge(1, 3)


def _check_embedding(pattern, host, where):
    assert len(set(where)) == pattern.n
    for u in range(pattern.n):
        for v in range(u + 1, pattern.n):
            assert pattern.has_edge(u, v) == host.has_edge(where[u], where[v])


def test_find_induced_small_cases():
    triangle = Graph(3, [(0, 1), (1, 2), (0, 2)])
    c4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert find_induced(triangle, c4) is None
    path3 = Graph(3, [(0, 1), (1, 2)])
    assert find_induced(path3, triangle) is None  # induced path needs a non-edge
    where = find_induced(path3, c4)
    assert where is not None
    _check_embedding(path3, c4, where)
    assert find_induced(make_matching(2), make_co_matching(3)) is not None


def test_find_induced_self_embedding():
    g = make_crossing("star", 1, 2).graph
    where = find_induced(g, g)
    assert where is not None
    _check_embedding(g, g, where)


def test_find_induced_guard():
    big = make_matching(7)  # 14 vertices
    host = make_matching(8)
    with pytest.raises(ValueError):
        find_induced(big, host)
    where = find_induced(big, host, force=True)
    assert where is not None
    _check_embedding(big, host, where)
    assert find_induced(big, host, guard=14) is not None


def test_find_induced_empty_pattern():
    assert find_induced(Graph(0, []), make_matching(2)) == ()


@st.composite
def host_and_subset(draw):
    n = draw(st.integers(min_value=2, max_value=8))
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if draw(st.booleans()):
                edges.append((u, v))
    size = draw(st.integers(min_value=1, max_value=min(n, 5)))
    subset = draw(st.permutations(range(n)).map(lambda p: sorted(p[:size])))
    return Graph(n, edges), subset


@given(host_and_subset())
@settings(max_examples=60, deadline=None)
def test_find_induced_finds_planted_subgraphs(hs):
    from flipbreak.graphs import induced_subgraph

    host, subset = hs
    pattern = induced_subgraph(host, subset).graph
    where = find_induced(pattern, host)
    assert where is not None
    _check_embedding(pattern, host, where)
