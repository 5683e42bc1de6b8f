import json

import pytest
from hypothesis import given, settings, strategies as st

from flipbreak.graphs import Graph
from flipbreak.flips import FlipSpec, apply_flip
from flipbreak.insulators import (
    Grid,
    Insulator,
    O5Witness,
    ORDERED,
    ORDERLESS,
    BiPrepattern,
    trivial_insulator,
    validate_bi_prepattern,
    validate_insulator,
)
from flipbreak.breakability import (
    BreakError,
    BreakWitness,
    FlipLayering,
    NiceTreeDecomp,
    break_from_insulator,
    dist_infty_deletion_break,
    dist_infty_deletion_flat,
    dist_infty_flip_break,
    dist_infty_flip_flat,
    flat_deletion_witness,
    flat_flip_witness,
    flip_break,
    validate_elimination_forest,
    validate_flip_layering,
    validate_nice_tree_decomp,
    validate_rank_decomp,
    verify_break,
    witness_from_json,
    witness_to_json,
)


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def clusters(m, s):
    edges = []
    for t in range(m):
        base = s * t
        edges += [(a, b) for a in range(base, base + s) for b in range(a + 1, base + s)]
    return Graph(m * s, edges)


def ball_set(g, starts, r):
    """Independent set-based reference for flipped-graph balls."""
    adj = {v: set() for v in range(g.n)}
    for u, v in g.edges():
        adj[u].add(v)
        adj[v].add(u)
    reach = set(starts)
    frontier = set(starts)
    for _ in range(r):
        nxt = set()
        for v in frontier:
            nxt |= adj[v]
        nxt -= reach
        if not nxt:
            break
        reach |= nxt
        frontier = nxt
    return reach


# ---------------------------------------------------------------------------
# witness shape, verification, serialization


def test_verify_flip_radius_separation():
    g = path(4)
    far = BreakWitness("flip", 1, (0,), (3,), None, FlipSpec.identity(4))
    near = BreakWitness("flip", 1, (0,), (2,), None, FlipSpec.identity(4))
    assert verify_break(g, far) is True
    assert verify_break(g, near) is False


def test_verify_flip_uses_the_flipped_graph():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    spec = FlipSpec.make([0, 1, 1, 0], [(0, 1)])
    wit = BreakWitness("flip", 1, (0,), (3,), None, spec)
    h = apply_flip(g, spec)
    assert verify_break(g, wit) == (
        not ball_set(h, [0], 1) & ball_set(h, [3], 1)
    )


def test_verify_deletion_modes():
    g = path(5)
    cut = BreakWitness("deletion", 4, (0, 1), (3, 4), (2,), None)
    assert verify_break(g, cut) is True
    kept = BreakWitness("deletion", 2, (0,), (2,), (4,), None)
    assert verify_break(g, kept) is False
    overlap = BreakWitness("deletion", 1, (2,), (4,), (2,), None)
    assert verify_break(g, overlap) is False
    comp = BreakWitness("deletion-infty", 0, (0, 1), (3, 4), (2,), None)
    assert verify_break(g, comp) is True


def test_verify_component_flip_mode():
    g = Graph(6, [(0, 1), (1, 2), (3, 4), (4, 5), (2, 3)])
    bridge = FlipSpec.make([0, 0, 0, 1, 1, 1], [(0, 1)])
    wit = BreakWitness("flip-infty", 0, (0, 2), (3, 5), None, bridge)
    assert verify_break(g, wit) is False  # the flip also creates cross edges
    exact = FlipSpec.make([0, 0, 1, 2, 3, 3], [(1, 2)])
    assert verify_break(g, BreakWitness("flip-infty", 0, (0, 2), (3, 5), None, exact))


def test_verify_flat_modes():
    g = clusters(3, 2)
    assert verify_break(g, flat_flip_witness([0, 2, 4], FlipSpec.identity(6)))
    assert not verify_break(g, flat_flip_witness([0, 1, 4], FlipSpec.identity(6)))
    star = Graph(4, [(0, 1), (0, 2), (0, 3)])
    assert verify_break(star, flat_deletion_witness([0], [1, 2, 3]))
    assert not verify_break(star, flat_deletion_witness([3], [1, 2]))
    assert not verify_break(star, flat_deletion_witness([0], [0, 1]))


def test_verify_malformed_witnesses():
    g = path(4)
    with pytest.raises(ValueError):
        BreakWitness("warp", 1, (), (), None, None)
    with pytest.raises(ValueError):
        verify_break(g, BreakWitness("flip", 1, (0,), (3,), None, None))
    with pytest.raises(ValueError):
        verify_break(g, BreakWitness("deletion", 1, (0,), (3,), None, None))
    with pytest.raises(ValueError):
        verify_break(g, BreakWitness("flip", 1, (0,), (9,), None, FlipSpec.identity(4)))
    with pytest.raises(ValueError):
        verify_break(
            g, BreakWitness("flip", 1, (0,), (3,), None, FlipSpec.identity(3))
        )
    with pytest.raises(ValueError):
        verify_break(
            g,
            BreakWitness("flat-infty-flip", 0, (0,), (3,), None, FlipSpec.identity(4)),
        )


def test_witness_json_round_trip():
    flip = BreakWitness("flip", 2, (0, 1), (5,), None, FlipSpec.make([0, 0, 1, 1, 2, 2], [(0, 1)]))
    cut = BreakWitness("deletion-infty", 0, (0,), (4,), (2, 3), None)
    for wit in (flip, cut):
        assert witness_from_json(witness_to_json(wit)) == wit
    data = json.loads(witness_to_json(flip))
    assert set(data) == {"mode", "r", "A", "B", "flipSpec"}
    assert "S" not in data
    assert set(json.loads(witness_to_json(cut))) == {"mode", "r", "A", "B", "S"}


def test_witness_json_rejects_garbage():
    with pytest.raises(ValueError):
        witness_from_json("{not json")
    with pytest.raises(ValueError):
        witness_from_json(json.dumps({"mode": "flip", "r": 1}))
    with pytest.raises(ValueError):
        witness_from_json(json.dumps({"mode": "warp", "r": 0, "A": [], "B": []}))


# ---------------------------------------------------------------------------
# insulator route: synthetic hosts with programmable grids


def orderless_tower_insulator(g, w, height):
    """Columns are exact ball towers around w; needs pairwise disjoint balls."""
    order = sorted(w)
    cols = []
    for v in order:
        rings = []
        prev = 0
        reach = 1 << v
        for rr in range(height):
            rings.append(reach & ~prev)
            prev = reach
            for u in list(ball_set(g, [x for x in range(g.n) if reach >> x & 1], 1)):
                reach |= 1 << u
        cols.append(tuple(rings))
    grid = Grid(tuple(range(1, len(order) + 1)), height, tuple(cols), ORDERLESS)
    roots = tuple((i + 1, v) for i, v in enumerate(order))
    return Insulator.make(grid, [0] * g.n, [], [], None, roots)


def striped_host(n, r, speckle=None, leak=False):
    """Ordered insulator playground: n columns of height 2r+1 with
    singleton cells, vertical column paths, optional same-row far edges
    from a speckle predicate, and outside comparison vertices forming a
    half-graph onto the bottom row. Per-vertex parts make every relation
    clause programmable."""
    h = 2 * r + 1

    def vid(pos, row):
        return pos * h + (row - 1)

    total = n * h + n
    edges = []
    for pos in range(n):
        for row in range(1, h):
            edges.append((vid(pos, row), vid(pos, row + 1)))
    rset = set()
    if speckle:
        for i in range(n):
            for j in range(i + 2, n):
                for row in range(1, h + 1):
                    if speckle(i, j, row):
                        u, v = vid(i, row), vid(j, row)
                        edges.append((u, v))
                        rset.add((u, v))
    for i in range(n):
        for j in range(i, n):
            edges.append((n * h + i, vid(j, 1)))
    if leak:
        edges.append((vid(2, 1), vid(0, 3)))
    g = Graph(total, edges)
    cols = tuple(
        tuple(1 << vid(pos, row) for row in range(1, h + 1)) for pos in range(n)
    )
    grid = Grid(tuple(range(1, n + 1)), h, cols, ORDERED)
    o5 = O5Witness(
        0,
        FlipSpec.identity(total),
        tuple((vid(pos, 1), vid(pos, 1)) for pos in range(n)),
        tuple((pos + 1, n * h + pos) for pos in range(n)),
        "<=",
    )
    ins = Insulator.make(
        grid,
        list(range(total)),
        [],
        sorted(rset),
        o5,
        tuple((pos + 1, vid(pos, 1)) for pos in range(n)),
    )
    return g, ins, [vid(pos, 1) for pos in range(n)]


def test_break_orderless_edgeless():
    g = Graph(18)
    w = list(range(18))
    ins = orderless_tower_insulator(g, w, 3)
    assert validate_insulator(g, ins) == []
    wit = break_from_insulator(g, w, ins, 1)
    assert wit.mode == "flip" and wit.r == 1
    assert wit.a == tuple(range(9)) and wit.b == tuple(range(9, 18))
    assert verify_break(g, wit)


def test_break_orderless_triangle_towers():
    g = clusters(20, 3)
    w = [3 * t for t in range(20)]
    ins = orderless_tower_insulator(g, w, 3)
    assert validate_insulator(g, ins) == []
    wit = break_from_insulator(g, w, ins, 1)
    assert wit.a == tuple(3 * t for t in range(10))
    assert wit.b == tuple(3 * t for t in range(10, 20))
    h = apply_flip(g, wit.flip_spec)
    assert not ball_set(h, wit.a, 1) & ball_set(h, wit.b, 1)


def test_break_ordered_plain_columns():
    g, ins, w = striped_host(18, 1)
    assert validate_insulator(g, ins) == []
    wit = break_from_insulator(g, w, ins, 1)
    assert wit.a == (6, 9, 12, 15, 18, 21)
    assert wit.b == (30, 33, 36, 39, 42, 45)
    assert len(wit.a) >= len(w) // 3 and len(wit.b) >= len(w) // 3
    assert verify_break(g, wit)


def test_break_ordered_speckled_relations():
    g, ins, w = striped_host(18, 1, speckle=lambda i, j, row: (i + 2 * j + row) % 3 == 0)
    assert validate_insulator(g, ins) == []
    wit = break_from_insulator(g, w, ins, 1)
    assert wit.a == (6, 9, 12, 15, 18, 21)
    assert wit.b == (30, 33, 36, 39, 42, 45)
    assert wit.flip_spec.flips
    h = apply_flip(g, wit.flip_spec)
    assert not ball_set(h, wit.a, 1) & ball_set(h, wit.b, 1)


def test_break_ordered_radius_two():
    g, ins, w = striped_host(36, 2, speckle=lambda i, j, row: (i + 2 * j + row) % 3 == 0)
    assert validate_insulator(g, ins) == []
    wit = break_from_insulator(g, w, ins, 2)
    assert len(wit.a) == 12 and len(wit.b) == 12
    h = apply_flip(g, wit.flip_spec)
    assert not ball_set(h, wit.a, 2) & ball_set(h, wit.b, 2)


def test_break_ordered_deterministic():
    g, ins, w = striped_host(18, 1, speckle=lambda i, j, row: (i + j + row) % 4 == 0)
    assert break_from_insulator(g, w, ins, 1) == break_from_insulator(g, w, ins, 1)


def test_break_rejects_frontier_edge():
    g, ins, w = striped_host(18, 1, leak=True)
    assert validate_insulator(g, ins) == []
    with pytest.raises(BreakError, match="frontier"):
        break_from_insulator(g, w, ins, 1)


def test_break_preconditions():
    g = Graph(18)
    w = list(range(18))
    tall = orderless_tower_insulator(g, w, 3)
    with pytest.raises(BreakError, match="height"):
        break_from_insulator(g, w, trivial_insulator(g, w), 1)
    with pytest.raises(BreakError, match="radius"):
        break_from_insulator(g, w, tall, 0)
    with pytest.raises(BreakError, match="at least"):
        break_from_insulator(Graph(10), list(range(10)),
                             orderless_tower_insulator(Graph(10), range(10), 3), 1)
    g19 = Graph(19)
    ins19 = orderless_tower_insulator(g19, range(18), 3)
    with pytest.raises(BreakError, match="insulate"):
        break_from_insulator(g19, list(range(17)) + [18], ins19, 1)


def test_break_rejects_invalid_insulator():
    g, ins, w = striped_host(18, 1)
    g2 = Graph(g.n, list(g.edges()) + [(0, 4)])  # vertical two-row jump
    assert validate_insulator(g2, ins) != []
    with pytest.raises(BreakError, match="invalid insulator"):
        break_from_insulator(g2, w, ins, 1)


# ---------------------------------------------------------------------------
# the insulate + break pipeline


def test_flip_break_edgeless_reaches_zone_split():
    g = Graph(20)
    wit = flip_break(g, range(20), 1)
    assert wit.a == tuple(range(10)) and wit.b == tuple(range(10, 20))
    assert wit.flip_spec.num_parts == 1
    assert verify_break(g, wit)


def test_flip_break_path_fallback():
    g = path(20)
    wit = flip_break(g, range(20), 1)
    assert wit.a == (0, 6) and wit.b == (12, 18)
    assert verify_break(g, wit)
    assert set(wit.a) | set(wit.b) <= set(range(20))
    assert not set(wit.a) & set(wit.b)


def test_flip_break_half_graph_single_column():
    m = 11
    g = Graph(2 * m, [(i, m + j) for i in range(m) for j in range(m) if i <= j])
    wit = flip_break(g, range(m), 1)
    assert wit.a == (8,) and wit.b == ()
    assert verify_break(g, wit)


def test_flip_break_triangle_roots():
    g = clusters(20, 3)
    for r in (1, 2):
        wit = flip_break(g, [3 * t for t in range(20)], r)
        assert wit.a == (51,) and wit.b == ()
        assert verify_break(g, wit)


def test_flip_break_passes_prepattern_through():
    edges = [(21, k) for k in range(1, 20)]
    v = 22
    for i in range(1, 20):
        for j in range(i + 1, 20):
            edges.append((v, i))
            edges.append((v, j))
            v += 1
    g = Graph(v, edges)
    out = flip_break(g, range(20), 1)
    assert isinstance(out, BiPrepattern)


def test_flip_break_rejects_radius_zero():
    with pytest.raises(BreakError):
        flip_break(Graph(4), range(4), 0)


def test_flip_break_deterministic():
    g = path(20)
    assert flip_break(g, range(20), 1) == flip_break(g, range(20), 1)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_flip_break_random_fuzz(seed):
    import random

    rng = random.Random(seed)
    n = rng.randint(2, 14)
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3
    ]
    g = Graph(n, edges)
    out = flip_break(g, range(n), 1)
    if isinstance(out, BreakWitness):
        assert verify_break(g, out)
        assert set(out.a) | set(out.b) <= set(range(n))
        assert not set(out.a) & set(out.b)


# ---------------------------------------------------------------------------
# rank decompositions


def caterpillar(leaves):
    node = leaves[0]
    for v in leaves[1:]:
        node = (node, v)
    return node


def test_rank_validator_accepts_path_caterpillar():
    assert validate_rank_decomp(path(20), caterpillar(list(range(20))), 1) == []


def test_rank_validator_accepts_cliques():
    g = clusters(3, 4)
    assert validate_rank_decomp(g, caterpillar(list(range(12))), 1) == []


def test_rank_validator_rejects_wide_cut():
    errs = validate_rank_decomp(path(4), ((0, 2), (1, 3)), 1)
    assert errs and "rank 2" in errs[0]


def test_rank_validator_rejects_bad_leaves():
    assert validate_rank_decomp(path(3), ((0, 1), 1), 2) != []
    assert validate_rank_decomp(path(3), (0, 1), 2) != []
    assert validate_rank_decomp(path(3), ((0, 1), (2, 3)), 2) != []


def test_rank_break_on_path():
    g = path(20)
    wit = dist_infty_flip_break(g, range(20), caterpillar(list(range(20))), 1)
    assert wit.mode == "flip-infty"
    assert wit.a == tuple(range(5))
    assert wit.b == tuple(range(5, 20))
    assert 4 * len(wit.a) >= 20 and 4 * len(wit.b) >= 20
    assert wit.flip_spec.num_parts <= 2 ** 1 + 2 ** (2 ** 1)
    assert verify_break(g, wit)
    h = apply_flip(g, wit.flip_spec)
    assert not ball_set(h, wit.a, g.n) & set(wit.b)


def test_rank_break_on_clusters():
    g = clusters(4, 4)
    wit = dist_infty_flip_break(g, range(16), caterpillar(list(range(16))), 1)
    assert 4 * len(wit.a) >= 16 and 4 * len(wit.b) >= 16
    assert verify_break(g, wit)


def test_rank_break_needs_two_probes():
    with pytest.raises(BreakError, match="two"):
        dist_infty_flip_break(path(4), [1], caterpillar([0, 1, 2, 3]), 1)


def test_rank_break_rejects_bad_decomposition():
    with pytest.raises(BreakError):
        dist_infty_flip_break(path(4), range(4), ((0, 2), (1, 3)), 1)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rank_break_cluster_fuzz(seed):
    import random

    rng = random.Random(seed)
    m = rng.randint(2, 5)
    s = rng.randint(2, 4)
    g = clusters(m, s)
    order = list(range(m * s))
    rng.shuffle(order)
    w = sorted(order[: rng.randint(2, m * s)])
    wit = dist_infty_flip_break(g, w, caterpillar(list(range(m * s))), 1)
    assert verify_break(g, wit)
    assert 4 * len(wit.a) >= len(w) and 4 * len(wit.b) >= len(w)
    assert set(wit.a) | set(wit.b) == set(w)


# ---------------------------------------------------------------------------
# nice tree decompositions


def chain_nice_td(pieces):
    """Nice decomposition from a list of bags walked as intro/forget chain."""
    bags, children = [], []

    def mk(bag, kids):
        bags.append(tuple(bag))
        children.append(tuple(kids))
        return len(bags) - 1

    cur = mk((), ())
    held: list[int] = []
    for bag in pieces:
        for v in sorted(set(held) - set(bag)):
            held.remove(v)
            cur = mk(tuple(held), (cur,))
        for v in sorted(set(bag) - set(held)):
            held.append(v)
            cur = mk(tuple(sorted(held)), (cur,))
    for v in sorted(held, reverse=True):
        held.remove(v)
        cur = mk(tuple(sorted(held)), (cur,))
    root = cur if not bags[cur] else mk((), (cur,))
    return NiceTreeDecomp(tuple(bags), tuple(children), root)


def path_nice_td(n):
    return chain_nice_td([(v - 1, v) for v in range(1, n)] or [(0,)])


def star_nice_td(n):
    return chain_nice_td([(0, v) for v in range(1, n)] or [(0,)])


def test_nice_td_validator_accepts_builders():
    assert validate_nice_tree_decomp(path(12), path_nice_td(12), 2) == []
    star = Graph(16, [(0, i) for i in range(1, 16)])
    assert validate_nice_tree_decomp(star, star_nice_td(16), 2) == []


def test_nice_td_validator_rejects_defects():
    g = path(3)
    td = path_nice_td(3)
    assert validate_nice_tree_decomp(g, td, 1) != []  # bag bound
    errs = validate_nice_tree_decomp(path(4), path_nice_td(3), 2)
    assert errs  # vertex 3 uncovered
    bags = ((), (0,), (0, 1), (1,), (1, 2), (2,), ())
    kids = ((), (0,), (1,), (2,), (3,), (4,), (5,))
    missing_edge = Graph(3, [(0, 2)])
    errs = validate_nice_tree_decomp(missing_edge, NiceTreeDecomp(bags, kids, 6), 2)
    assert errs and "edge" in errs[0]


def test_nice_td_validator_rejects_join_mismatch():
    bags = ((), (), (0,), (1,), (0,))
    kids = ((), (), (0,), (1,), (2, 3))
    errs = validate_nice_tree_decomp(Graph(2), NiceTreeDecomp(bags, kids, 4), 2)
    assert errs and "join" in errs[0]


def test_nice_td_break_on_path():
    g = path(12)
    wit = dist_infty_deletion_break(g, range(12), path_nice_td(12), 2)
    assert wit.mode == "deletion-infty"
    assert wit.s == (1, 2) and wit.a == (0,)
    assert wit.b == tuple(range(3, 12))
    assert verify_break(g, wit)


def test_nice_td_break_on_star():
    g = Graph(16, [(0, i) for i in range(1, 16)])
    wit = dist_infty_deletion_break(g, range(16), star_nice_td(16), 2)
    assert wit.s == (0, 3) and wit.a == (1, 2)
    assert len(wit.b) == 12
    assert verify_break(g, wit)
    m = 16 // 4 - 2
    assert len(wit.a) >= m and len(wit.b) >= m


def test_nice_td_break_needs_schedule_margin():
    g = path(11)
    with pytest.raises(BreakError, match="at least"):
        dist_infty_deletion_break(g, range(11), path_nice_td(11), 2)


def test_nice_td_break_respects_probe_subset():
    g = path(20)
    w = list(range(7)) + list(range(13, 20))
    wit = dist_infty_deletion_break(g, w, path_nice_td(20), 2)
    assert verify_break(g, wit)
    assert set(wit.a) | set(wit.b) <= set(w)


# ---------------------------------------------------------------------------
# flip layerings


def clique_layering(vs):
    return FlipLayering(
        parts=(tuple(vs),),
        flips=((0, 0),),
        children=tuple(FlipLayering(vertex=v) for v in vs),
    )


def union_layering(children, n):
    span = tuple(sorted(v for c in children for v in c.span()))
    assert span == tuple(range(n))
    return FlipLayering(parts=(span,), flips=(), children=tuple(children))


def test_layering_validator_accepts_clusters():
    g = clusters(3, 4)
    root = union_layering([clique_layering(range(4 * t, 4 * t + 4)) for t in range(3)], 12)
    assert validate_flip_layering(g, root, 2) == []


def test_layering_validator_rejects_defects():
    g = clusters(3, 4)
    root = union_layering([clique_layering(range(4 * t, 4 * t + 4)) for t in range(3)], 12)
    assert validate_flip_layering(g, root, 1) != []  # depth
    assert validate_flip_layering(Graph(12), root, 2) != []  # realization
    half = union_layering([clique_layering(range(4))], 4)
    assert validate_flip_layering(g, half, 2) != []  # span
    bad_leaf = FlipLayering(vertex=0, flips=((0, 0),))
    assert validate_flip_layering(Graph(1), bad_leaf, 1) != []
    empty_part = FlipLayering(
        parts=((0,), ()), flips=(), children=(FlipLayering(vertex=0),)
    )
    assert validate_flip_layering(Graph(1), empty_part, 1) != []


def test_flat_flip_scatters_at_root():
    g = clusters(9, 2)
    root = union_layering([clique_layering((2 * t, 2 * t + 1)) for t in range(9)], 18)
    ws, spec = dist_infty_flip_flat(g, range(18), root, 2)
    assert ws == tuple(2 * t for t in range(9))
    assert spec.num_parts == 1
    assert verify_break(g, flat_flip_witness(ws, spec))


def test_flat_flip_descends_into_hoarding_component():
    g = clusters(3, 4)
    root = union_layering([clique_layering(range(4 * t, 4 * t + 4)) for t in range(3)], 12)
    ws, spec = dist_infty_flip_flat(g, range(12), root, 2)
    assert ws == (0, 1, 2, 3)
    assert spec.num_parts == 2
    assert len(ws) ** (2 ** 2) >= 12
    assert verify_break(g, flat_flip_witness(ws, spec))


def test_flat_flip_on_complete_bipartite():
    g = Graph(8, [(i, 4 + j) for i in range(4) for j in range(4)])
    lay = FlipLayering(
        parts=(tuple(range(4)), tuple(range(4, 8))),
        flips=((0, 1),),
        children=tuple(FlipLayering(vertex=v) for v in range(8)),
    )
    assert validate_flip_layering(g, lay, 1) == []
    ws, spec = dist_infty_flip_flat(g, range(8), lay, 1)
    assert ws == tuple(range(8))
    assert apply_flip(g, spec).num_edges == 0


def test_flat_flip_single_clique():
    g = clusters(1, 16)
    ws, spec = dist_infty_flip_flat(g, range(16), clique_layering(range(16)), 1)
    assert ws == tuple(range(16))
    assert apply_flip(g, spec).num_edges == 0


def test_flat_flip_rejects_bad_layering():
    g = clusters(3, 4)
    root = union_layering([clique_layering(range(4 * t, 4 * t + 4)) for t in range(3)], 12)
    with pytest.raises(BreakError):
        dist_infty_flip_flat(g, range(12), root, 1)


# ---------------------------------------------------------------------------
# elimination forests


def test_forest_validator_accepts_balanced_path():
    assert validate_elimination_forest(path(7), [1, 3, 1, -1, 5, 3, 5], 3) == []


def test_forest_validator_rejects_defects():
    g = path(3)
    assert validate_elimination_forest(g, [1, 2, 0], 3) != []  # cycle
    assert validate_elimination_forest(g, [-1, 0], 3) != []  # wrong length
    assert validate_elimination_forest(g, [-1, -1, -1], 3) != []  # stray edges
    assert validate_elimination_forest(g, [1, 2, -1], 2) != []  # too deep
    assert validate_elimination_forest(g, [0, 0, 1], 3) != []  # self parent
    assert validate_elimination_forest(g, [9, 0, 1], 3) != []  # bad parent


def test_flat_deletion_on_balanced_path():
    g = path(7)
    s, ws = dist_infty_deletion_flat(g, range(7), [1, 3, 1, -1, 5, 3, 5], 3)
    assert s == (1, 3) and ws == (0, 2)
    assert verify_break(g, flat_deletion_witness(s, ws))


def test_flat_deletion_on_star():
    g = Graph(10, [(0, i) for i in range(1, 10)])
    s, ws = dist_infty_deletion_flat(g, range(10), [-1] + [0] * 9, 2)
    assert s == (0,) and ws == tuple(range(1, 10))
    assert verify_break(g, flat_deletion_witness(s, ws))


def test_flat_deletion_single_edge_floor():
    # the square-root schedule bottoms out at one survivor here
    g = Graph(2, [(0, 1)])
    s, ws = dist_infty_deletion_flat(g, [0, 1], [-1, 0], 2)
    assert s == (0,) and ws == (1,)


def test_flat_deletion_budget_matches_depth():
    g = path(7)
    s, ws = dist_infty_deletion_flat(g, range(7), [1, 3, 1, -1, 5, 3, 5], 3)
    assert len(s) <= 3


def test_flat_deletion_rejects_bad_forest():
    with pytest.raises(BreakError):
        dist_infty_deletion_flat(path(3), range(3), [-1, -1, -1], 3)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_flat_deletion_star_forest_fuzz(seed):
    import random

    rng = random.Random(seed)
    m = rng.randint(1, 4)
    sizes = [rng.randint(1, 5) for _ in range(m)]
    edges = []
    parents = []
    base = 0
    for s in sizes:
        parents.append(-1)
        for i in range(1, s + 1):
            parents.append(base)
            edges.append((base, base + i))
        base += s + 1
    g = Graph(base, edges)
    assert validate_elimination_forest(g, parents, 2) == []
    w = sorted(rng.sample(range(base), rng.randint(1, base)))
    s, ws = dist_infty_deletion_flat(g, w, parents, 2)
    assert verify_break(g, flat_deletion_witness(s, ws))
    assert len(ws) >= 1
