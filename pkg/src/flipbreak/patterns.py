"""Generators for the forbidden pattern families and induced-pattern search.

Crossings are subdivided-biclique shapes: two root families joined by
disjoint r-vertex paths, with kind-specific root attachment (star,
clique, halfgraph). Comparability grids are the fourth family. A
radius-r encoding plants an arbitrary bipartite graph inside a crossing
by keeping exactly the paths of its edges, then adding intra-layer
edges and applying a layer flip.

Vertex numbering is fixed: roots first (a_1..a_n then b_1..b_n), then
path vertices in lexicographic (i, j, t) order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .flips import FlipSpec, apply_flip
from .graphs import BipartiteRepr, Graph, induced_subgraph

CROSSING_KINDS = ("star", "clique", "halfgraph")

__all__ = [
    "CROSSING_KINDS",
    "Crossing",
    "ComparabilityGrid",
    "RadiusREncoding",
    "make_crossing",
    "make_comparability_grid",
    "layerwise_flip",
    "make_radius_r_encoding",
    "make_half_graph",
    "make_matching",
    "make_co_matching",
    "find_induced",
]


@dataclass(frozen=True)
class Crossing:
    """Roots a_1..a_n and b_1..b_n joined by disjoint r-vertex paths.

    Layers: 0 holds the a-roots, t in 1..r the t-th path vertices,
    r+1 the b-roots.
    """

    kind: str
    r: int
    order: int
    graph: Graph

    def a(self, i: int) -> int:
        return i - 1

    def b(self, j: int) -> int:
        return self.order + j - 1

    def p(self, i: int, j: int, t: int) -> int:
        n = self.order
        return 2 * n + ((i - 1) * n + (j - 1)) * self.r + (t - 1)

    def layer_of(self, v: int) -> int:
        n = self.order
        if v < n:
            return 0
        if v < 2 * n:
            return self.r + 1
        return (v - 2 * n) % self.r + 1

    def layers(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.r + 2)]
        for v in range(self.graph.n):
            out[self.layer_of(v)].append(v)
        return out


def make_crossing(kind: str, r: int, n: int) -> Crossing:
    """Build the star/clique/halfgraph r-crossing of order n."""
    if kind not in CROSSING_KINDS:
        raise ValueError(f"kind must be one of {CROSSING_KINDS}, got {kind!r}")
    if r < 1:
        raise ValueError("paths need at least one vertex")
    if n < 1:
        raise ValueError("order must be at least 1")
    total = 2 * n + r * n * n

    def a(i):
        return i - 1

    def b(j):
        return n + j - 1

    def p(i, j, t):
        return 2 * n + ((i - 1) * n + (j - 1)) * r + (t - 1)

    edges: set[tuple[int, int]] = set()

    def add(u, v):
        edges.add((min(u, v), max(u, v)))

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for t in range(1, r):
                add(p(i, j, t), p(i, j, t + 1))
    if kind == "halfgraph":
        for i in range(1, n + 1):
            for i2 in range(i, n + 1):
                for j in range(1, n + 1):
                    add(a(i), p(i2, j, 1))
        for j in range(1, n + 1):
            for j2 in range(j, n + 1):
                for i in range(1, n + 1):
                    add(b(j), p(i, j2, r))
    else:
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                add(a(i), p(i, j, 1))
                add(b(j), p(i, j, r))
        if kind == "clique":
            for i in range(1, n + 1):
                for j1, j2 in combinations(range(1, n + 1), 2):
                    add(p(i, j1, 1), p(i, j2, 1))
            for j in range(1, n + 1):
                for i1, i2 in combinations(range(1, n + 1), 2):
                    add(p(i1, j, r), p(i2, j, r))
    return Crossing(kind, r, n, Graph(total, sorted(edges)))


@dataclass(frozen=True)
class ComparabilityGrid:
    """n x n vertices, adjacent when sharing a row, a column, or agreeing
    on the strict order of both coordinates."""

    order: int
    graph: Graph

    def vertex_of(self, i: int, j: int) -> int:
        return (i - 1) * self.order + (j - 1)

    def coord_of(self, v: int) -> tuple[int, int]:
        return (v // self.order + 1, v % self.order + 1)


def make_comparability_grid(n: int) -> ComparabilityGrid:
    if n < 1:
        raise ValueError("order must be at least 1")
    edges = []
    coords = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    for x in range(len(coords)):
        i, j = coords[x]
        for y in range(x + 1, len(coords)):
            i2, j2 = coords[y]
            if i == i2 or j == j2 or ((i < i2) == (j < j2)):
                edges.append((x, y))
    return ComparabilityGrid(n, Graph(n * n, edges))


def layerwise_flip(c: Crossing, rel: Iterable[tuple[int, int]],
                   ) -> tuple[Graph, FlipSpec]:
    """Flip the crossing over its layer partition; rel names layer pairs."""
    parts = [c.layer_of(v) for v in range(c.graph.n)]
    spec = FlipSpec.make(parts, rel)
    return apply_flip(c.graph, spec), spec


@dataclass(frozen=True)
class RadiusREncoding:
    """A bipartite graph planted into a crossing: only the paths of its
    edges survive, plus optional intra-layer edges and a layer flip."""

    base: BipartiteRepr
    kind: str
    r: int
    graph: Graph
    old_of: tuple[int, ...]
    layer_parts: tuple[int, ...]
    flip: FlipSpec
    intra: frozenset[tuple[int, int]]


def make_radius_r_encoding(base: BipartiteRepr, kind: str, r: int,
                           intra_edges: Iterable[tuple[int, int]] = (),
                           layer_rel: Iterable[tuple[int, int]] = (),
                           ) -> RadiusREncoding:
    """Encode a balanced bipartite graph inside a crossing shape.

    Intra-layer edges are given in crossing numbering and added first,
    then the paths of non-edges are deleted, then the layer flip is
    applied to what survives.
    """
    left = sorted(base.left)
    right = sorted(base.right)
    if len(left) != len(right):
        raise ValueError("sides must have equal size")
    n = len(left)
    cross = make_crossing(kind, r, n)
    intra = set()
    for u, v in intra_edges:
        if u == v or cross.layer_of(u) != cross.layer_of(v):
            raise ValueError(f"({u},{v}) is not an intra-layer pair")
        intra.add((min(u, v), max(u, v)))
    with_intra = Graph(cross.graph.n, list(cross.graph.edges()) + sorted(intra))
    survivors = list(range(2 * n))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if base.has_edge(left[i - 1], right[j - 1]):
                survivors.extend(cross.p(i, j, t) for t in range(1, r + 1))
    ind = induced_subgraph(with_intra, survivors)
    layer_parts = tuple(cross.layer_of(v) for v in ind.old_of)
    spec = FlipSpec.make(layer_parts, layer_rel)
    final = apply_flip(ind.graph, spec)
    return RadiusREncoding(base, kind, r, final, ind.old_of, layer_parts,
                           spec, frozenset(intra))


def make_half_graph(n: int) -> Graph:
    """a_i adjacent to b_j exactly when i <= j; a's are 0..n-1."""
    if n < 1:
        raise ValueError("order must be at least 1")
    return Graph(2 * n, [(i, n + j) for i in range(n) for j in range(n) if i <= j])


def make_matching(n: int) -> Graph:
    if n < 1:
        raise ValueError("order must be at least 1")
    return Graph(2 * n, [(i, n + i) for i in range(n)])


def make_co_matching(n: int) -> Graph:
    if n < 1:
        raise ValueError("order must be at least 1")
    return Graph(2 * n, [(i, n + j) for i in range(n) for j in range(n) if i != j])


def find_induced(pattern: Graph, host: Graph, guard: int = 12,
                 force: bool = False) -> tuple[int, ...] | None:
    """Injective map preserving adjacency and non-adjacency, or None.

    Backtracking over pattern vertices in decreasing-degree order with
    degree pruning; host candidates scanned in ascending order, so the
    returned embedding is deterministic.
    """
    if pattern.n > guard and not force:
        raise ValueError(
            f"pattern has {pattern.n} vertices, guard is {guard}; "
            f"pass force=True to override")
    if pattern.n == 0:
        return ()
    order = sorted(pattern.vertices(), key=lambda u: (-pattern.degree(u), u))
    assign: dict[int, int] = {}
    used: set[int] = set()

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        u = order[pos]
        du = pattern.degree(u)
        for v in host.vertices():
            if v in used or host.degree(v) < du:
                continue
            ok = True
            for w, img in assign.items():
                if pattern.has_edge(u, w) != host.has_edge(v, img):
                    ok = False
                    break
            if ok:
                assign[u] = v
                used.add(v)
                if extend(pos + 1):
                    return True
                del assign[u]
                used.remove(v)
        return False

    if extend(0):
        return tuple(assign[u] for u in pattern.vertices())
    return None
