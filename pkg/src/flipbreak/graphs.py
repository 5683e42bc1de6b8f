"""Finite simple graphs over dense integer ids, with the small toolkit the
rest of the package leans on: neighborhoods, distances, atomic types, twin
classes, and GF(2) cut-rank.

Adjacency is stored as one int bitset per vertex, so edge tests and
neighborhood intersections are cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

INFINITY = math.inf


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable simple graph on vertices 0..n-1."""

    __slots__ = ("n", "rows")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        self.n = n
        self.rows: tuple[int, ...] = tuple(rows)

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and bool(self.rows[u] >> v & 1)

    def row(self, v: int) -> int:
        return self.rows[v]

    def neighbors(self, v: int) -> Iterator[int]:
        return bits(self.rows[v])

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            high = self.rows[u] >> (u + 1) << (u + 1)
            for v in bits(high):
                yield (u, v)

    @property
    def num_edges(self) -> int:
        return sum(self.rows[v].bit_count() for v in range(self.n)) // 2

    def vertices(self) -> range:
        return range(self.n)

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class ColoredGraph:
    """A graph together with one color id per vertex."""

    graph: Graph
    colors: tuple[int, ...]

    def __post_init__(self):
        if len(self.colors) != self.graph.n:
            raise ValueError("color map must be total")


@dataclass(frozen=True)
class BipartiteRepr:
    """A bipartite graph given by its two sides and the crossing edges.

    Side ids are arbitrary integers; they need not be dense.
    """

    left: frozenset[int]
    right: frozenset[int]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.left & self.right:
            raise ValueError("sides overlap")
        for u, v in self.edges:
            if u not in self.left or v not in self.right:
                raise ValueError(f"edge ({u},{v}) does not cross the sides")

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges


@dataclass(frozen=True)
class Induced:
    """An induced subgraph plus the id remapping that produced it."""

    graph: Graph
    old_of: tuple[int, ...]

    @property
    def new_of(self) -> dict[int, int]:
        return {old: new for new, old in enumerate(self.old_of)}


def induced_subgraph(g: Graph, w: Iterable[int]) -> Induced:
    """Restrict g to the vertex set w, renumbering to 0..|w|-1 in sorted order."""
    order = sorted(set(w))
    for v in order:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    pos = {v: i for i, v in enumerate(order)}
    edges = [
        (pos[u], pos[v])
        for u in order
        for v in bits(g.rows[u])
        if v in pos and u < v
    ]
    return Induced(Graph(len(order), edges), tuple(order))


def dist(g: Graph, a: Iterable[int], b: Iterable[int]) -> int | float:
    """Length of a shortest path between the vertex sets a and b.

    Returns 0 when the sets intersect and INFINITY when no path exists.
    """
    amask = mask_of(a)
    bmask = mask_of(b)
    if amask == 0 or bmask == 0:
        raise ValueError("dist requires non-empty sets")
    if amask & bmask:
        return 0
    seen = amask
    frontier = amask
    d = 0
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= g.rows[v]
        nxt &= ~seen
        d += 1
        if nxt & bmask:
            return d
        seen |= nxt
        frontier = nxt
    return INFINITY


def ball_mask(g: Graph, start: int, r: int) -> int:
    reach = start
    frontier = start
    for _ in range(r):
        nxt = 0
        for v in bits(frontier):
            nxt |= g.rows[v]
        nxt &= ~reach
        if not nxt:
            break
        reach |= nxt
        frontier = nxt
    return reach


def ball(g: Graph, v: int, r: int) -> set[int]:
    """Closed r-neighborhood of v."""
    if not (0 <= v < g.n):
        raise ValueError(f"vertex {v} out of range")
    return set(bits(ball_mask(g, 1 << v, r)))


def atomic_type(cg: ColoredGraph | Graph, tup: Sequence[int]):
    """Canonical equality/adjacency/color profile of a vertex tuple.

    Two tuples get equal values exactly when their pairwise equalities,
    pairwise adjacencies, and per-vertex colors all agree.
    """
    if isinstance(cg, ColoredGraph):
        g, colors = cg.graph, cg.colors
    else:
        g, colors = cg, None
    if not tup:
        raise ValueError("empty tuple")
    k = len(tup)
    eqs = tuple(tup[i] == tup[j] for i in range(k) for j in range(i + 1, k))
    adjs = tuple(g.has_edge(tup[i], tup[j]) for i in range(k) for j in range(i + 1, k))
    cols = tuple(0 if colors is None else colors[v] for v in tup)
    return (eqs, adjs, cols)


def atype_over(g: Graph, v: int, amask: int, colors: tuple[int, ...] | None = None):
    """Canonical type of the single vertex v over the vertex set given by amask.

    Two vertices get equal values exactly when no atomic formula with one
    parameter from the set can tell them apart: members of the set are only
    equivalent to themselves, outsiders are grouped by color and by their
    neighborhood inside the set.
    """
    c = 0 if colors is None else colors[v]
    if amask >> v & 1:
        return ("in", v, c)
    return ("out", c, g.rows[v] & amask)


def twin_classes(g: Graph) -> list[list[int]]:
    """Partition V into classes of the twin relation N(u)-{u,v} = N(v)-{u,v}."""
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u in range(g.n):
        for v in range(u + 1, g.n):
            keep = ~((1 << u) | (1 << v))
            if (g.rows[u] ^ g.rows[v]) & keep == 0:
                parent[find(u)] = find(v)
    groups: dict[int, list[int]] = {}
    for v in range(g.n):
        groups.setdefault(find(v), []).append(v)
    return sorted(groups.values())


def gf2_rank(rows: list[int]) -> int:
    rank = 0
    basis: list[int] = []
    for row in rows:
        for b in basis:
            row = min(row, row ^ b)
        if row:
            basis.append(row)
            basis.sort(reverse=True)
            rank += 1
    return rank


def gf2_cut_rank(g: Graph, a: Iterable[int], b: Iterable[int]) -> int:
    """Rank over GF(2) of the biadjacency matrix between disjoint sets a and b."""
    aset = sorted(set(a))
    bset = sorted(set(b))
    if set(aset) & set(bset):
        raise ValueError("sides must be disjoint")
    rows = []
    for u in aset:
        row = 0
        for j, v in enumerate(bset):
            if g.has_edge(u, v):
                row |= 1 << j
        rows.append(row)
    return gf2_rank(rows)


class EdgeListError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def read_edge_list(text: str) -> Graph:
    """Parse the plain text edge-list format.

    Line 1 holds `n m`, followed by m lines `u v` with 0 <= u < v < n.
    Blank lines and lines starting with # are ignored.
    """
    header: tuple[int, int] | None = None
    edges: list[tuple[int, int]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListError(line_no, f"expected two integers, got {raw!r}")
        try:
            x, y = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError(line_no, f"expected two integers, got {raw!r}") from None
        if header is None:
            if x < 0 or y < 0:
                raise EdgeListError(line_no, "negative header values")
            header = (x, y)
            continue
        n, _ = header
        if not (0 <= x < y < n):
            raise EdgeListError(line_no, f"edge ({x},{y}) must satisfy 0 <= u < v < n={n}")
        edges.append((x, y))
    if header is None:
        raise EdgeListError(1, "missing `n m` header")
    n, m = header
    if len(edges) != m:
        raise EdgeListError(1, f"header claims {m} edges, found {len(edges)}")
    return Graph(n, edges)


def write_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.num_edges}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"
