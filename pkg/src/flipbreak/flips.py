"""Flips: complement the edges between selected pairs of parts of a vertex
partition. The operation is an involution, and the original adjacency of any
pair is recoverable from the flipped graph plus the spec alone."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .graphs import Graph


def _canonical_parts(parts: Iterable[int]) -> tuple[tuple[int, ...], dict[int, int]]:
    rename: dict[int, int] = {}
    out = []
    for p in parts:
        if p not in rename:
            rename[p] = len(rename)
        out.append(rename[p])
    return tuple(out), rename


@dataclass(frozen=True)
class FlipSpec:
    """A total vertex partition plus a symmetric relation on its parts.

    Part ids are canonicalized by first occurrence, so equal specs compare
    equal and witness files diff cleanly.
    """

    parts: tuple[int, ...]
    flips: frozenset[tuple[int, int]]

    @staticmethod
    def make(parts: Iterable[int], flips: Iterable[tuple[int, int]]) -> "FlipSpec":
        canon, rename = _canonical_parts(parts)
        sym = set()
        k = len(set(canon))
        for p, q in flips:
            p2, q2 = rename.get(p, p), rename.get(q, q)
            if not (0 <= p2 < k and 0 <= q2 < k):
                raise ValueError(f"flip pair ({p},{q}) names a missing part")
            sym.add((min(p2, q2), max(p2, q2)))
        return FlipSpec(canon, frozenset(sym))

    @staticmethod
    def identity(n: int) -> "FlipSpec":
        return FlipSpec.make([0] * n, [])

    @property
    def num_parts(self) -> int:
        return len(set(self.parts))

    def part_of(self, v: int) -> int:
        return self.parts[v]

    def pair_flipped(self, u: int, v: int) -> bool:
        p, q = self.parts[u], self.parts[v]
        return (min(p, q), max(p, q)) in self.flips

    def to_json(self) -> str:
        return json.dumps(
            {"parts": list(self.parts), "flips": sorted(list(pq) for pq in self.flips)}
        )

    @staticmethod
    def from_json(text: str) -> "FlipSpec":
        data = json.loads(text)
        return FlipSpec.make(data["parts"], [tuple(pq) for pq in data["flips"]])


def apply_flip(g: Graph, s: FlipSpec) -> Graph:
    """Return g with the adjacency complemented between every part pair in s.flips."""
    if len(s.parts) != g.n:
        raise ValueError("partition must cover the vertex set")
    edges = []
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if g.has_edge(u, v) != s.pair_flipped(u, v):
                edges.append((u, v))
    return Graph(g.n, edges)


def recover_edge(g_flipped: Graph, s: FlipSpec, u: int, v: int) -> bool:
    """Adjacency of u,v in the graph that s was applied to."""
    if u == v:
        raise ValueError("recover_edge needs two distinct vertices")
    return g_flipped.has_edge(u, v) != s.pair_flipped(u, v)


def refine_flip(s1: FlipSpec, s2: FlipSpec) -> FlipSpec:
    """A single spec over the common refinement equivalent to applying s1 then s2.

    A pair of vertices ends up complemented exactly when it is complemented by
    an odd number of the two specs, so the refined relation is the symmetric
    difference pulled back to refined parts.
    """
    if len(s1.parts) != len(s2.parts):
        raise ValueError("specs must share a vertex set")
    combo = list(zip(s1.parts, s2.parts))
    canon, rename = _canonical_parts(combo)
    reps: dict[int, tuple[int, int]] = {}
    for pair, new in rename.items():
        reps[new] = pair
    flips = set()
    for p in reps:
        for q in reps:
            if p > q:
                continue
            (a1, a2), (b1, b2) = reps[p], reps[q]
            f1 = (min(a1, b1), max(a1, b1)) in s1.flips
            f2 = (min(a2, b2), max(a2, b2)) in s2.flips
            if f1 != f2:
                flips.add((p, q))
    return FlipSpec(canon, frozenset(flips))
