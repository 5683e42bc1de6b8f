"""Grids of vertex cells and the two kinds of certified insulation around them.

A grid is a column/row arrangement of pairwise disjoint vertex sets. An
insulator wraps a grid with a vertex partition, a flip relation, and a
side relation so that adjacencies through and around the grid are
controlled. Orderless insulators are ball towers around bottom-row
vertices in the flipped graph; ordered ones obey per-clause adjacency
rules plus an ordering witness on the bottom row.

Validators here report every violated clause with a concrete
counterexample, which is how all downstream searches certify output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .flips import FlipSpec, apply_flip, _canonical_parts
from .graphs import Graph, ball_mask, bits, mask_of

ORDERLESS = "orderless"
ORDERED = "ordered"

QF_TAGS = (
    "atp-diff",
    "not-atp-diff",
    "adjacent",
    "not-adjacent",
    "equal",
    "not-equal",
)

COMPARE_SYMBOLS = ("=", "!=", "<=", "<", ">=", ">")

__all__ = [
    "ORDERLESS",
    "ORDERED",
    "QF_TAGS",
    "COMPARE_SYMBOLS",
    "Grid",
    "O5Witness",
    "Insulator",
    "BiPrepattern",
    "MonoPrepattern",
    "eval_qf",
    "compare",
    "subgrid",
    "subinsulator",
    "merged_column_mask",
    "trivial_insulator",
    "validate_insulator",
    "validate_bi_prepattern",
    "validate_mono_prepattern",
    "insulates",
    "insulator_to_json",
    "insulator_from_json",
    "prepattern_to_json",
    "prepattern_from_json",
]


@dataclass(frozen=True)
class Grid:
    """Disjoint vertex cells arranged in columns (by index id) and rows 1..height.

    Column ids are strictly increasing ints; all positional notions
    (close, interior, left/right) refer to positions in index_seq, not
    to the raw ids. Cells are stored as bitmasks, empty cells allowed.
    """

    index_seq: tuple[int, ...]
    height: int
    cols: tuple[tuple[int, ...], ...]
    tag: str

    def __post_init__(self):
        if not self.index_seq:
            raise ValueError("index sequence must be non-empty")
        if any(a >= b for a, b in zip(self.index_seq, self.index_seq[1:])):
            raise ValueError("index sequence must be strictly increasing")
        if self.height < 1:
            raise ValueError("height must be at least 1")
        if self.tag not in (ORDERLESS, ORDERED):
            raise ValueError(f"unknown tag {self.tag!r}")
        if len(self.cols) != len(self.index_seq):
            raise ValueError("one column of cells per index required")
        seen = 0
        for col in self.cols:
            if len(col) != self.height:
                raise ValueError("every column needs height many cells")
            for mask in col:
                if mask & seen:
                    raise ValueError("cells must be pairwise disjoint")
                seen |= mask

    @property
    def n_cols(self) -> int:
        return len(self.index_seq)

    def position_of(self, i: int) -> int:
        try:
            return self.index_seq.index(i)
        except ValueError:
            raise KeyError(f"index {i} not in grid") from None

    def cell_mask(self, i: int, r: int) -> int:
        return self.cols[self.position_of(i)][r - 1]

    def cell(self, i: int, r: int) -> list[int]:
        return sorted(bits(self.cell_mask(i, r)))

    def column_mask_at(self, pos: int) -> int:
        out = 0
        for mask in self.cols[pos]:
            out |= mask
        return out

    def column_mask(self, i: int) -> int:
        return self.column_mask_at(self.position_of(i))

    def row_mask(self, r: int) -> int:
        out = 0
        for col in self.cols:
            out |= col[r - 1]
        return out

    @property
    def full_mask(self) -> int:
        out = 0
        for col in self.cols:
            for mask in col:
                out |= mask
        return out

    @property
    def interior_mask(self) -> int:
        out = self.full_mask
        out &= ~self.column_mask_at(0)
        out &= ~self.column_mask_at(self.n_cols - 1)
        out &= ~self.row_mask(self.height)
        return out

    def locate(self, v: int) -> tuple[int, int] | None:
        """(column position, row) of v, or None when v is outside the grid."""
        bit = 1 << v
        for pos, col in enumerate(self.cols):
            for r0, mask in enumerate(col):
                if mask & bit:
                    return (pos, r0 + 1)
        return None


@dataclass(frozen=True)
class O5Witness:
    """Bottom-row ordering witness: disjoint radius-r balls in a flip,
    one ball representative b per bottom vertex, and comparison vertices
    c per column, with E(c_i, b(v)) iff i cmp j for v in column j."""

    r: int
    flip: FlipSpec
    b_map: tuple[tuple[int, int], ...]
    c_list: tuple[tuple[int, int], ...]
    cmp: str

    def __post_init__(self):
        if self.cmp not in ("<=", ">="):
            raise ValueError(f"cmp must be <= or >=, got {self.cmp!r}")

    def b_of(self) -> dict[int, int]:
        return dict(self.b_map)

    def c_of(self) -> dict[int, int]:
        return dict(self.c_list)


@dataclass(frozen=True)
class Insulator:
    """Grid + vertex partition + flip relation + side relation.

    parts colors every vertex of the host graph; fset is the symmetric
    flip relation on part ids, rset the (ordered) side relation used by
    the horizontal adjacency clauses. roots optionally names, for each
    column, the insulated vertex sitting in its bottom cell.
    """

    grid: Grid
    parts: tuple[int, ...]
    fset: frozenset[tuple[int, int]]
    rset: frozenset[tuple[int, int]]
    o5: O5Witness | None = None
    roots: tuple[tuple[int, int], ...] | None = None

    @staticmethod
    def make(grid: Grid, parts: Sequence[int], fset: Iterable[tuple[int, int]],
             rset: Iterable[tuple[int, int]], o5: O5Witness | None = None,
             roots: Iterable[tuple[int, int]] | None = None) -> "Insulator":
        canon, rename = _canonical_parts(parts)
        k = len(set(canon))
        f2 = set()
        for p, q in fset:
            p2, q2 = rename.get(p, p), rename.get(q, q)
            if not (0 <= p2 < k and 0 <= q2 < k):
                raise ValueError(f"flip pair ({p},{q}) names a missing part")
            f2.add((min(p2, q2), max(p2, q2)))
        r2 = set()
        for p, q in rset:
            p2, q2 = rename.get(p, p), rename.get(q, q)
            if not (0 <= p2 < k and 0 <= q2 < k):
                raise ValueError(f"side pair ({p},{q}) names a missing part")
            r2.add((p2, q2))
        rt = tuple(sorted(roots)) if roots is not None else None
        return Insulator(grid, tuple(canon), frozenset(f2), frozenset(r2),
                         o5, rt)

    @property
    def tag(self) -> str:
        return self.grid.tag

    @property
    def cost(self) -> int:
        return len(set(self.parts))

    @property
    def height(self) -> int:
        return self.grid.height

    @property
    def flip(self) -> FlipSpec:
        return FlipSpec(self.parts, self.fset)

    def flipped(self, g: Graph) -> Graph:
        return apply_flip(g, self.flip)

    def part_of(self, v: int) -> int:
        return self.parts[v]

    def in_rset(self, pu: int, pv: int) -> bool:
        return (pu, pv) in self.rset

    def root_of(self) -> dict[int, int]:
        return dict(self.roots) if self.roots is not None else {}


@dataclass(frozen=True)
class BiPrepattern:
    """Vertices c[i][j] pairing two column families by first-column tests.

    Column rows[i] must be the first among rows where the qf test
    (alpha1 with parameters c[i][j], s1) has sim1-many solutions, and
    cols[j] the first among cols for (alpha2, s2, sim2)."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]
    c: tuple[tuple[int, ...], ...]
    alpha1: str
    s1: int
    sim1: str
    alpha2: str
    s2: int
    sim2: str

    @property
    def order(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class MonoPrepattern:
    """Vertices c[j] related to in-column vertices b[i][j'] by label order:
    E(c[j], b[i][j']) iff labels[j] cmp labels[j']."""

    cols: tuple[int, ...]
    labels: tuple[int, ...]
    c: tuple[int, ...]
    b: tuple[tuple[int, ...], ...]
    cmp: str

    @property
    def order(self) -> int:
        return len(self.cols)


def eval_qf(tag: str, g: Graph, y: int, x: int, s: int) -> bool:
    """Closed catalog of quantifier-free tests in one grid variable y."""
    if tag == "atp-diff":
        return (g.has_edge(x, y), x == y) != (g.has_edge(s, y), s == y)
    if tag == "not-atp-diff":
        return not eval_qf("atp-diff", g, y, x, s)
    if tag == "adjacent":
        return g.has_edge(x, y)
    if tag == "not-adjacent":
        return not g.has_edge(x, y)
    if tag == "equal":
        return x == y
    if tag == "not-equal":
        return x != y
    raise ValueError(f"unknown qf tag {tag!r}")


def compare(a: int, sym: str, b: int) -> bool:
    if sym == "=":
        return a == b
    if sym == "!=":
        return a != b
    if sym == "<=":
        return a <= b
    if sym == "<":
        return a < b
    if sym == ">=":
        return a >= b
    if sym == ">":
        return a > b
    raise ValueError(f"unknown comparison {sym!r}")


def merged_column_mask(grid: Grid, lo: int, hi: int) -> int:
    """Union of base columns with id in (lo, hi]; the merged-cell content
    depends only on these two ids, not on the rest of the subsequence."""
    out = 0
    for pos, i in enumerate(grid.index_seq):
        if lo < i <= hi:
            out |= grid.column_mask_at(pos)
    return out


def subgrid(grid: Grid, ids: Sequence[int]) -> Grid:
    """Restrict to a subsequence of at least two column ids.

    The result is indexed by all but the first id. Orderless grids keep
    their cells; ordered grids merge, into the cell of id i, every base
    cell strictly after the predecessor id and up to i.
    """
    ids = list(ids)
    if len(ids) < 2:
        raise ValueError("subgrid needs at least two indices")
    if any(a >= b for a, b in zip(ids, ids[1:])):
        raise ValueError("indices must be strictly increasing")
    positions = [grid.position_of(i) for i in ids]
    tail = ids[1:]
    cols = []
    if grid.tag == ORDERLESS:
        for pos in positions[1:]:
            cols.append(grid.cols[pos])
    else:
        for prev, cur in zip(ids, tail):
            merged = []
            for r in range(1, grid.height + 1):
                mask = 0
                for pos, i in enumerate(grid.index_seq):
                    if prev < i <= cur:
                        mask |= grid.cols[pos][r - 1]
                merged.append(mask)
            cols.append(tuple(merged))
    return Grid(tuple(tail), grid.height, tuple(cols), grid.tag)


def _transfer_o5(ins: Insulator, ids: list[int], sub: Grid) -> O5Witness | None:
    if ins.o5 is None:
        return None
    w = ins.o5
    bottom = sub.row_mask(1)
    b2 = tuple((v, b) for v, b in w.b_map if bottom >> v & 1)
    c_of = w.c_of()
    base = ins.grid.index_seq
    c2 = []
    for prev, cur in zip(ids, ids[1:]):
        if ins.tag == ORDERED and w.cmp == "<=":
            # the merged column (prev, cur] starts at prev's successor
            nxt = min(j for j in base if j > prev)
            c2.append((cur, c_of[nxt]))
        else:
            c2.append((cur, c_of[cur]))
    return O5Witness(w.r, w.flip, b2, tuple(c2), w.cmp)


def subinsulator(ins: Insulator, ids: Sequence[int]) -> Insulator:
    """Restrict an insulator to a subsequence of its column ids."""
    ids = list(ids)
    sub = subgrid(ins.grid, ids)
    o5 = _transfer_o5(ins, ids, sub)
    roots = None
    if ins.roots is not None:
        keep = set(ids[1:])
        roots = tuple((i, v) for i, v in ins.roots if i in keep)
    return Insulator(sub, ins.parts, ins.fset, ins.rset, o5, roots)


def trivial_insulator(g: Graph, w: Iterable[int]) -> Insulator:
    """Height-1 orderless insulator with one enumerated vertex per column."""
    order = sorted(set(w))
    if not order:
        raise ValueError("cannot insulate the empty set")
    for v in order:
        if not (0 <= v < g.n):
            raise ValueError(f"vertex {v} out of range")
    cols = tuple((1 << v,) for v in order)
    grid = Grid(tuple(range(1, len(order) + 1)), 1, cols, ORDERLESS)
    roots = tuple((i + 1, v) for i, v in enumerate(order))
    return Insulator.make(grid, [0] * g.n, [], [], None, roots)


def _fmt_cell(pos: int, r: int, grid: Grid) -> str:
    return f"column {grid.index_seq[pos]} row {r}"


def validate_insulator(g: Graph, ins: Insulator) -> list[str]:
    """All violated clauses, each with a concrete counterexample."""
    out: list[str] = []
    grid = ins.grid
    if len(ins.parts) != g.n:
        return [f"partition covers {len(ins.parts)} vertices, graph has {g.n}"]
    if grid.full_mask >> g.n:
        return ["grid mentions vertices outside the graph"]
    gp = ins.flipped(g)
    if grid.tag == ORDERLESS:
        _check_orderless(g, gp, ins, out)
    else:
        _check_rows_colored(ins, out)
        _check_rooted(gp, ins, out)
        _check_outside(g, ins, out)
        _check_adjacency(g, gp, ins, out)
        _check_ordering_witness(g, ins, out)
    return out


def _check_orderless(g: Graph, gp: Graph, ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    for pos, col in enumerate(grid.cols):
        if col[0].bit_count() != 1:
            out.append(
                f"ball-tower: bottom cell of {_fmt_cell(pos, 1, grid)} "
                f"holds {col[0].bit_count()} vertices instead of one")
            continue
        a = col[0].bit_length() - 1
        reach = col[0]
        for r in range(1, grid.height + 1):
            want = ball_mask(gp, 1 << a, r - 1)
            reach = 0
            for rr in range(r):
                reach |= col[rr]
            if reach != want:
                diff = next(bits(reach ^ want))
                out.append(
                    f"ball-tower: rows 1..{r} of {_fmt_cell(pos, r, grid)} "
                    f"differ from the flipped {r - 1}-ball around {a} at vertex {diff}")
                break


def _check_rows_colored(ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    row_of_part: dict[int, tuple[int, int]] = {}
    for r in range(1, grid.height + 1):
        for v in bits(grid.row_mask(r)):
            p = ins.parts[v]
            if p in row_of_part and row_of_part[p][0] != r:
                r0, v0 = row_of_part[p]
                out.append(
                    f"row-coloring: vertices {v0} (row {r0}) and {v} (row {r}) "
                    f"share part {p}")
                return
            row_of_part.setdefault(p, (r, v))


def _check_rooted(gp: Graph, ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    for pos in range(grid.n_cols):
        for r in range(2, grid.height + 1):
            below = grid.cols[pos][r - 2]
            for v in bits(grid.cols[pos][r - 1]):
                if not gp.rows[v] & below:
                    out.append(
                        f"rootedness: {v} in {_fmt_cell(pos, r, grid)} has no "
                        f"flipped-graph neighbor one row down")
                    return


def _check_outside(g: Graph, ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    inside = grid.full_mask
    interior = grid.interior_mask
    part_masks: dict[int, int] = {}
    for v in bits(interior):
        part_masks.setdefault(ins.parts[v], 0)
        part_masks[ins.parts[v]] |= 1 << v
    for v in range(g.n):
        if inside >> v & 1:
            continue
        for p, mask in sorted(part_masks.items()):
            hits = g.rows[v] & mask
            if hits != 0 and hits != mask:
                miss = next(bits(mask & ~hits))
                got = next(bits(hits))
                out.append(
                    f"outside-homogeneity: {v} is adjacent to {got} but not "
                    f"{miss}, both interior vertices of part {p}")
                return


def _check_adjacency(g: Graph, gp: Graph, ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    layout: dict[int, tuple[int, int]] = {}
    for pos in range(grid.n_cols):
        for r in range(1, grid.height + 1):
            for v in bits(grid.cols[pos][r - 1]):
                layout[v] = (pos, r)
    interior = grid.interior_mask
    for u, (pu, ru) in layout.items():
        if ru >= grid.height:
            continue
        for v, (pv, rv) in layout.items():
            if u == v:
                continue
            if (abs(ru - rv) > 1 and interior >> u & 1
                    and 0 < pv < grid.n_cols - 1):
                # first/last columns are frontier slack; only interior-facing
                # partners carry the far-row guarantee
                if gp.has_edge(u, v):
                    out.append(
                        f"far-rows: interior {u} ({_fmt_cell(pu, ru, grid)}) "
                        f"flip-adjacent to {v} ({_fmt_cell(pv, rv, grid)})")
                    return
            if (pv < pu and rv == ru - 1) or (pv > pu and rv == ru + 1):
                if gp.has_edge(u, v):
                    out.append(
                        f"stair-step: {u} ({_fmt_cell(pu, ru, grid)}) "
                        f"flip-adjacent to {v} ({_fmt_cell(pv, rv, grid)})")
                    return
            if pv > pu + 1 and rv in (ru, ru - 1):
                want = ins.in_rset(ins.parts[u], ins.parts[v])
                if g.has_edge(u, v) != want:
                    out.append(
                        f"right-relation: {u} ({_fmt_cell(pu, ru, grid)}) vs "
                        f"{v} ({_fmt_cell(pv, rv, grid)}): edge={g.has_edge(u, v)} "
                        f"but side relation says {want}")
                    return
            if pv < pu - 1 and rv in (ru, ru + 1):
                want = ins.in_rset(ins.parts[v], ins.parts[u])
                if g.has_edge(u, v) != want:
                    out.append(
                        f"left-relation: {u} ({_fmt_cell(pu, ru, grid)}) vs "
                        f"{v} ({_fmt_cell(pv, rv, grid)}): edge={g.has_edge(u, v)} "
                        f"but side relation says {want}")
                    return


def _check_ordering_witness(g: Graph, ins: Insulator, out: list[str]) -> None:
    grid = ins.grid
    w = ins.o5
    if w is None:
        out.append("ordering: witness missing on an ordered insulator")
        return
    if not (0 <= w.r < grid.height):
        out.append(f"ordering: radius {w.r} not below height {grid.height}")
        return
    if w.flip.num_parts > ins.cost:
        out.append(
            f"ordering: witness flip uses {w.flip.num_parts} parts, "
            f"cost bound is {ins.cost}")
        return
    if len(w.flip.parts) != g.n:
        out.append("ordering: witness flip partition does not cover the graph")
        return
    h = apply_flip(g, w.flip)
    bottom = [(pos, v) for pos in range(grid.n_cols)
              for v in bits(grid.cols[pos][0])]
    balls = {v: ball_mask(h, 1 << v, w.r) for _, v in bottom}
    for idx in range(len(bottom)):
        for jdx in range(idx + 1, len(bottom)):
            u, v = bottom[idx][1], bottom[jdx][1]
            if balls[u] & balls[v]:
                shared = next(bits(balls[u] & balls[v]))
                out.append(
                    f"ordering: witness balls of bottom vertices {u} and {v} "
                    f"share {shared}")
                return
    b_of = w.b_of()
    c_of = w.c_of()
    for _, v in bottom:
        if v not in b_of:
            out.append(f"ordering: bottom vertex {v} has no ball representative")
            return
        if not balls[v] >> b_of[v] & 1:
            out.append(
                f"ordering: representative {b_of[v]} of {v} is outside its "
                f"radius-{w.r} witness ball")
            return
    for i in grid.index_seq:
        if i not in c_of:
            out.append(f"ordering: column {i} has no comparison vertex")
            return
    for ipos, i in enumerate(grid.index_seq):
        for jpos, _ in enumerate(grid.index_seq):
            for v in bits(grid.cols[jpos][0]):
                want = compare(ipos, w.cmp, jpos)
                got = g.has_edge(c_of[i], b_of[v])
                if got != want:
                    out.append(
                        f"ordering: E(c[{i}], b[{v}]) = {got}, expected "
                        f"{ipos} {w.cmp} {jpos} = {want}")
                    return


def insulates(ins: Insulator, w: Iterable[int]) -> bool:
    """True when w maps bijectively onto columns via bottom-cell membership."""
    grid = ins.grid
    wset = set(w)
    if len(wset) != grid.n_cols:
        return False
    used = set()
    for v in wset:
        loc = grid.locate(v)
        if loc is None or loc[1] != 1 or loc[0] in used:
            return False
        used.add(loc[0])
    return True


def validate_bi_prepattern(g: Graph, ins: Insulator, bp: BiPrepattern) -> list[str]:
    out: list[str] = []
    grid = ins.grid
    t = bp.order
    if len(bp.cols) != t or len(bp.c) != t or any(len(row) != t for row in bp.c):
        return ["shape: need t rows and t cols of pairing vertices"]
    if t == 0:
        return ["shape: empty prepattern"]
    for seq in (bp.rows, bp.cols):
        for i in seq:
            if i not in grid.index_seq:
                return [f"shape: column id {i} not in the insulator"]
        if any(a >= b for a, b in zip(seq, seq[1:])):
            return ["shape: column ids must be strictly increasing"]
    if bp.alpha1 not in QF_TAGS or bp.alpha2 not in QF_TAGS:
        return [f"shape: unknown qf tag {bp.alpha1!r} or {bp.alpha2!r}"]
    if bp.sim1 not in ("=", "!=") or bp.sim2 not in ("=", "!="):
        return [f"shape: sim symbols must be = or !=, got {bp.sim1!r}, {bp.sim2!r}"]

    def first_hit(seq, alpha, s, sim, c):
        for i in seq:
            sol = any(eval_qf(alpha, g, y, c, s)
                      for y in bits(grid.column_mask(i)))
            if (sol and sim == "!=") or (not sol and sim == "="):
                return i
        return None

    for x in range(t):
        for y in range(t):
            c = bp.c[x][y]
            if not (0 <= c < g.n):
                return [f"pairing: vertex {c} out of range"]
            hit1 = first_hit(bp.rows, bp.alpha1, bp.s1, bp.sim1, c)
            if hit1 != bp.rows[x]:
                out.append(
                    f"pairing: c[{x}][{y}]={c} first meets the row test at "
                    f"{hit1}, expected {bp.rows[x]}")
                return out
            hit2 = first_hit(bp.cols, bp.alpha2, bp.s2, bp.sim2, c)
            if hit2 != bp.cols[y]:
                out.append(
                    f"pairing: c[{x}][{y}]={c} first meets the col test at "
                    f"{hit2}, expected {bp.cols[y]}")
                return out
    return out


def validate_mono_prepattern(g: Graph, ins: Insulator, mp: MonoPrepattern) -> list[str]:
    grid = ins.grid
    t = mp.order
    if not (len(mp.labels) == len(mp.c) == t and len(mp.b) == t):
        return ["shape: need t labels, t pairing vertices, t columns of b"]
    if any(len(row) != t for row in mp.b):
        return ["shape: b must be a t x t table"]
    if t == 0:
        return ["shape: empty prepattern"]
    if mp.cmp not in COMPARE_SYMBOLS:
        return [f"shape: unknown comparison {mp.cmp!r}"]
    if any(a >= b for a, b in zip(mp.labels, mp.labels[1:])):
        return ["shape: labels must be strictly increasing"]
    for i in mp.cols:
        if i not in grid.index_seq:
            return [f"shape: column id {i} not in the insulator"]
    for x, i in enumerate(mp.cols):
        colmask = grid.column_mask(i)
        for y in range(t):
            if not colmask >> mp.b[x][y] & 1:
                return [
                    f"membership: b[{x}][{y}]={mp.b[x][y]} is not in column {i}"]
    for x in range(t):
        for j in range(t):
            for jp in range(t):
                want = compare(mp.labels[j], mp.cmp, mp.labels[jp])
                got = g.has_edge(mp.c[j], mp.b[x][jp])
                if got != want:
                    return [
                        f"order: E(c[{j}], b[{x}][{jp}]) = {got}, expected "
                        f"{mp.labels[j]} {mp.cmp} {mp.labels[jp]} = {want}"]
    return []


def insulator_to_json(ins: Insulator) -> str:
    grid = ins.grid
    data = {
        "indexSeq": list(grid.index_seq),
        "height": grid.height,
        "cells": [[sorted(bits(mask)) for mask in col] for col in grid.cols],
        "tag": grid.tag,
        "parts": list(ins.parts),
        "F": sorted(list(pq) for pq in ins.fset),
        "R": sorted(list(pq) for pq in ins.rset),
        "o5Witness": None,
        "roots": sorted(list(iv) for iv in ins.roots) if ins.roots is not None else None,
    }
    if ins.o5 is not None:
        w = ins.o5
        data["o5Witness"] = {
            "r": w.r,
            "flipSpec": {"parts": list(w.flip.parts),
                         "flips": sorted(list(pq) for pq in w.flip.flips)},
            "bMap": sorted(list(vb) for vb in w.b_map),
            "cList": sorted(list(ic) for ic in w.c_list),
            "cmp": w.cmp,
        }
    return json.dumps(data, sort_keys=True)


def insulator_from_json(text: str) -> Insulator:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"bad insulator json: {e}") from None
    try:
        cols = tuple(
            tuple(mask_of(cell) for cell in col) for col in data["cells"]
        )
        grid = Grid(tuple(data["indexSeq"]), data["height"], cols, data["tag"])
        o5 = None
        if data.get("o5Witness") is not None:
            w = data["o5Witness"]
            o5 = O5Witness(
                w["r"],
                FlipSpec.make(w["flipSpec"]["parts"],
                              [tuple(pq) for pq in w["flipSpec"]["flips"]]),
                tuple(tuple(vb) for vb in w["bMap"]),
                tuple(tuple(ic) for ic in w["cList"]),
                w["cmp"],
            )
        roots = None
        if data.get("roots") is not None:
            roots = [tuple(iv) for iv in data["roots"]]
        return Insulator.make(grid, data["parts"],
                              [tuple(pq) for pq in data["F"]],
                              [tuple(pq) for pq in data["R"]],
                              o5, roots)
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"bad insulator json: {e!r}") from None


def prepattern_to_json(p: BiPrepattern | MonoPrepattern) -> str:
    if isinstance(p, BiPrepattern):
        data = {
            "kind": "bi",
            "rows": list(p.rows),
            "cols": list(p.cols),
            "c": [list(row) for row in p.c],
            "alpha1": p.alpha1, "s1": p.s1, "sim1": p.sim1,
            "alpha2": p.alpha2, "s2": p.s2, "sim2": p.sim2,
        }
    else:
        data = {
            "kind": "mono",
            "cols": list(p.cols),
            "labels": list(p.labels),
            "c": list(p.c),
            "b": [list(row) for row in p.b],
            "cmp": p.cmp,
        }
    return json.dumps(data, sort_keys=True)


def prepattern_from_json(text: str) -> BiPrepattern | MonoPrepattern:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"bad prepattern json: {e}") from None
    try:
        if data["kind"] == "bi":
            return BiPrepattern(
                tuple(data["rows"]), tuple(data["cols"]),
                tuple(tuple(row) for row in data["c"]),
                data["alpha1"], data["s1"], data["sim1"],
                data["alpha2"], data["s2"], data["sim2"])
        if data["kind"] == "mono":
            return MonoPrepattern(
                tuple(data["cols"]), tuple(data["labels"]),
                tuple(data["c"]),
                tuple(tuple(row) for row in data["b"]), data["cmp"])
        raise ValueError(f"unknown prepattern kind {data['kind']!r}")
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"bad prepattern json: {e!r}") from None
