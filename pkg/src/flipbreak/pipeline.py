"""Insulator growth: sampling maps, witness extraction, and row building.

The machinery in this module raises the height of an insulator one row
at a time. Each round either produces the new row together with a
refined partition and flip/side relations, or it exits early with a
certified pattern (a bi- or mono-prepattern, see the insulator module)
that explains why no further structure exists. The glue between the two
outcomes is a sampling witness: a small set of reference vertices
outside the grid such that every vertex of the graph relates to the
grid columns like one reference on its left and one on its right, up to
a bounded exceptional window.

All searches scan vertices and column ids in ascending order, so every
function here is deterministic. Witnesses carry enough data to be
re-checked from scratch by the validate_* functions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .graphs import Graph, BipartiteRepr, ball_mask, bits, mask_of
from .insulators import (
    ORDERED,
    ORDERLESS,
    BiPrepattern,
    Grid,
    Insulator,
    MonoPrepattern,
    O5Witness,
    compare,
    subinsulator,
    trivial_insulator,
    validate_bi_prepattern,
    validate_mono_prepattern,
)
from .ramsey import doov_extract, ramsey_sets

__all__ = [
    "PipelineError",
    "agree",
    "SamplingWitness",
    "NewVertex",
    "Orderable",
    "InsulationResult",
    "validate_sampling",
    "validate_sample_set",
    "validate_new_vertex",
    "validate_orderable",
    "extract_sample_vertex",
    "build_sample_set",
    "mono_prepattern_from_samples",
    "symmetric_sampling",
    "grow_orderless",
    "grow_ordered",
    "orderable_to_ordered",
    "insulate",
    "trace_to_jsonl",
]

# Desk-scale caps standing in for the astronomically large schedules the
# guarantees are stated with: columns surviving preprocessing, and the
# sample-set size at which collection stops and a mono prepattern is
# assembled instead.
_COLUMN_CAP = 10
_SAMPLE_CAP = 8


class PipelineError(RuntimeError):
    """A growth round ran out of columns, samples, or candidates."""


def agree(g: Graph, v: int, s: int, mask: int) -> bool:
    """True when v and s relate identically to the vertex set mask.

    Identically means: same adjacencies into mask and same membership
    status. A vertex inside the mask never agrees with a different one,
    since membership alone separates them.
    """
    if v == s:
        return True
    if (mask >> v | mask >> s) & 1:
        return False
    return (g.rows[v] ^ g.rows[s]) & mask == 0


# ---------------------------------------------------------------------------
# witnesses


@dataclass(frozen=True)
class SamplingWitness:
    """Total maps certifying that a few outside vertices mimic everyone.

    For every vertex v of the graph, v relates to all columns left of
    ex(v) exactly like s_less(v), and to all columns with id at least
    ex(v) + margin exactly like s_greater(v). The margin is measured in
    id units, not positions.
    """

    samples: tuple[int, ...]
    margin: int
    ex: tuple[tuple[int, int], ...]
    s_less: tuple[tuple[int, int], ...]
    s_greater: tuple[tuple[int, int], ...]

    def ex_of(self) -> dict[int, int]:
        return dict(self.ex)

    def sl_of(self) -> dict[int, int]:
        return dict(self.s_less)

    def sg_of(self) -> dict[int, int]:
        return dict(self.s_greater)

    @property
    def symmetric(self) -> bool:
        return self.s_less == self.s_greater


@dataclass(frozen=True)
class NewVertex:
    """A vertex fit to join the sample set: outside the grid and in
    disagreement with every current sample on every column."""

    vertex: int


@dataclass(frozen=True)
class Orderable:
    """Per-column witnesses that the bottom row is linearly comparable.

    b_map picks one in-column vertex per column id, c_map one probe
    vertex per column id, and E(c_i, b_j) holds exactly when the column
    positions satisfy cmp.
    """

    b_map: tuple[tuple[int, int], ...]
    c_map: tuple[tuple[int, int], ...]
    cmp: str

    def b_of(self) -> dict[int, int]:
        return dict(self.b_map)

    def c_of(self) -> dict[int, int]:
        return dict(self.c_map)


@dataclass(frozen=True)
class InsulationResult:
    """Outcome of insulate: the final insulator, which requested
    vertices still root a column, an optional early-exit pattern, and
    the per-round trace."""

    insulator: Insulator
    w_star: tuple[int, ...]
    prepattern: BiPrepattern | MonoPrepattern | None
    trace: tuple[dict, ...]


def _left_right_masks(grid: Grid, ex_id: int, margin: int) -> tuple[int, int]:
    left = 0
    right = 0
    for pos, i in enumerate(grid.index_seq):
        if i < ex_id:
            left |= grid.column_mask_at(pos)
        elif i >= ex_id + margin:
            right |= grid.column_mask_at(pos)
    return left, right


def validate_sampling(g: Graph, ins: Insulator, w: SamplingWitness) -> list[str]:
    """All violated sampling conditions, each with a counterexample."""
    grid = ins.grid
    if list(w.samples) != sorted(set(w.samples)):
        return ["samples must be strictly increasing"]
    for s in w.samples:
        if not (0 <= s < g.n):
            return [f"sample {s} out of range"]
    if mask_of(w.samples) & grid.full_mask:
        bad = next(bits(mask_of(w.samples) & grid.full_mask))
        return [f"sample {bad} sits inside the grid"]
    if w.margin < 1:
        return [f"margin {w.margin} below one"]
    ex, sl, sg = w.ex_of(), w.sl_of(), w.sg_of()
    sset = set(w.samples)
    ids = set(grid.index_seq)
    for v in range(g.n):
        if v not in ex or v not in sl or v not in sg:
            return [f"maps must cover every vertex, {v} is missing"]
        if ex[v] not in ids:
            return [f"exceptional id {ex[v]} of {v} is not a column"]
        if sl[v] not in sset or sg[v] not in sset:
            return [f"side samples of {v} are not samples"]
    for v in range(g.n):
        left, right = _left_right_masks(grid, ex[v], w.margin)
        if not agree(g, v, sl[v], left):
            return [f"vertex {v} deviates from {sl[v]} left of column {ex[v]}"]
        if not agree(g, v, sg[v], right):
            return [
                f"vertex {v} deviates from {sg[v]} from column "
                f"{ex[v] + w.margin} on"]
    return []


def validate_sample_set(g: Graph, ins: Insulator, samples: list[int]) -> list[str]:
    """Check samples are outside the grid and pairwise distinguishable
    on every column."""
    grid = ins.grid
    if list(samples) != sorted(set(samples)):
        return ["samples must be strictly increasing"]
    for s in samples:
        if not (0 <= s < g.n):
            return [f"sample {s} out of range"]
        if grid.full_mask >> s & 1:
            return [f"sample {s} sits inside the grid"]
    for a in range(len(samples)):
        for b in range(a + 1, len(samples)):
            for pos in range(grid.n_cols):
                if agree(g, samples[a], samples[b], grid.column_mask_at(pos)):
                    return [
                        f"samples {samples[a]} and {samples[b]} agree on "
                        f"column {grid.index_seq[pos]}"]
    return []


def validate_new_vertex(g: Graph, ins: Insulator, nv: NewVertex,
                        samples: list[int]) -> list[str]:
    v = nv.vertex
    grid = ins.grid
    if not (0 <= v < g.n):
        return [f"vertex {v} out of range"]
    if grid.full_mask >> v & 1:
        return [f"vertex {v} sits inside the grid"]
    if v in samples:
        return [f"vertex {v} is already a sample"]
    for s in samples:
        for pos in range(grid.n_cols):
            if agree(g, v, s, grid.column_mask_at(pos)):
                return [
                    f"vertex {v} agrees with sample {s} on column "
                    f"{grid.index_seq[pos]}"]
    return []


def validate_orderable(g: Graph, ins: Insulator, w: Orderable) -> list[str]:
    grid = ins.grid
    if ins.tag != ORDERLESS:
        return ["orderable witnesses apply to orderless insulators only"]
    if w.cmp not in ("<=", ">="):
        return [f"cmp must be <= or >=, got {w.cmp!r}"]
    b, c = w.b_of(), w.c_of()
    if set(b) != set(grid.index_seq) or set(c) != set(grid.index_seq):
        return ["maps must cover exactly the column ids"]
    for i in grid.index_seq:
        if not (0 <= c[i] < g.n):
            return [f"probe {c[i]} of column {i} out of range"]
        if not grid.column_mask(i) >> b[i] & 1:
            return [f"representative {b[i]} is not in column {i}"]
    seq = grid.index_seq
    for ipos, i in enumerate(seq):
        for jpos, j in enumerate(seq):
            want = compare(ipos, w.cmp, jpos)
            if g.has_edge(c[i], b[j]) != want:
                return [
                    f"E(c[{i}], b[{j}]) = {not want}, expected positions "
                    f"{ipos} {w.cmp} {jpos}"]
    return []


# ---------------------------------------------------------------------------
# per-column agreement profiles and margin maps


def _column_profiles(g: Graph, grid: Grid, samples: list[int]) -> list[list[int]]:
    """prof[pos][v]: bit j set when v agrees with samples[j] over the
    column at pos."""
    prof = []
    for pos in range(grid.n_cols):
        col = grid.column_mask_at(pos)
        srow = [g.rows[s] & col for s in samples]
        s_in = [col >> s & 1 for s in samples]
        here = [0] * g.n
        for v in range(g.n):
            rv = g.rows[v] & col
            v_in = col >> v & 1
            m = 0
            for j, s in enumerate(samples):
                if v == s or (not v_in and not s_in[j] and rv == srow[j]):
                    m |= 1 << j
            here[v] = m
        prof.append(here)
    return prof


def _right_bounds(seq: tuple[int, ...], margin: int) -> list[int]:
    # first position whose id clears the margin window, per candidate
    out = []
    for e in range(len(seq)):
        p = e
        while p < len(seq) and seq[p] < seq[e] + margin:
            p += 1
        out.append(p)
    return out


def _asym_maps(g: Graph, grid: Grid, samples: list[int], margin: int):
    """Maximal-window margin maps for every vertex, or the first vertex
    with no feasible window. Returns ((ex, s_less, s_greater), None) or
    (None, vertex)."""
    seq = grid.index_seq
    npos = len(seq)
    prof = _column_profiles(g, grid, samples)
    full = (1 << len(samples)) - 1
    rb = _right_bounds(seq, margin)
    ex: dict[int, int] = {}
    sl: dict[int, int] = {}
    sg: dict[int, int] = {}
    for v in range(g.n):
        pref = [full] * (npos + 1)
        for k in range(npos):
            pref[k + 1] = pref[k] & prof[k][v]
        suf = [full] * (npos + 1)
        for k in range(npos - 1, -1, -1):
            suf[k] = suf[k + 1] & prof[k][v]
        found = False
        for e in range(npos - 1, -1, -1):
            a, b = pref[e], suf[rb[e]]
            if a and b:
                ex[v] = seq[e]
                sl[v] = samples[(a & -a).bit_length() - 1]
                sg[v] = samples[(b & -b).bit_length() - 1]
                found = True
                break
        if not found:
            return None, v
    return (ex, sl, sg), None


def _sym_maps(g: Graph, grid: Grid, samples: list[int]):
    """Single-sample margin-1 maps, or the first vertex needing two
    different side samples."""
    seq = grid.index_seq
    npos = len(seq)
    prof = _column_profiles(g, grid, samples)
    full = (1 << len(samples)) - 1
    ex: dict[int, int] = {}
    sm: dict[int, int] = {}
    for v in range(g.n):
        pref = [full] * (npos + 1)
        for k in range(npos):
            pref[k + 1] = pref[k] & prof[k][v]
        suf = [full] * (npos + 1)
        for k in range(npos - 1, -1, -1):
            suf[k] = suf[k + 1] & prof[k][v]
        found = False
        for e in range(npos - 1, -1, -1):
            m = pref[e] & suf[e + 1]
            if m:
                ex[v] = seq[e]
                sm[v] = samples[(m & -m).bit_length() - 1]
                found = True
                break
        if not found:
            return None, v
    return (ex, sm), None


def _witness(samples: list[int], margin: int, maps) -> SamplingWitness:
    ex, sl, sg = maps
    return SamplingWitness(
        tuple(samples), margin,
        tuple(sorted(ex.items())),
        tuple(sorted(sl.items())),
        tuple(sorted(sg.items())))


# ---------------------------------------------------------------------------
# column preprocessing


def _cap_spread(items: list[int], cap: int) -> list[int]:
    """Evenly spaced subsequence keeping both endpoints."""
    n = len(items)
    if n <= cap:
        return list(items)
    return [items[round(k * (n - 1) / (cap - 1))] for k in range(cap)]


def _realized_coloring(g: Graph, grid: Grid, samples: list[int],
                       tailpos: list[int], merged: bool):
    """Color a subset of candidate columns by the set of per-slot
    agreement vectors its restriction realizes across all vertices.

    Homogenizing with this coloring makes every same-size restriction
    look alike to the margin and emptiness tests downstream. Merged
    grids take ranges between consecutive picks, plain ones take the
    picked columns themselves.
    """
    base = _column_profiles(g, grid, samples)
    full = (1 << len(samples)) - 1
    cache: dict[tuple[int, int], list[int]] = {}

    def span(a: int, b: int) -> list[int]:
        got = cache.get((a, b))
        if got is None:
            got = [full] * g.n
            for p in range(a + 1, b + 1):
                col = base[p]
                got = [x & y for x, y in zip(got, col)]
            cache[(a, b)] = got
        return got

    def color(tup) -> frozenset:
        ps = [tailpos[q] for q in tup]
        if merged:
            slots = [span(0, ps[0])]
            slots += [span(a, b) for a, b in zip(ps, ps[1:])]
        else:
            slots = [base[p] for p in ps]
        return frozenset(zip(*slots))

    return color


# ---------------------------------------------------------------------------
# witness extraction


def extract_sample_vertex(g: Graph, ins: Insulator, samples: list[int],
                          t: int):
    """One extraction round: restrict the columns, then hand back either
    a margin-2 sampling witness, a vertex extending the sample set, or a
    bi-prepattern of order t.

    Returns (ids, outcome); the outcome holds on the restriction of ins
    to ids. Raises PipelineError when every restriction is exhausted.
    """
    grid = ins.grid
    if mask_of(samples) & grid.full_mask:
        raise ValueError("samples must live outside the insulator")
    seq = list(grid.index_seq)
    if len(seq) < 2:
        raise PipelineError("cannot restrict a single-column insulator")
    head, tail = seq[0], seq[1:]
    tail = _cap_spread(tail, _COLUMN_CAP)
    merged = ins.tag == ORDERED
    for arity in (6, 4 * t):
        if len(tail) > arity:
            tailpos = [grid.position_of(i) for i in tail]
            color = _realized_coloring(g, grid, samples, tailpos, merged)
            sel = ramsey_sets(1 << 30, arity, len(tail), color)
            if len(sel) >= 2:
                tail = [tail[q] for q in sel]
    return _extract_on(g, ins, [head] + tail, samples, t)


def _extract_on(g: Graph, ins: Insulator, ids: list[int], samples: list[int],
                t: int):
    sub = subinsulator(ins, ids)
    gd = sub.grid
    if samples:
        maps, _ = _asym_maps(g, gd, samples, 2)
        if maps is not None:
            return ids, _witness(samples, 2, maps)
        if len(ids) >= 6:
            ids2 = ids[2:-2]
            maps2, _ = _asym_maps(g, subinsulator(ins, ids2).grid, samples, 2)
            if maps2 is not None:
                return ids2, _witness(samples, 2, maps2)
        smask = mask_of(samples)
        prof = _column_profiles(g, gd, samples)
        best = None
        for u in range(g.n):
            if (ins.grid.full_mask | smask) >> u & 1:
                continue
            empt = [i for pos, i in enumerate(gd.index_seq)
                    if prof[pos][u] == 0]
            if len(empt) >= 2:
                key = (-len(empt), u)
                if best is None or key < best[0]:
                    best = (key, u, empt)
        if best is not None:
            _, u, empt = best
            return [ids[0]] + empt, NewVertex(u)
        if gd.n_cols >= 4 * t - 1:
            got = _try_bi_prepattern(g, ins, ids, samples, t)
            if got is not None:
                return got
    else:
        for u in range(g.n):
            if not ins.grid.full_mask >> u & 1:
                return ids, NewVertex(u)
        raise PipelineError("the grid covers the whole graph")
    if len(ids) > 2:
        return _extract_on(g, ins, ids[:max(2, (len(ids) + 1) // 2)],
                           samples, t)
    raise PipelineError("sample extraction exhausted every restriction")


def _try_bi_prepattern(g: Graph, ins: Insulator, ids: list[int],
                       samples: list[int], t: int):
    """Search two samples and two polarities whose first-hit tests pair
    t row columns with t col columns through a full t x t vertex table."""
    sub = subinsulator(ins, ids)
    gd = sub.grid
    tailids = gd.index_seq
    rows = [tailids[2 * x] for x in range(t)]
    cols = [tailids[2 * t + 2 * y] for y in range(t)]
    cmask = {i: gd.column_mask(i) for i in rows + cols}

    def first_hit(seq, s, sim, c):
        for i in seq:
            sol = not agree(g, c, s, cmask[i])
            if (sol and sim == "!=") or (not sol and sim == "="):
                return i
        return None

    rpos = {i: x for x, i in enumerate(rows)}
    cpos = {i: y for y, i in enumerate(cols)}
    for s1 in samples:
        for s2 in samples:
            for sim1 in ("=", "!="):
                for sim2 in ("=", "!="):
                    table = [[None] * t for _ in range(t)]
                    missing = t * t
                    for c in range(g.n):
                        h1 = first_hit(rows, s1, sim1, c)
                        h2 = first_hit(cols, s2, sim2, c)
                        if h1 is None or h2 is None:
                            continue
                        x, y = rpos[h1], cpos[h2]
                        if table[x][y] is None:
                            table[x][y] = c
                            missing -= 1
                            if missing == 0:
                                break
                    if missing:
                        continue
                    bp = BiPrepattern(
                        tuple(rows), tuple(cols),
                        tuple(tuple(r) for r in table),
                        "atp-diff", s1, sim1, "atp-diff", s2, sim2)
                    if not validate_bi_prepattern(g, sub, bp):
                        return ids, bp
    return None


# ---------------------------------------------------------------------------
# sample-set collection


def build_sample_set(g: Graph, ins: Insulator, t: int):
    """Grow a sample set until it carries a margin-2 witness or a
    pattern appears. Returns (ids, outcome) with outcome one of
    SamplingWitness, BiPrepattern, MonoPrepattern."""
    samples: list[int] = []
    cur = ins
    cur_ids: list[int] | None = None
    while True:
        ids, out = extract_sample_vertex(g, cur, samples, t)
        if isinstance(out, NewVertex):
            samples = sorted(samples + [out.vertex])
            cur = subinsulator(cur, ids)
            cur_ids = ids
            if len(samples) >= _SAMPLE_CAP:
                return cur_ids, mono_prepattern_from_samples(
                    g, cur, samples, t)
            continue
        return ids, out


def _lis_indices(seq: list[int], descending: bool = False) -> list[int]:
    """Indices of one longest increasing (or decreasing) run, earliest
    such run first."""
    vals = [-x for x in seq] if descending else list(seq)
    n = len(vals)
    best_len = [1] * n
    nxt = [-1] * n
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            if vals[j] > vals[i] and 1 + best_len[j] > best_len[i]:
                best_len[i] = 1 + best_len[j]
                nxt[i] = j
    target = max(best_len, default=0)
    start = next(i for i in range(n) if best_len[i] == target)
    out = []
    while start != -1:
        out.append(start)
        start = nxt[start]
    return out


def mono_prepattern_from_samples(g: Graph, ins: Insulator,
                                 samples: list[int], t: int) -> MonoPrepattern:
    """Turn a capped sample set into a mono prepattern.

    Per column a separator chain relates the surviving samples to
    in-column vertices as a matching, co-matching, or half-graph; the
    most common relation kind across columns is kept, half-graph column
    orders are reconciled by longest common runs, and the result is
    squared off. Raises PipelineError on collapse.
    """
    grid = ins.grid
    L = list(samples)
    chosen = []
    for i in grid.index_seq[:3 * t]:
        col = grid.column_mask(i)
        seen = set()
        reps = []
        for s in L:
            sig = g.rows[s] & col
            if sig in seen:
                continue
            seen.add(sig)
            reps.append(s)
        rightverts = sorted(bits(col))
        if len(reps) < 2 or not rightverts:
            continue
        edges = frozenset((s, y) for s in reps for y in rightverts
                          if g.rows[s] >> y & 1)
        try:
            kind, order, rws, cls = doov_extract(
                BipartiteRepr(frozenset(reps), frozenset(rightverts), edges))
        except ValueError:
            continue
        if order < 2:
            continue
        chosen.append((i, kind, list(rws), dict(zip(rws, cls))))
        L = list(rws)
    if not chosen:
        raise PipelineError("no column supports a separator chain")
    finalset = set(L)
    hg = [(i, rws) for i, kind, rws, _ in chosen if kind == "half-graph"]
    cls_of = {i: kind for i, kind, _, _ in chosen if kind != "half-graph"}
    if hg:
        keep = [s for s in hg[0][1] if s in finalset]
        cls_of[hg[0][0]] = "hg-incr"
        for i, rws in hg[1:]:
            rank = {s: k for k, s in enumerate(rws)}
            seqr = [rank[s] for s in keep]
            inc = _lis_indices(seqr)
            dec = _lis_indices(seqr, descending=True)
            if len(inc) >= len(dec):
                keep = [keep[k] for k in inc]
                cls_of[i] = "hg-incr"
            else:
                keep = [keep[k] for k in dec]
                cls_of[i] = "hg-decr"
        hg_order = keep
    else:
        hg_order = []
    buckets: dict[str, list[int]] = {
        "matching": [], "co-matching": [], "hg-incr": [], "hg-decr": []}
    for i, _, _, _ in chosen:
        buckets[cls_of[i]].append(i)
    best_kind = "matching"
    for k in ("co-matching", "hg-incr", "hg-decr"):
        if len(buckets[k]) > len(buckets[best_kind]):
            best_kind = k
    cols_sel = sorted(buckets[best_kind])
    if best_kind in ("hg-incr", "hg-decr"):
        sample_order = hg_order
    else:
        sample_order = sorted(finalset)
    q = min(len(cols_sel), len(sample_order))
    if q < 1:
        raise PipelineError("mono pattern collapsed to nothing")
    cols_sel = cols_sel[:q]
    sample_order = sample_order[:q]
    matches = {i: match for i, _, _, match in chosen}
    mp = MonoPrepattern(
        tuple(cols_sel),
        tuple(range(1, q + 1)),
        tuple(sample_order),
        tuple(tuple(matches[i][s] for s in sample_order) for i in cols_sel),
        {"matching": "=", "co-matching": "!=",
         "hg-incr": "<=", "hg-decr": ">="}[best_kind])
    errs = validate_mono_prepattern(g, ins, mp)
    if errs:
        raise PipelineError("mono pattern failed validation: " + errs[0])
    return mp


# ---------------------------------------------------------------------------
# symmetric sampling and orderability


def _restrict(ins: Insulator, ids) -> Insulator:
    return subinsulator(ins, list(ids))


def symmetric_sampling(g: Graph, ins: Insulator, t: int):
    """Refine a margin-2 witness into a single-sample margin-1 witness,
    or discover that the columns are orderable.

    Returns (ids, outcome) with outcome one of SamplingWitness (with
    equal side maps), Orderable, BiPrepattern, MonoPrepattern.
    """
    if ins.tag != ORDERLESS:
        raise ValueError("symmetric sampling applies to orderless insulators")
    ids0, out = build_sample_set(g, ins, t)
    if not isinstance(out, SamplingWitness):
        return ids0, out
    samples = list(out.samples)

    # margin 2 -> 1: with every second column kept, no window spans two
    ids1 = list(ids0[0::2])
    if len(ids1) < 2:
        ids1 = list(ids0)

    # keep only columns inducing the majority containment pattern
    # between sample neighbourhoods
    sub1 = _restrict(ins, ids1)
    groups: dict[tuple, list[int]] = {}
    for pos, i in enumerate(sub1.grid.index_seq):
        col = sub1.grid.column_mask_at(pos)
        key = tuple(
            (g.rows[a] & col) & ~(g.rows[b] & col) == 0
            for a in samples for b in samples if a != b)
        groups.setdefault(key, []).append(i)
    if groups:
        chosen = min(groups.values(), key=lambda v: (-len(v), v[0]))
        ids2 = [ids1[0]] + chosen
        if len(ids2) < 2:
            ids2 = ids1
    else:
        ids2 = ids1

    # drop samples that column-profiles cannot tell apart
    sub2 = _restrict(ins, ids2)
    sig_seen = set()
    s2: list[int] = []
    for s in samples:
        sig = tuple(g.rows[s] & sub2.grid.column_mask_at(p)
                    for p in range(sub2.grid.n_cols))
        if sig in sig_seen:
            continue
        sig_seen.add(sig)
        s2.append(s)
    samples = s2

    tail2 = list(ids2[1:])
    if len(tail2) > 4:
        tailpos = [sub2.grid.position_of(i) for i in tail2]
        color = _realized_coloring(g, sub2.grid, samples, tailpos, False)
        sel = ramsey_sets(1 << 30, 4, len(tail2), color)
        if len(sel) >= 2:
            tail2 = [tail2[q] for q in sel]
    ids3 = [ids2[0]] + tail2

    ids4 = ids3[2:-2] if len(ids3) >= 6 else ids3
    sub4 = _restrict(ins, ids4)
    sym, bad = _sym_maps(g, sub4.grid, samples)
    if sym is not None:
        ex, sm = sym
        return ids4, _witness(samples, 1, (ex, sm, sm))
    return _orderable_or_retry(g, ins, ids4, samples, bad, t)


def _orderable_or_retry(g: Graph, ins: Insulator, ids4: list[int],
                        samples: list[int], vstar: int, t: int):
    sub4 = _restrict(ins, ids4)
    gd = sub4.grid
    tailids = list(gd.index_seq)

    def fallback():
        half = ids4[:max(2, (len(ids4) + 1) // 2)]
        if len(half) >= len(ids4):
            raise PipelineError("symmetric sampling cannot shrink further")
        return symmetric_sampling(g, _restrict(ins, half), t)

    maps, _ = _asym_maps(g, gd, samples, 1)
    if maps is None:
        return fallback()
    _, sl, sg = maps
    s1, s2 = sl[vstar], sg[vstar]
    if s1 == s2:
        return fallback()

    cols = [gd.column_mask_at(p) for p in range(gd.n_cols)]
    only2 = [(g.rows[s2] & ~g.rows[s1]) & c for c in cols]
    only1 = [(g.rows[s1] & ~g.rows[s2]) & c for c in cols]
    if all(only2):
        diff, cmpsym = only2, "<="
    elif all(only1):
        diff, cmpsym = only1, ">="
    else:
        return fallback()
    b_of = {i: (m & -m).bit_length() - 1 for i, m in zip(tailids, diff)}
    c_of: dict[int, int] = {}
    for pos, i in enumerate(tailids):
        pick = None
        for v in range(g.n):
            ok = True
            for p2 in range(len(tailids)):
                if p2 == pos:
                    continue
                s = s1 if p2 < pos else s2
                if not agree(g, v, s, cols[p2]):
                    ok = False
                    break
            if ok:
                pick = v
                break
        if pick is None:
            return fallback()
        c_of[i] = pick

    diag_in = [i for i in tailids if g.has_edge(c_of[i], b_of[i])]
    out_ids = [i for i in tailids if i not in diag_in]
    if 2 * len(diag_in) >= len(tailids):
        kept = diag_in
        cmap = {i: c_of[i] for i in kept}
    elif cmpsym == "<=":
        kept = out_ids[1:]
        cmap = {o: c_of[prev] for prev, o in zip(out_ids, out_ids[1:])}
    else:
        kept = out_ids[:-1]
        cmap = {o: c_of[nxt] for o, nxt in zip(out_ids, out_ids[1:])}
    if not kept:
        return fallback()
    ids_final = [ids4[0]] + kept
    w = Orderable(
        tuple((i, b_of[i]) for i in kept),
        tuple((i, cmap[i]) for i in kept),
        cmpsym)
    if validate_orderable(g, _restrict(ins, ids_final), w):
        return fallback()
    return ids_final, w


def orderable_to_ordered(g: Graph, ins: Insulator, w: Orderable) -> Insulator:
    """Retag an orderable insulator as ordered: split parts by row, pull
    the flip back through the projection, and record the bottom-row
    ordering witness."""
    errs = validate_orderable(g, ins, w)
    if errs:
        raise ValueError(errs[0])
    grid = ins.grid
    keys = []
    for v in range(g.n):
        loc = grid.locate(v)
        keys.append((ins.parts[v], loc[1] if loc is not None else 1))
    intern: dict[tuple, int] = {}
    parts2 = [intern.setdefault(k, len(intern)) for k in keys]
    realized = sorted(intern.values())
    of_old = {p: k[0] for k, p in intern.items()}
    f2 = set()
    r2 = set()
    for p in realized:
        for q in realized:
            a, b = of_old[p], of_old[q]
            if (min(a, b), max(a, b)) in ins.fset:
                f2.add((min(p, q), max(p, q)))
                r2.add((p, q))
    b_w, c_w = w.b_of(), w.c_of()
    b_map = []
    for pos, i in enumerate(grid.index_seq):
        cell = grid.cols[pos][0]
        if cell.bit_count() != 1:
            raise ValueError("bottom cells must be singletons")
        b_map.append((cell.bit_length() - 1, b_w[i]))
    o5 = O5Witness(
        grid.height - 1, ins.flip, tuple(b_map),
        tuple((i, c_w[i]) for i in grid.index_seq), w.cmp)
    grid2 = Grid(grid.index_seq, grid.height, grid.cols, ORDERED)
    return Insulator.make(grid2, parts2, f2, r2, o5, ins.roots)


# ---------------------------------------------------------------------------
# growing rows


def grow_orderless(g: Graph, ins: Insulator, t: int):
    """One growth round on an orderless insulator.

    Returns (ids, outcome); outcome is the grown Insulator (one row
    higher, on the restriction to ids), an Orderable witness, or an
    early-exit pattern.
    """
    if ins.tag != ORDERLESS:
        raise ValueError("expected an orderless insulator")
    ids, out = symmetric_sampling(g, ins, t)
    if not isinstance(out, SamplingWitness):
        return ids, out
    return ids, _extend_orderless(g, _restrict(ins, ids), out)


def _extend_orderless(g: Graph, sub: Insulator, w: SamplingWitness) -> Insulator:
    gd = sub.grid
    h = gd.height
    sm = w.sl_of()
    smask = mask_of(w.samples)
    tailids = gd.index_seq
    full = gd.full_mask
    newcell = {i: 0 for i in tailids}
    for v in range(g.n):
        if full >> v & 1:
            continue
        for i in tailids:
            if not agree(g, v, sm[v], gd.cell_mask(i, h)):
                newcell[i] |= 1 << v
                break
    newmask = 0
    for m in newcell.values():
        newmask |= m
    rowh = gd.row_mask(h)
    intern: dict[tuple, int] = {}
    parts2 = []
    for v in range(g.n):
        k = (sub.parts[v],
             bool((full | newmask) >> v & 1),
             bool(rowh >> v & 1),
             bool(newmask >> v & 1),
             g.rows[v] & smask,
             sm[v])
        parts2.append(intern.setdefault(k, len(intern)))
    of_key = {p: k for k, p in intern.items()}
    realized = sorted(of_key)
    f2 = set()
    for p in realized:
        for q in realized:
            if q < p:
                continue
            kx, ky = of_key[p], of_key[q]
            in_b_x = kx[1] and not kx[3]
            in_b_y = ky[1] and not ky[3]
            if kx[2] and ky[2]:
                bit = bool(kx[4] >> ky[5] & 1) or bool(ky[4] >> kx[5] & 1)
            elif not in_b_x and ky[2]:
                bit = bool(ky[4] >> kx[5] & 1)
            elif not in_b_y and kx[2]:
                bit = bool(kx[4] >> ky[5] & 1)
            else:
                bit = (min(kx[0], ky[0]), max(kx[0], ky[0])) in sub.fset
            if bit:
                f2.add((p, q))
    cols2 = []
    for pos, i in enumerate(tailids):
        cols2.append(tuple(gd.cols[pos]) + (newcell[i],))
    grid2 = Grid(tailids, h + 1, tuple(cols2), ORDERLESS)
    return Insulator.make(grid2, parts2, f2, f2, None, sub.roots)


def grow_ordered(g: Graph, ins: Insulator, t: int):
    """One growth round on an ordered insulator.

    Returns (ids, outcome); outcome is the grown Insulator or an
    early-exit pattern. Raises PipelineError when sampling ceases.
    """
    if ins.tag != ORDERED:
        raise ValueError("expected an ordered insulator")
    ids0, out = build_sample_set(g, ins, t)
    if not isinstance(out, SamplingWitness):
        return ids0, out
    seq = ins.grid.index_seq
    border = set(seq[:2]) | set(seq[-2:])
    ids = [i for i in ids0 if i not in border]
    if len(ids) < 2:
        ids = list(ids0)
    sub = _restrict(ins, ids)
    samples = list(out.samples)
    maps, _ = _asym_maps(g, sub.grid, samples, 2)
    if maps is None:
        raise PipelineError("margin did not survive the border trim")
    return ids, _extend_ordered(g, sub, samples, maps)


def _extend_ordered(g: Graph, sub: Insulator, samples: list[int],
                    maps) -> Insulator:
    gd = sub.grid
    h = gd.height
    _, sl, sgr = maps
    smask = mask_of(samples)
    tailids = gd.index_seq
    full = gd.full_mask
    intb = gd.interior_mask
    rowh = gd.row_mask(h)
    newcell = {i: 0 for i in tailids}
    for v in range(g.n):
        if full >> v & 1:
            continue
        for i in tailids:
            if not agree(g, v, sl[v], gd.cell_mask(i, h)):
                newcell[i] |= 1 << v
                break
    newmask = 0
    for m in newcell.values():
        newmask |= m
    pmask: dict[int, int] = {}
    for v in bits(intb):
        pmask[sub.parts[v]] = pmask.get(sub.parts[v], 0) | 1 << v
    plist = sorted(pmask)
    intern: dict[tuple, int] = {}
    parts2 = []
    for v in range(g.n):
        k = (sub.parts[v],
             bool((full | newmask) >> v & 1),
             bool(rowh >> v & 1),
             bool(newmask >> v & 1),
             g.rows[v] & smask,
             bool(intb >> v & 1),
             sl[v],
             sgr[v],
             tuple(p for p in plist if g.rows[v] & pmask[p]))
        parts2.append(intern.setdefault(k, len(intern)))
    of_key = {p: k for k, p in intern.items()}
    member = {p: 0 for p in of_key}
    for v in range(g.n):
        member[parts2[v]] |= 1 << v
    realized = sorted(of_key)

    def crossing(p: int, q: int) -> bool:
        return any(g.rows[x] & member[q] for x in bits(member[p]))

    f2 = set()
    r2 = set()
    for p in realized:
        kx = of_key[p]
        top_x, h_x = kx[3], kx[2]
        low_x = kx[1] and not kx[2] and not kx[3]
        for q in realized:
            ky = of_key[q]
            top_y, h_y = ky[3], ky[2]
            low_y = ky[1] and not ky[2] and not ky[3]
            if q >= p:
                if top_x and h_y:
                    bit = bool(ky[4] >> kx[6] & 1)
                elif top_y and h_x:
                    bit = bool(kx[4] >> ky[6] & 1)
                elif (top_x and low_y) or (top_y and low_x):
                    bit = crossing(p, q)
                else:
                    bit = (min(kx[0], ky[0]), max(kx[0], ky[0])) in sub.fset
                if bit:
                    f2.add((p, q))
            if (top_x and ky[1] and not top_y) or (h_x and h_y):
                rbit = bool(ky[4] >> kx[7] & 1)
            else:
                rbit = (kx[0], ky[0]) in sub.rset
            if rbit:
                r2.add((p, q))
    cols2 = []
    for pos, i in enumerate(tailids):
        cols2.append(tuple(gd.cols[pos]) + (newcell[i],))
    grid2 = Grid(tailids, h + 1, tuple(cols2), ORDERED)
    return Insulator.make(grid2, parts2, f2, r2, sub.o5, sub.roots)


# ---------------------------------------------------------------------------
# the full insulation loop


def _ball_extension(g: Graph, ins: Insulator) -> Insulator:
    """Raise the height by taking literal flip-graph balls, keeping a
    maximal prefix-greedy set of columns whose balls stay disjoint."""
    if ins.tag != ORDERLESS:
        raise PipelineError("ball extension applies to orderless insulators")
    gd = ins.grid
    h = gd.height
    gp = ins.flipped(g)
    ballmask = []
    for pos in range(gd.n_cols):
        bottom = gd.cols[pos][0]
        if bottom.bit_count() != 1:
            raise PipelineError("ball extension needs singleton bottom cells")
        ballmask.append(ball_mask(gp, bottom, h))
    kept: list[int] = []
    taken = 0
    for pos in range(gd.n_cols):
        if ballmask[pos] & taken == 0:
            kept.append(pos)
            taken |= ballmask[pos]
    cols2 = []
    ids2 = []
    for pos in kept:
        grown = ballmask[pos] & ~gd.column_mask_at(pos)
        cols2.append(tuple(gd.cols[pos]) + (grown,))
        ids2.append(gd.index_seq[pos])
    grid2 = Grid(tuple(ids2), h + 1, tuple(cols2), ORDERLESS)
    roots = None
    if ins.roots is not None:
        keep = set(ids2)
        roots = tuple((i, v) for i, v in ins.roots if i in keep)
    return Insulator(grid2, ins.parts, ins.fset, ins.rset, None, roots)


def _ordered_flat_extension(g: Graph, ins: Insulator) -> Insulator:
    """Raise a stalled ordered insulator by one row: collapse to the
    single merged end column, whose empty interior makes every adjacency
    clause vacuous, and add an empty top cell."""
    if ins.tag != ORDERED:
        raise PipelineError("flat extension applies to ordered insulators")
    if ins.grid.n_cols > 1:
        seq = ins.grid.index_seq
        ins = subinsulator(ins, [seq[0], seq[-1]])
    gd = ins.grid
    cols2 = (tuple(gd.cols[0]) + (0,),)
    grid2 = Grid(gd.index_seq, gd.height + 1, cols2, ORDERED)
    return Insulator(grid2, ins.parts, ins.fset, ins.rset, ins.o5, ins.roots)


def _trace_entry(stage: str, outcome: str, ins: Insulator) -> dict:
    return {
        "stage": stage,
        "outcome": outcome,
        "tag": ins.tag,
        "height": ins.height,
        "cols": ins.grid.n_cols,
        "cost": ins.cost,
    }


def insulate(g: Graph, w, r: int, t: int = 2) -> InsulationResult:
    """Insulate the vertex set w to height r, or exit with a pattern.

    Starting from the trivial height-1 tower over w, each round grows
    the current insulator by one row, converts it to ordered form when
    an orderable witness appears, or falls back to literal ball towers
    when extraction stalls. Early pattern exits return the restricted
    insulator the pattern lives on. Some requested vertices are dropped
    along the way; the survivors are listed in w_star.
    """
    if r < 1:
        raise ValueError("height must be at least one")
    cur = trivial_insulator(g, w)
    trace = [_trace_entry("init", "trivial", cur)]
    while cur.height < r:
        if cur.tag == ORDERLESS:
            try:
                ids, out = grow_orderless(g, cur, t)
            except PipelineError:
                cur = _ball_extension(g, cur)
                trace.append(_trace_entry("ball-extension", "row", cur))
                continue
            if isinstance(out, (BiPrepattern, MonoPrepattern)):
                fin = _restrict(cur, ids)
                trace.append(_trace_entry(
                    "grow-orderless", type(out).__name__, fin))
                return InsulationResult(
                    fin, _roots_of(fin), out, tuple(trace))
            if isinstance(out, Orderable):
                cur = orderable_to_ordered(g, _restrict(cur, ids), out)
                trace.append(_trace_entry("order", "ordered", cur))
                continue
            cur = out
            trace.append(_trace_entry("grow-orderless", "row", cur))
        else:
            try:
                ids, out = grow_ordered(g, cur, t)
            except PipelineError:
                cur = _ordered_flat_extension(g, cur)
                trace.append(_trace_entry("flat-extension", "row", cur))
                continue
            if isinstance(out, (BiPrepattern, MonoPrepattern)):
                fin = _restrict(cur, ids)
                trace.append(_trace_entry(
                    "grow-ordered", type(out).__name__, fin))
                return InsulationResult(
                    fin, _roots_of(fin), out, tuple(trace))
            cur = out
            trace.append(_trace_entry("grow-ordered", "row", cur))
    return InsulationResult(cur, _roots_of(cur), None, tuple(trace))


def _roots_of(ins: Insulator) -> tuple[int, ...]:
    if ins.roots is None:
        return ()
    return tuple(sorted(v for _, v in ins.roots))


def trace_to_jsonl(trace) -> str:
    return "\n".join(json.dumps(entry, sort_keys=True) for entry in trace)
