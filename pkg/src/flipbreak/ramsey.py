"""Monochromatic-extraction helpers.

Deterministic Ramsey-style searches over small ground sets: homogeneous
subsets for subset colorings, order-type-homogeneous subsets for tuple
colorings, a two-sided variant, and the bipartite unavoidable-pattern
search (matching / co-matching / half-graph) on twin-free sides.

All extractions verify their own output with an exhaustive checker
before returning. Ties in "largest class" choices go to the smallest
color, ties between candidate subsets to the lexicographically first.
"""

from __future__ import annotations

from itertools import combinations, product
from math import comb
from typing import Callable, Hashable, Sequence

from .graphs import BipartiteRepr

Color = Hashable
SubsetColoring = Callable[[tuple[int, ...]], Color]
TupleColoring = Callable[[tuple[int, ...]], Color]

__all__ = [
    "ramsey_sets",
    "ramsey_schedule",
    "ramsey_tuples",
    "bipartite_ramsey",
    "doov_extract",
    "order_type",
    "check_homogeneous_sets",
    "check_homogeneous_tuples",
    "check_semi_induced_kind",
]

_EXACT_SUBSET_CAP = 1300


def _color_key(c: Color) -> tuple:
    if isinstance(c, (int, float)):
        return (0, c, "")
    return (1, 0, repr(c))


def ramsey_sets(num_colors: int, subset_size: int, m: int,
                coloring: SubsetColoring) -> list[int]:
    """Find a subset of range(m) on which all subset_size-subsets share a color.

    The coloring receives sorted tuples. Output is verified before
    return; small instances are searched exactly, larger ones use the
    classical stepping-down construction.
    """
    if subset_size < 0:
        raise ValueError("subset size must be nonnegative")
    if subset_size > m:
        raise ValueError(f"subset size {subset_size} exceeds ground size {m}")
    elems = list(range(m))
    if num_colors <= 1 or subset_size == 0:
        return elems
    out = _mono_subset(subset_size, elems, coloring)
    if not check_homogeneous_sets(subset_size, out, coloring):
        raise RuntimeError("homogeneity verification failed")
    return out


def _mono_subset(l: int, elems: list[int], c: SubsetColoring) -> list[int]:
    if l == 1:
        groups: dict[Color, list[int]] = {}
        for e in elems:
            groups.setdefault(c((e,)), []).append(e)
        best = min(groups.items(), key=lambda kv: (-len(kv[1]), _color_key(kv[0])))
        return sorted(best[1])
    greedy = _greedy_subset(l, elems, c)
    if len(elems) <= 14 and comb(len(elems), l) <= _EXACT_SUBSET_CAP:
        return _exact_subset(l, elems, c, greedy)
    return greedy


def _greedy_subset(l: int, elems: list[int], c: SubsetColoring) -> list[int]:
    # stepping-down: stabilise the head element against all (l-1)-subsets
    # of the remainder, then keep the largest equal-color head group
    chosen: list[tuple[int, Color]] = []
    alive = list(elems)
    while len(alive) >= l:
        head, rest = alive[0], alive[1:]
        sub = _mono_subset(l - 1, rest,
                           lambda js, h=head: c(tuple(sorted((h,) + js))))
        if len(sub) >= l - 1:
            col = c(tuple(sorted((head,) + tuple(sub[: l - 1]))))
            chosen.append((head, col))
        alive = sub
    groups: dict[Color, list[int]] = {}
    for e, col in chosen:
        groups.setdefault(col, []).append(e)
    picked: list[int] = []
    if groups:
        best = min(groups.items(), key=lambda kv: (-len(kv[1]), _color_key(kv[0])))
        picked = best[1]
    # leftovers are below l elements and sit inside every stabilised set,
    # so adding them keeps the result homogeneous
    return sorted(picked + alive)


def _exact_subset(l: int, elems: list[int], c: SubsetColoring,
                  incumbent: list[int]) -> list[int]:
    best = list(incumbent)
    n = len(elems)

    def extend(cur: list[int], idx: int, col: Color | None) -> None:
        nonlocal best
        if len(cur) > len(best):
            best = list(cur)
        for pos in range(idx, n):
            if len(cur) + (n - pos) <= len(best):
                return
            e = elems[pos]
            new_col = col
            ok = True
            for js in combinations(cur, l - 1):
                val = c(tuple(sorted(js + (e,))))
                if new_col is None:
                    new_col = val
                elif val != new_col:
                    ok = False
                    break
            if ok:
                cur.append(e)
                extend(cur, pos + 1, new_col)
                cur.pop()

    extend([], 0, None)
    return sorted(best)


def ramsey_schedule(num_colors: int, subset_size: int, m: int) -> int:
    """Worst-case size guarantee of the stepping-down construction."""
    if subset_size > m:
        return 0
    if num_colors <= 1 or subset_size == 0:
        return m
    if subset_size == 1:
        return -(-m // num_colors)
    steps = 0
    alive = m
    while alive >= subset_size:
        alive = ramsey_schedule(num_colors, subset_size - 1, alive - 1)
        steps += 1
    return max(subset_size - 1, -(-steps // num_colors) + alive)


def order_type(tup: Sequence[int]) -> tuple[int, ...]:
    """Rank pattern of a tuple, e.g. (5, 2, 5) -> (1, 0, 1)."""
    ranks = {v: i for i, v in enumerate(sorted(set(tup)))}
    return tuple(ranks[v] for v in tup)


def _patterns_with_support(arity: int, support: int) -> list[tuple[int, ...]]:
    out = []
    for p in product(range(support), repeat=arity):
        if len(set(p)) == support:
            out.append(p)
    return out


def ramsey_tuples(num_colors: int, tuple_len: int, m: int,
                  coloring: TupleColoring) -> list[int]:
    """Find a subset of range(m) where tuple colors depend only on order type."""
    if tuple_len < 1:
        raise ValueError("tuple length must be positive")
    alive = list(range(m))
    if num_colors <= 1:
        return alive
    for support in range(1, tuple_len + 1):
        if support > len(alive):
            break
        pats = _patterns_with_support(tuple_len, support)

        def super_color(subset: tuple[int, ...], ps=pats) -> Color:
            return tuple(coloring(tuple(subset[i] for i in p)) for p in ps)

        alive = _mono_subset(support, alive, super_color)
    out = sorted(alive)
    if not check_homogeneous_tuples(tuple_len, out, coloring):
        raise RuntimeError("order-type homogeneity verification failed")
    return out


def bipartite_ramsey(num_colors: int, l1: int, l2: int, m: int,
                     coloring: Callable[[tuple[int, ...], tuple[int, ...]], Color],
                     ) -> tuple[list[int], list[int]]:
    """Two index sets on which the color depends only on both order types.

    Runs the tuple extraction on concatenated (l1+l2)-tuples and splits
    the result, first half against second half.
    """
    joint = ramsey_tuples(num_colors, l1 + l2, m,
                          lambda t: coloring(t[:l1], t[l1:]))
    half = len(joint) // 2
    return joint[:half], joint[half:]


def check_homogeneous_sets(l: int, out: Sequence[int], c: SubsetColoring) -> bool:
    seen: set[Color] = set()
    for js in combinations(sorted(out), l):
        seen.add(c(tuple(js)))
        if len(seen) > 1:
            return False
    return True


def check_homogeneous_tuples(l: int, out: Sequence[int], c: TupleColoring) -> bool:
    by_otp: dict[tuple[int, ...], Color] = {}
    for tup in product(sorted(out), repeat=l):
        otp = order_type(tup)
        val = c(tup)
        if by_otp.setdefault(otp, val) != val:
            return False
    return True


def check_semi_induced_kind(has_edge: Callable[[int, int], bool], kind: str,
                            rows: Sequence[int], cols: Sequence[int]) -> bool:
    """Check that rows x cols semi-induce the named pattern (1-based positions)."""
    if len(rows) != len(cols):
        return False
    if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
        return False
    for x, a in enumerate(rows, start=1):
        for y, b in enumerate(cols, start=1):
            if kind == "matching":
                want = x == y
            elif kind == "co-matching":
                want = x != y
            elif kind == "half-graph":
                want = x <= y
            else:
                return False
            if has_edge(a, b) != want:
                return False
    return True


def doov_extract(b: BipartiteRepr) -> tuple[str, int, list[int], list[int]]:
    """Extract a semi-induced matching, co-matching, or half-graph.

    The left side must be twin-free. A separator chain halves the left
    side at each step, pairing one vertex with the separator that splits
    it off; a pair-coloring cleanup then makes the leftover adjacencies
    uniform. The order grows without bound in |L|.
    """
    left = sorted(b.left)
    right = sorted(b.right)
    adj: dict[int, frozenset[int]] = {u: frozenset() for u in left + right}
    nb: dict[int, set[int]] = {u: set() for u in left + right}
    for u, v in b.edges:
        nb[u].add(v)
        nb[v].add(u)
    adj = {u: frozenset(s) for u, s in nb.items()}
    seen_nbhd: dict[frozenset[int], int] = {}
    for u in left:
        if adj[u] in seen_nbhd:
            raise ValueError(f"left side has twins: {seen_nbhd[adj[u]]} and {u}")
        seen_nbhd[adj[u]] = u

    def has_edge(x: int, y: int) -> bool:
        return y in adj[x]

    if len(left) < 2:
        if not left:
            return ("matching", 0, [], [])
        a = left[0]
        if adj[a]:
            return ("matching", 1, [a], [min(adj[a])])
        if right:
            return ("co-matching", 1, [a], [right[0]])
        return ("matching", 0, [], [])

    # separator chain: (split-off vertex, separator, kept-side adjacency bit)
    chain: list[tuple[int, int, int]] = []
    cand = list(left)
    while len(cand) >= 2:
        u, v = cand[0], cand[1]
        sep = min(adj[u] ^ adj[v])
        adj_side = [w for w in cand if sep in adj[w]]
        non_side = [w for w in cand if sep not in adj[w]]
        if len(adj_side) >= len(non_side):
            keep, off, const = adj_side, non_side, 1
        else:
            keep, off, const = non_side, adj_side, 0
        chain.append((off[0], sep, const))
        cand = keep

    t = len(chain)

    def pair_color(ij: tuple[int, ...]) -> tuple[int, int]:
        i, j = ij
        a_i, _, const_i = chain[i]
        b_j = chain[j][1]
        return (const_i, 1 if has_edge(a_i, b_j) else 0)

    idx = ramsey_sets(4, 2, t, pair_color) if t >= 2 else [0]
    if len(idx) >= 2:
        # the kept-side bit of the largest index is unconstrained, drop it
        take = idx[:-1]
        z = pair_color((idx[0], idx[1]))[1]
    else:
        take = idx
        z = 0
    q = chain[take[0]][2]
    rows = [chain[i][0] for i in take]
    cols = [chain[i][1] for i in take]
    # entry (x, y), 1-based: x < y gives z, x == y gives 1 - q, x > y gives q
    if q == 0 and z == 0:
        kind = "matching"
    elif q == 1 and z == 1:
        kind = "co-matching"
    elif q == 0 and z == 1:
        kind = "half-graph"
    else:
        # adjacency holds strictly below the diagonal; reverse both sides
        # then realign by one to land on the closed half-graph shape
        rows = list(reversed(rows))
        cols = list(reversed(cols))
        if len(rows) >= 2:
            rows = rows[:-1]
            cols = cols[1:]
            kind = "half-graph"
        else:
            kind = "matching" if has_edge(rows[0], cols[0]) else "co-matching"
    if not check_semi_induced_kind(has_edge, kind, rows, cols):
        raise RuntimeError("extracted pattern failed verification")
    return (kind, len(rows), rows, cols)
