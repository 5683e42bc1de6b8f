"""Separation witnesses: split a big vertex set into two far-apart halves.

The main route coarsens a tall insulator into a frame of boundedly many
cells and flips the host graph so that balls around two chosen column
zones can never meet. The variant breakers consume supplied
decompositions (rank trees, nice tree decompositions, flip layerings,
elimination forests) and separate by connected components instead of
bounded distance.

Every producer self-checks its witness by BFS before returning it, and
verify_break re-derives the separation from the graph and the witness
alone, sharing no state with the producers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .flips import FlipSpec, apply_flip, refine_flip
from .graphs import Graph, ball_mask, bits, gf2_cut_rank, mask_of
from .insulators import (
    ORDERLESS,
    BiPrepattern,
    Insulator,
    MonoPrepattern,
    insulates,
    validate_insulator,
)
from .pipeline import insulate

MODES = (
    "flip",
    "deletion",
    "flip-infty",
    "deletion-infty",
    "flat-infty-flip",
    "flat-infty-deletion",
)

_FLIP_MODES = ("flip", "flip-infty", "flat-infty-flip")
_DELETION_MODES = ("deletion", "deletion-infty", "flat-infty-deletion")
_FLAT_MODES = ("flat-infty-flip", "flat-infty-deletion")

__all__ = [
    "MODES",
    "BreakError",
    "BreakWitness",
    "NiceTreeDecomp",
    "FlipLayering",
    "break_from_insulator",
    "flip_break",
    "verify_break",
    "dist_infty_flip_break",
    "dist_infty_deletion_break",
    "dist_infty_flip_flat",
    "dist_infty_deletion_flat",
    "validate_rank_decomp",
    "validate_nice_tree_decomp",
    "validate_flip_layering",
    "validate_elimination_forest",
    "flat_flip_witness",
    "flat_deletion_witness",
    "witness_to_json",
    "witness_from_json",
]


class BreakError(ValueError):
    """A breaker precondition failed or a witness could not be produced."""


@dataclass(frozen=True)
class BreakWitness:
    """Two subsets of a probed vertex set plus the separating operation.

    Finite modes keep radius r; component modes ignore it and store 0.
    Flip modes carry flip_spec, deletion modes the deleted set s. The
    flat modes reuse the a field for the scattered set and leave b
    empty.
    """

    mode: str
    r: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    s: tuple[int, ...] | None = None
    flip_spec: FlipSpec | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.r < 0:
            raise ValueError("radius must be non-negative")


def witness_to_json(wit: BreakWitness) -> str:
    data: dict = {
        "mode": wit.mode,
        "r": wit.r,
        "A": list(wit.a),
        "B": list(wit.b),
    }
    if wit.s is not None:
        data["S"] = list(wit.s)
    if wit.flip_spec is not None:
        data["flipSpec"] = {
            "parts": list(wit.flip_spec.parts),
            "flips": sorted(list(pq) for pq in wit.flip_spec.flips),
        }
    return json.dumps(data, sort_keys=True)


def witness_from_json(text: str) -> BreakWitness:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"bad witness json: {e}") from None
    try:
        spec = None
        if data.get("flipSpec") is not None:
            spec = FlipSpec.make(
                data["flipSpec"]["parts"],
                [tuple(pq) for pq in data["flipSpec"]["flips"]],
            )
        s = tuple(data["S"]) if data.get("S") is not None else None
        return BreakWitness(
            data["mode"], data["r"], tuple(data["A"]), tuple(data["B"]), s, spec
        )
    except (KeyError, TypeError, IndexError) as e:
        raise ValueError(f"bad witness json: {e!r}") from None


def flat_flip_witness(w_star: Iterable[int], spec: FlipSpec) -> BreakWitness:
    return BreakWitness("flat-infty-flip", 0, tuple(sorted(w_star)), (), None, spec)


def flat_deletion_witness(s: Iterable[int], w_star: Iterable[int]) -> BreakWitness:
    return BreakWitness(
        "flat-infty-deletion", 0, tuple(sorted(w_star)), (), tuple(sorted(s)), None
    )


# ---------------------------------------------------------------------------
# masked BFS helpers


def _reach(g: Graph, start: int, scope: int, depth: int | None = None) -> int:
    """Vertices reachable from start inside scope, optionally depth-capped."""
    reach = start & scope
    frontier = reach
    steps = 0
    while frontier and (depth is None or steps < depth):
        nxt = 0
        for v in bits(frontier):
            nxt |= g.rows[v]
        nxt &= scope & ~reach
        reach |= nxt
        frontier = nxt
        steps += 1
    return reach


def _components(g: Graph, scope: int) -> list[int]:
    out = []
    remaining = scope
    while remaining:
        seed = remaining & -remaining
        comp = _reach(g, seed, scope)
        out.append(comp)
        remaining &= ~comp
    return out


def _comp_index(comps: list[int], v: int) -> int:
    bit = 1 << v
    for i, comp in enumerate(comps):
        if comp & bit:
            return i
    return -1


def _ceil_sqrt(x: int) -> int:
    if x <= 0:
        return 0
    return math.isqrt(x - 1) + 1


# ---------------------------------------------------------------------------
# verification


def _check_vertices(g: Graph, vs: Iterable[int], label: str) -> None:
    for v in vs:
        if not (0 <= v < g.n):
            raise ValueError(f"{label} names vertex {v} outside the graph")


def verify_break(g: Graph, wit: BreakWitness) -> bool:
    """Re-derive the mode's separation condition from scratch."""
    if wit.mode not in MODES:
        raise ValueError(f"unknown mode {wit.mode!r}")
    _check_vertices(g, wit.a, "A")
    _check_vertices(g, wit.b, "B")
    amask = mask_of(wit.a)
    bmask = mask_of(wit.b)
    full = (1 << g.n) - 1

    if wit.mode in _FLIP_MODES:
        if wit.flip_spec is None:
            raise ValueError(f"mode {wit.mode} needs a flip spec")
        if len(wit.flip_spec.parts) != g.n:
            raise ValueError("flip spec partition does not cover the graph")
        h = apply_flip(g, wit.flip_spec)
        if wit.mode == "flip":
            return ball_mask(h, amask, wit.r) & ball_mask(h, bmask, wit.r) == 0
        if wit.mode == "flip-infty":
            return _reach(h, amask, full) & bmask == 0
        if wit.b:
            raise ValueError("flat witnesses keep B empty")
        comps = _components(h, full)
        return len({_comp_index(comps, v) for v in wit.a}) == len(wit.a)

    if wit.s is None:
        raise ValueError(f"mode {wit.mode} needs a deleted set")
    _check_vertices(g, wit.s, "S")
    smask = mask_of(wit.s)
    scope = full & ~smask
    if (amask | bmask) & smask:
        return False
    if wit.mode == "deletion":
        if not wit.a or not wit.b:
            return True
        return _reach(g, amask, scope, wit.r) & bmask == 0
    if wit.mode == "deletion-infty":
        return _reach(g, amask, scope) & bmask == 0
    if wit.b:
        raise ValueError("flat witnesses keep B empty")
    comps = _components(g, scope)
    return len({_comp_index(comps, v) for v in wit.a}) == len(wit.a)


# ---------------------------------------------------------------------------
# insulator route


def _grid_layout(ins: Insulator) -> dict[int, tuple[int, int]]:
    grid = ins.grid
    out: dict[int, tuple[int, int]] = {}
    for pos in range(grid.n_cols):
        for r in range(1, grid.height + 1):
            for v in bits(grid.cols[pos][r - 1]):
                out[v] = (pos, r)
    return out


def _column_of_w(ins: Insulator, w: Sequence[int]) -> dict[int, int]:
    """Column position of each insulated vertex, via bottom-cell membership."""
    out = {}
    for v in w:
        loc = ins.grid.locate(v)
        if loc is None or loc[1] != 1:
            raise BreakError(f"vertex {v} is not in a bottom cell")
        out[v] = loc[0]
    return out


def _frontier_quiet_errors(g: Graph, ins: Insulator) -> list[str]:
    """Flipped-graph edges jumping two or more rows into the frame columns.

    The coarsening argument needs the flipped graph to carry no edge
    between an interior vertex and a first or last column vertex on far
    rows; validate_insulator leaves those pairs unconstrained.
    """
    grid = ins.grid
    gp = ins.flipped(g)
    layout = _grid_layout(ins)
    edge_mask = grid.column_mask_at(0) | grid.column_mask_at(grid.n_cols - 1)
    out = []
    for u in bits(grid.interior_mask):
        ru = layout[u][1]
        for v in bits(gp.rows[u] & edge_mask):
            if abs(ru - layout[v][1]) >= 2:
                out.append(
                    f"frontier: interior {u} (row {ru}) flip-adjacent to "
                    f"frame vertex {v} (row {layout[v][1]}) two rows away"
                )
                return out
    return out


def _split_witness(
    g: Graph, r: int, spec: FlipSpec, left: Sequence[int], right: Sequence[int]
) -> BreakWitness:
    wit = BreakWitness("flip", r, tuple(sorted(left)), tuple(sorted(right)), None, spec)
    if not verify_break(g, wit):
        raise BreakError("separation check failed on the produced split")
    return wit


def _orderless_break(g: Graph, w: Sequence[int], ins: Insulator, r: int) -> BreakWitness:
    # ball towers of height 2r+1 hold the whole 2r-ball of every column,
    # and towers are pairwise disjoint, so any column split separates
    col_of = _column_of_w(ins, w)
    order = sorted(w, key=lambda v: col_of[v])
    half = (len(order) + 1) // 2
    return _split_witness(g, r, ins.flip, order[:half], order[half:])


def _coarse_columns(n: int, r: int) -> tuple[list[int], int]:
    """Map of base column position to coarse column, plus the zone cut p.

    Frame: 2r single columns, left zone merged, 2r single columns, right
    zone merged, 2r single columns; 6r+2 coarse columns in total. The
    cut p is placed to balance the two zones, ties to the left.
    """
    p = (n - 2 * r) // 2
    coarse = []
    for q in range(n):
        if q < 2 * r:
            coarse.append(q)
        elif q < p:
            coarse.append(2 * r)
        elif q < p + 2 * r:
            coarse.append(2 * r + 1 + (q - p))
        elif q < n - 2 * r:
            coarse.append(4 * r + 1)
        else:
            coarse.append(4 * r + 2 + (q - (n - 2 * r)))
    return coarse, p


def _ordered_break(g: Graph, w: Sequence[int], ins: Insulator, r: int) -> BreakWitness:
    grid = ins.grid
    n = grid.n_cols
    h = grid.height
    quiet = _frontier_quiet_errors(g, ins)
    if quiet:
        raise BreakError(quiet[0])
    coarse, p = _coarse_columns(n, r)
    n_coarse = 6 * r + 2
    layout = _grid_layout(ins)
    interior = grid.interior_mask

    # refine the partition by cell membership and by adjacency towards
    # each original part restricted to the grid interior
    int_part_masks: dict[int, int] = {}
    for v in bits(interior):
        int_part_masks.setdefault(ins.parts[v], 0)
        int_part_masks[ins.parts[v]] |= 1 << v
    part_items = sorted(int_part_masks.items())

    def key_of(v: int) -> tuple:
        loc = layout.get(v)
        cell = None if loc is None else (coarse[loc[0]], loc[1])
        profile = tuple(pid for pid, m in part_items if g.rows[v] & m)
        return (ins.parts[v], cell, profile)

    key_id: dict[tuple, int] = {}
    keys: list[tuple] = []
    parts = []
    for v in range(g.n):
        k = key_of(v)
        if k not in key_id:
            key_id[k] = len(keys)
            keys.append(k)
        parts.append(key_id[k])

    def in_interior_cells(cell: tuple[int, int]) -> bool:
        j, t = cell
        return 1 <= j <= n_coarse - 2 and t <= h - 1

    def fset_bit(x: int, y: int) -> bool:
        return (min(x, y), max(x, y)) in ins.fset

    flips = []
    for i, (xi, ci, pi) in enumerate(keys):
        for j in range(i, len(keys)):
            xj, cj, pj = keys[j]
            if ci is not None and cj is not None:
                if ci[0] < cj[0] and cj[1] in (ci[1], ci[1] - 1):
                    bit = (xi, xj) in ins.rset
                elif cj[0] < ci[0] and ci[1] in (cj[1], cj[1] - 1):
                    bit = (xj, xi) in ins.rset
                else:
                    bit = fset_bit(xi, xj)
            elif ci is None and cj is None:
                bit = fset_bit(xi, xj)
            elif ci is None:
                bit = xj in pi if in_interior_cells(cj) else fset_bit(xi, xj)
            else:
                bit = xi in pj if in_interior_cells(ci) else fset_bit(xi, xj)
            if bit:
                flips.append((i, j))
    spec = FlipSpec.make(parts, flips)

    bound = 1 << (48 * r * r * ins.cost)
    if spec.num_parts > bound:
        raise BreakError(
            f"refined partition uses {spec.num_parts} parts, bound is {bound}"
        )

    col_of = _column_of_w(ins, w)
    left = [v for v in w if 2 * r <= col_of[v] < p]
    right = [v for v in w if p + 2 * r <= col_of[v] < n - 2 * r]
    return _split_witness(g, r, spec, left, right)


def break_from_insulator(g: Graph, w: Iterable[int], ins: Insulator, r: int) -> BreakWitness:
    """Separate w into two zone halves using a height 2r+1 insulator.

    Orderless insulators split straight down the middle: each column is
    a full ball tower around its bottom vertex. Ordered ones are
    coarsened to a 6r+2 column frame; the vertex partition is refined by
    cell membership plus interior adjacency profiles, and the flip
    relation rewires cell pairs so that every flipped edge out of an
    interior cell stays between neighboring cells.
    """
    order = sorted(set(w))
    if r < 1:
        raise BreakError("radius must be at least 1")
    if len(order) < 18 * r:
        raise BreakError(f"need at least {18 * r} vertices, got {len(order)}")
    if ins.height != 2 * r + 1:
        raise BreakError(f"insulator height {ins.height}, expected {2 * r + 1}")
    errs = validate_insulator(g, ins)
    if errs:
        raise BreakError(f"invalid insulator: {errs[0]}")
    if not insulates(ins, order):
        raise BreakError("insulator does not insulate the probed set")
    if ins.tag == ORDERLESS:
        wit = _orderless_break(g, order, ins, r)
    else:
        wit = _ordered_break(g, order, ins, r)
    third = len(order) // 3
    if len(wit.a) < third or len(wit.b) < third:
        raise BreakError("zone halves came out smaller than a third")
    return wit


def flip_break(
    g: Graph, w: Iterable[int], r: int, t: int = 2
) -> BreakWitness | BiPrepattern | MonoPrepattern:
    """Insulate w at height 2r+1, then break, or report the disorder found.

    When the insulated set is too small for the frame construction, the
    split falls back to ball-disjoint flips carried by the insulator
    itself; each candidate is verified before being returned.
    """
    if r < 1:
        raise BreakError("radius must be at least 1")
    res = insulate(g, w, 2 * r + 1, t)
    if res.prepattern is not None:
        return res.prepattern
    ins = res.insulator
    ws = sorted(res.w_star)
    if len(ws) >= 18 * r:
        try:
            return break_from_insulator(g, ws, ins, r)
        except BreakError:
            pass
    col_of = _column_of_w(ins, ws)
    order = sorted(ws, key=lambda v: col_of[v])
    half = (len(order) + 1) // 2
    candidates = [ins.flip]
    if ins.o5 is not None:
        candidates.append(ins.o5.flip)
    candidates.append(FlipSpec.identity(g.n))
    for spec in candidates:
        try:
            return _split_witness(g, r, spec, order[:half], order[half:])
        except BreakError:
            continue
    raise BreakError("no verified split on the insulated set")


# ---------------------------------------------------------------------------
# rank decompositions


def _rank_tree_masks(node, g: Graph, acc: list[int]) -> int:
    """Leaf mask of the subtree; every proper subtree mask is appended."""
    if isinstance(node, int):
        if not (0 <= node < g.n):
            raise BreakError(f"leaf {node} outside the graph")
        return 1 << node
    if not isinstance(node, (tuple, list)) or not (1 <= len(node) <= 2):
        raise BreakError("internal nodes need one or two children")
    mask = 0
    for child in node:
        cm = _rank_tree_masks(child, g, acc)
        if cm & mask:
            raise BreakError("a vertex appears under two branches")
        mask |= cm
        acc.append(cm)
    return mask


def validate_rank_decomp(g: Graph, tree, k: int) -> list[str]:
    """Shape and cut-rank errors of a rank decomposition tree."""
    acc: list[int] = []
    try:
        mask = _rank_tree_masks(tree, g, acc)
    except BreakError as e:
        return [str(e)]
    full = (1 << g.n) - 1
    if mask != full:
        missing = next(bits(full & ~mask))
        return [f"leaves do not cover the graph, {missing} is missing"]
    for cm in acc:
        rank = gf2_cut_rank(g, bits(cm), bits(full & ~cm))
        if rank > k:
            return [
                f"cut of {cm.bit_count()} leaves has rank {rank}, bound is {k}"
            ]
    return []


def dist_infty_flip_break(g: Graph, w: Iterable[int], tree, k: int) -> BreakWitness:
    """Split w across a balanced rank-decomposition edge and cut all
    crossing edges with one flip.

    Both sides of the chosen edge carry at least a quarter of w. Vertices
    are grouped by their neighborhood across the cut, which the rank
    bound keeps to few groups, and every group pair with edges across is
    flipped.
    """
    errs = validate_rank_decomp(g, tree, k)
    if errs:
        raise BreakError(errs[0])
    order = sorted(set(w))
    if len(order) < 2:
        raise BreakError("need at least two probed vertices")
    wmask = mask_of(order)
    full = (1 << g.n) - 1

    def leaf_mask(node) -> int:
        if isinstance(node, int):
            return 1 << node
        out = 0
        for child in node:
            out |= leaf_mask(child)
        return out

    cur = tree
    while not isinstance(cur, int):
        best = None
        best_count = -1
        for child in cur:
            count = (leaf_mask(child) & wmask).bit_count()
            if count > best_count:
                best, best_count = child, count
        if 4 * best_count >= len(order):
            cur = best
        else:
            break
    x = leaf_mask(cur)
    y = full & ~x

    groups: dict[tuple[int, int], int] = {}
    for u in range(g.n):
        side = 0 if x >> u & 1 else 1
        nbr = g.rows[u] & (y if side == 0 else x)
        groups.setdefault((side, nbr), 0)
        groups[(side, nbr)] |= 1 << u
    items = sorted(groups.items())
    parts = [0] * g.n
    reps = []
    for pid, (_, m) in enumerate(items):
        reps.append(next(bits(m)))
        for v in bits(m):
            parts[v] = pid
    flips = []
    for i, ((si, _), _) in enumerate(items):
        for j in range(i + 1, len(items)):
            if items[j][0][0] != si and g.has_edge(reps[i], reps[j]):
                flips.append((i, j))
    spec = FlipSpec.make(parts, flips)
    if spec.num_parts > (1 << k) + (1 << (1 << k)):
        raise BreakError("group count exceeded the rank schedule")

    wit = BreakWitness(
        "flip-infty", 0,
        tuple(sorted(bits(wmask & x))), tuple(sorted(bits(wmask & y))),
        None, spec,
    )
    quarter = len(order) / 4
    if len(wit.a) < quarter or len(wit.b) < quarter:
        raise BreakError("balanced edge left one side below a quarter")
    if not verify_break(g, wit):
        raise BreakError("separation check failed on the produced split")
    return wit


# ---------------------------------------------------------------------------
# nice tree decompositions


@dataclass(frozen=True)
class NiceTreeDecomp:
    """Rooted nice tree decomposition: one bag and child list per node.

    Every node is a leaf (empty bag), an introduce or forget node (one
    child, bag differs by one vertex), or a join (two children, equal
    bags). The root bag is empty.
    """

    bags: tuple[tuple[int, ...], ...]
    children: tuple[tuple[int, ...], ...]
    root: int

    def __post_init__(self):
        if len(self.bags) != len(self.children):
            raise ValueError("one child list per bag required")
        if not (0 <= self.root < len(self.bags)):
            raise ValueError("root out of range")


def validate_nice_tree_decomp(g: Graph, td: NiceTreeDecomp, k: int) -> list[str]:
    n_nodes = len(td.bags)
    seen_child = set()
    for t in range(n_nodes):
        for c in td.children[t]:
            if not (0 <= c < n_nodes):
                return [f"node {t} lists missing child {c}"]
            if c in seen_child:
                return [f"node {c} has two parents"]
            seen_child.add(c)
    if td.root in seen_child:
        return ["root has a parent"]
    reached = set()
    stack = [td.root]
    while stack:
        t = stack.pop()
        if t in reached:
            return [f"node {t} reached twice"]
        reached.add(t)
        stack.extend(td.children[t])
    if len(reached) != n_nodes:
        return ["decomposition is not a single rooted tree"]

    bag_masks = [mask_of(b) for b in td.bags]
    for t in range(n_nodes):
        if len(set(td.bags[t])) != len(td.bags[t]):
            return [f"bag {t} repeats a vertex"]
        if len(td.bags[t]) > k:
            return [f"bag {t} holds {len(td.bags[t])} vertices, bound is {k}"]
        for v in td.bags[t]:
            if not (0 <= v < g.n):
                return [f"bag {t} names vertex {v} outside the graph"]
        kids = td.children[t]
        if len(kids) == 0:
            if td.bags[t]:
                return [f"leaf {t} has a non-empty bag"]
        elif len(kids) == 1:
            diff = bag_masks[t] ^ bag_masks[kids[0]]
            if diff.bit_count() != 1:
                return [f"node {t} neither introduces nor forgets one vertex"]
        elif len(kids) == 2:
            if bag_masks[t] != bag_masks[kids[0]] or bag_masks[t] != bag_masks[kids[1]]:
                return [f"join {t} has unequal child bags"]
        else:
            return [f"node {t} has {len(kids)} children"]
    if td.bags[td.root]:
        return ["root bag is not empty"]

    occur = [0] * g.n
    for t in range(n_nodes):
        for v in td.bags[t]:
            occur[v] |= 1 << t
    for v in range(g.n):
        if not occur[v]:
            return [f"coverage: vertex {v} appears in no bag"]
    for u, v in g.edges():
        if not any(
            bag_masks[t] >> u & 1 and bag_masks[t] >> v & 1 for t in range(n_nodes)
        ):
            return [f"coverage: edge ({u},{v}) shares no bag"]
    # occurrence sets must be connected in the tree
    parent = [-1] * n_nodes
    for t in range(n_nodes):
        for c in td.children[t]:
            parent[c] = t
    for v in range(g.n):
        nodes = list(bits(occur[v]))
        top = min(
            nodes,
            key=lambda t: _tree_depth(parent, t),
        )
        for t in nodes:
            walk = t
            while walk != top:
                walk = parent[walk]
                if walk == -1:
                    return [f"occurrences of vertex {v} are disconnected"]
                if not bag_masks[walk] >> v & 1:
                    return [f"occurrences of vertex {v} are disconnected"]
    return []


def _tree_depth(parent: list[int], t: int) -> int:
    d = 0
    while parent[t] != -1:
        t = parent[t]
        d += 1
    return d


def dist_infty_deletion_break(
    g: Graph, w: Iterable[int], td: NiceTreeDecomp, k: int
) -> BreakWitness:
    """Delete one bag of a nice tree decomposition to split w.

    The walk descends from the root, at each join towards the child
    whose cone holds most of w, and stops at the last node whose cone
    still holds a quarter. Deleting that bag separates the cone from
    the rest.
    """
    errs = validate_nice_tree_decomp(g, td, k)
    if errs:
        raise BreakError(errs[0])
    order = sorted(set(w))
    _check_vertices(g, order, "w")
    m = len(order) // 4 - k
    if m < 1:
        raise BreakError(f"need at least {4 * (1 + k)} probed vertices, got {len(order)}")
    wmask = mask_of(order)

    cones = [0] * len(td.bags)
    topo = []
    stack = [td.root]
    while stack:
        t = stack.pop()
        topo.append(t)
        stack.extend(td.children[t])
    for t in reversed(topo):
        cones[t] = mask_of(td.bags[t])
        for c in td.children[t]:
            cones[t] |= cones[c]

    cur = td.root
    while True:
        best = None
        best_count = -1
        for c in td.children[cur]:
            count = (cones[c] & wmask).bit_count()
            if count > best_count:
                best, best_count = c, count
        if best is None or 4 * best_count < len(order):
            break
        cur = best

    s = tuple(sorted(td.bags[cur]))
    smask = mask_of(s)
    a = tuple(sorted(bits(cones[cur] & wmask & ~smask)))
    b = tuple(sorted(bits(wmask & ~cones[cur] & ~smask)))
    wit = BreakWitness("deletion-infty", 0, a, b, s, None)
    if len(a) < m or len(b) < m:
        raise BreakError("bag walk left one side below the schedule")
    if not verify_break(g, wit):
        raise BreakError("separation check failed on the produced split")
    return wit


# ---------------------------------------------------------------------------
# flip layerings


@dataclass(frozen=True)
class FlipLayering:
    """Recursive witness that the graph peels into disjoint layers.

    A leaf names one vertex. An inner node partitions its span into at
    most two parts, lists the part pairs whose edges were complemented,
    and owns child layerings over disjoint spans: undoing the flip must
    disconnect the span into the child spans.
    """

    vertex: int | None = None
    parts: tuple[tuple[int, ...], ...] = ()
    flips: tuple[tuple[int, int], ...] = ()
    children: tuple["FlipLayering", ...] = ()

    def span(self) -> tuple[int, ...]:
        if self.vertex is not None:
            return (self.vertex,)
        out: list[int] = []
        for c in self.children:
            out.extend(c.span())
        return tuple(sorted(out))

    def depth(self) -> int:
        if self.vertex is not None:
            return 0
        return 1 + max(c.depth() for c in self.children)


def _realize_layering(node: FlipLayering, memo: dict) -> frozenset[tuple[int, int]]:
    got = memo.get(id(node))
    if got is not None:
        return got
    if node.vertex is not None:
        memo[id(node)] = frozenset()
        return memo[id(node)]
    edges = set()
    for c in node.children:
        edges |= _realize_layering(c, memo)
    part_of = {}
    for i, part in enumerate(node.parts):
        for v in part:
            part_of[v] = i
    span = node.span()
    flipset = {(min(i, j), max(i, j)) for i, j in node.flips}
    for a in range(len(span)):
        for b in range(a + 1, len(span)):
            u, v = span[a], span[b]
            pu, pv = part_of[u], part_of[v]
            if (min(pu, pv), max(pu, pv)) in flipset:
                e = (u, v)
                if e in edges:
                    edges.discard(e)
                else:
                    edges.add(e)
    memo[id(node)] = frozenset(edges)
    return memo[id(node)]


def validate_flip_layering(g: Graph, node: FlipLayering, k: int) -> list[str]:
    def shape(nd: FlipLayering) -> str | None:
        if nd.vertex is not None:
            if nd.parts or nd.flips or nd.children:
                return f"leaf {nd.vertex} carries inner-node data"
            if not (0 <= nd.vertex < g.n):
                return f"leaf {nd.vertex} outside the graph"
            return None
        if not nd.children:
            return "inner node without children"
        if not (1 <= len(nd.parts) <= 2):
            return "inner node needs one or two parts"
        span = set()
        for c in nd.children:
            cs = set(c.span())
            if cs & span:
                return "child spans overlap"
            span |= cs
        declared = set()
        for part in nd.parts:
            if not part:
                return "empty part declared"
            for v in part:
                if v in declared:
                    return f"vertex {v} sits in two parts"
                declared.add(v)
        if declared != span:
            return "parts do not partition the span"
        for i, j in nd.flips:
            if not (0 <= i < len(nd.parts) and 0 <= j < len(nd.parts)):
                return f"flip pair ({i},{j}) names a missing part"
        for c in nd.children:
            err = shape(c)
            if err:
                return err
        return None

    err = shape(node)
    if err:
        return [err]
    if node.depth() > k:
        return [f"layering depth {node.depth()} exceeds {k}"]
    span = node.span()
    if span != tuple(range(g.n)):
        return ["span does not cover the graph"]
    realized = _realize_layering(node, {})
    actual = frozenset(g.edges())
    if realized != actual:
        diff = next(iter(realized ^ actual))
        return [f"realized graph differs from the host at edge {diff}"]
    return []


def _lift_node_spec(g: Graph, node: FlipLayering) -> FlipSpec:
    parts = [len(node.parts)] * g.n
    for i, part in enumerate(node.parts):
        for v in part:
            parts[v] = i
    return FlipSpec.make(parts, node.flips)


def dist_infty_flip_flat(
    g: Graph, w: Iterable[int], layering: FlipLayering, k: int
) -> tuple[tuple[int, ...], FlipSpec]:
    """Scatter a chunk of w into pairwise distinct components by flips.

    Each level either already spreads enough of w over the layer's
    components, in which case undoing the level's flip finishes, or one
    component hoards more than a square root share of w and the search
    descends into its layer with the flips composed.
    """
    errs = validate_flip_layering(g, layering, k)
    if errs:
        raise BreakError(errs[0])
    order = sorted(set(w))
    _check_vertices(g, order, "w")
    memo: dict = {}

    def rec(node: FlipLayering, wset: frozenset[int]) -> tuple[list[int], FlipSpec]:
        if node.vertex is not None:
            return sorted(wset), FlipSpec.identity(g.n)
        edges = set()
        for c in node.children:
            edges |= _realize_layering(c, memo)
        span = node.span()
        sub = Graph(g.n, edges)
        scope = mask_of(span)
        comps = _components(sub, scope)
        carrying = [c for c in comps if any(c >> v & 1 for v in wset)]
        if len(carrying) >= max(1, _ceil_sqrt(len(wset))) or len(wset) <= 1:
            picks = [min(v for v in wset if c >> v & 1) for c in carrying]
            return sorted(picks), _lift_node_spec(g, node)
        best = max(
            carrying,
            key=lambda c: (sum(1 for v in wset if c >> v & 1), -(c & -c)),
        )
        for child in node.children:
            if mask_of(child.span()) & best:
                inner_w = frozenset(v for v in wset if best >> v & 1)
                picks, inner = rec(child, inner_w)
                return picks, refine_flip(_lift_node_spec(g, node), inner)
        raise BreakError("component escaped every child span")

    picks, spec = rec(layering, frozenset(order))
    w_star = tuple(picks)
    if spec.num_parts > 4 ** k:
        raise BreakError("composed flip exceeded the depth schedule")
    if len(w_star) ** (2 ** k) < len(order):
        raise BreakError("scattered set fell below the depth schedule")
    if not verify_break(g, flat_flip_witness(w_star, spec)):
        raise BreakError("separation check failed on the scattered set")
    return w_star, spec


# ---------------------------------------------------------------------------
# elimination forests


def validate_elimination_forest(g: Graph, parents: Sequence[int], k: int) -> list[str]:
    if len(parents) != g.n:
        return [f"forest covers {len(parents)} vertices, graph has {g.n}"]
    for v, p in enumerate(parents):
        if p == v:
            return [f"vertex {v} is its own parent"]
        if p != -1 and not (0 <= p < g.n):
            return [f"vertex {v} has parent {p} outside the graph"]
    state = [0] * g.n
    depth = [0] * g.n
    anc = [0] * g.n
    for v in range(g.n):
        if state[v] == 2:
            continue
        trail = []
        cur = v
        while cur != -1 and state[cur] == 0:
            state[cur] = 1
            trail.append(cur)
            cur = parents[cur]
        if cur != -1 and state[cur] == 1:
            return [f"cycle through vertex {cur}"]
        for u in reversed(trail):
            p = parents[u]
            depth[u] = 1 if p == -1 else depth[p] + 1
            anc[u] = 0 if p == -1 else anc[p] | (1 << p)
            state[u] = 2
    deepest = max(depth, default=0)
    if deepest > k:
        return [f"forest depth {deepest} exceeds {k}"]
    for u, v in g.edges():
        if not (anc[v] >> u & 1 or anc[u] >> v & 1):
            return [f"edge ({u},{v}) joins unrelated branches"]
    return []


def dist_infty_deletion_flat(
    g: Graph, w: Iterable[int], parents: Sequence[int], k: int
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Scatter a chunk of w into distinct components by few deletions.

    Mirrors the flip layering recursion with deletions: while one
    component of the current scope hoards w, delete its shallowest
    forest vertex and narrow the scope to that component.
    """
    errs = validate_elimination_forest(g, parents, k)
    if errs:
        raise BreakError(errs[0])
    order = sorted(set(w))
    _check_vertices(g, order, "w")
    depth = [0] * g.n
    for v in range(g.n):
        d, cur = 1, v
        while parents[cur] != -1:
            cur = parents[cur]
            d += 1
        depth[v] = d

    s: list[int] = []
    scope = (1 << g.n) - 1
    wmask = mask_of(order)
    w_star: tuple[int, ...] = ()
    while True:
        wc = scope & wmask
        nw = wc.bit_count()
        if nw == 0:
            break
        comps = _components(g, scope)
        carrying = [c for c in comps if c & wc]
        if len(carrying) >= max(1, _ceil_sqrt(nw)):
            w_star = tuple(sorted(next(bits(c & wc)) for c in carrying))
            break
        best = max(carrying, key=lambda c: ((c & wc).bit_count(), -(c & -c)))
        rho = min(bits(best), key=lambda v: (depth[v], v))
        if len(s) >= k:
            raise BreakError("deletion budget exhausted before scattering")
        s.append(rho)
        scope = best & ~(1 << rho)

    result = (tuple(sorted(s)), w_star)
    if not verify_break(g, flat_deletion_witness(result[0], result[1])):
        raise BreakError("separation check failed on the scattered set")
    return result
