"""Canonical labelling for vertex-colored graphs, with certificates,
isomorphism tests and automorphism group orders for block designs and
semi-Latin squares.

The canonicalizer is self-contained: iterated equitable refinement plus
individualization backtracking.  Each refinement also yields a trace of how
cells split, which is a labelling-independent invariant; leaves are ranked by
(trace path, adjacency encoding) and branches whose trace cannot reach the
minimum are cut.  Automorphisms discovered at equal leaves prune sibling
candidates, but only where they fix the already-individualized vertices;
anything looser would let the outcome depend on the input labelling.  Group
orders come from a separate orbit-stabilizer recursion built on canonical
values of vertex-individualized graphs, which keeps the counting logic
independent of the pruning logic.
"""
from __future__ import annotations

import hashlib
import math
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .block_design import BlockDesign
    from .sls_core import SemiLatinSquare


@dataclass(frozen=True)
class ColoredGraph:
    """Undirected graph with an ordered initial color partition.

    adj holds one bitmask per vertex; colors[v] is the 0-based class of v and
    classes must be numbered consecutively from 0.
    """

    n: int
    colors: tuple[int, ...]
    adj: tuple[int, ...]

    @classmethod
    def from_edges(cls, n: int, colors, edges) -> "ColoredGraph":
        masks = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError("loops are not supported")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return cls(n=n, colors=tuple(colors), adj=tuple(masks))

    def initial_cells(self) -> list[list[int]]:
        count = max(self.colors) + 1 if self.colors else 0
        cells: list[list[int]] = [[] for _ in range(count)]
        for v, c in enumerate(self.colors):
            cells[c].append(v)
        return [cell for cell in cells if cell]


@dataclass(frozen=True)
class Certificate:
    """Canonical byte form plus the automorphism group order."""

    data: bytes
    group_order: int

    @property
    def hex(self) -> str:
        return self.data.hex()


Trace = tuple


def _refine(adj: tuple[int, ...], cells: list[list[int]],
            active: tuple[int, ...] | None = None) -> tuple[list[list[int]], Trace]:
    """Coarsest equitable refinement, driven by a queue of splitter cells.

    Each splitter partitions every cell by neighbor counts into it; fragments
    are ordered by count, spliced in place, and enqueued (all of them if the
    split cell was still pending, otherwise all but one largest).  active
    names the positions used as initial splitters; None means every cell, the
    right choice for a fresh partition.  After individualizing an equitable
    partition only the two new fragments need to seed the queue.

    Also returns a trace recording which positions split and into what count
    and size shapes.  The trace is invariant under relabelling, so branches
    of the search tree can be compared without encoding full leaves.
    """
    store: dict[int, list[int]] = {i: list(c) for i, c in enumerate(cells)}
    order = list(store)
    next_id = len(order)
    trace: list = []
    queue = deque(order if active is None else [order[p] for p in active])
    queued = set(queue)
    while queue:
        sid = queue.popleft()
        queued.discard(sid)
        scell = store.get(sid)
        if scell is None:
            continue
        smask = 0
        for v in scell:
            smask |= 1 << v
        pos = 0
        while pos < len(order):
            cid = order[pos]
            cell = store[cid]
            if len(cell) == 1:
                pos += 1
                continue
            buckets: dict[int, list[int]] = {}
            for v in cell:
                buckets.setdefault((adj[v] & smask).bit_count(), []).append(v)
            if len(buckets) == 1:
                pos += 1
                continue
            keys = sorted(buckets)
            trace.append((pos, tuple((k, len(buckets[k])) for k in keys)))
            del store[cid]
            frag_ids = []
            for k in keys:
                store[next_id] = buckets[k]
                frag_ids.append(next_id)
                next_id += 1
            order[pos:pos + 1] = frag_ids
            if cid in queued:
                queued.discard(cid)
                enqueue = frag_ids
            else:
                big = max(range(len(frag_ids)),
                          key=lambda i: len(store[frag_ids[i]]))
                enqueue = [fid for i, fid in enumerate(frag_ids) if i != big]
            for fid in enqueue:
                queue.append(fid)
                queued.add(fid)
            pos += len(frag_ids)
    return [store[cid] for cid in order], tuple(trace)


def _individualize(cells: list[list[int]], cell_index: int, v: int) -> list[list[int]]:
    out = []
    for i, cell in enumerate(cells):
        if i == cell_index:
            out.append([v])
            out.append([u for u in cell if u != v])
        else:
            out.append(list(cell))
    return out


def _target_cell(cells: list[list[int]]) -> int:
    best = -1
    best_size = None
    for i, cell in enumerate(cells):
        if len(cell) > 1 and (best_size is None or len(cell) < best_size):
            best = i
            best_size = len(cell)
    return best


def _encode(adj: tuple[int, ...], lab: list[int]) -> bytes:
    """Upper-triangle adjacency bits under the labelling, packed to bytes."""
    n = len(lab)
    bits = 0
    width = 0
    for i in range(n):
        row_adj = adj[lab[i]]
        for j in range(i + 1, n):
            bits = (bits << 1) | ((row_adj >> lab[j]) & 1)
            width += 1
    return bits.to_bytes((width + 7) // 8 or 1, "big")


_MAX_GENS = 60


def _orbit_hits(v: int, anchors: list[int], gens: list[tuple[int, ...]]) -> bool:
    """Whether v lies in the orbit of any anchor under the given generators."""
    if not anchors or not gens:
        return False
    seen = set(anchors)
    stack = list(anchors)
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                if y == v:
                    return True
                seen.add(y)
                stack.append(y)
    return v in seen


def _search(adj: tuple[int, ...],
            start: list[list[int]]) -> tuple[tuple[Trace, bytes], list[int]]:
    """Minimum leaf of the individualization tree rooted at an already
    refined partition.

    Leaves carry the value (path, code): path is the per-level tuple of
    child-refinement traces, code the adjacency encoding of the discrete
    partition.  Only children realizing the level's minimum trace can contain
    the minimum leaf, and a path prefix already beyond the best value cannot
    improve it, so both are cut.  Automorphisms found at value-equal leaves
    prune siblings, restricted to generators fixing the current path
    pointwise (those map the node's subtree onto itself).
    """
    gens: list[tuple[int, ...]] = []
    first_val: tuple[Trace, bytes] | None = None
    first_lab: list[int] | None = None
    best_val: tuple[Trace, bytes] | None = None
    best_lab: list[int] | None = None

    def walk(part: list[list[int]], path: list[Trace], fixed: list[int]):
        nonlocal first_val, first_lab, best_val, best_lab
        target = _target_cell(part)
        if target < 0:
            lab = [cell[0] for cell in part]
            val = (tuple(path), _encode(adj, lab))
            if first_val is None:
                first_val, first_lab = val, lab
            else:
                for ref_val, ref_lab in ((first_val, first_lab),
                                         (best_val, best_lab)):
                    if ref_val == val and ref_lab is not None and ref_lab != lab:
                        g = [0] * len(lab)
                        for a, b in zip(ref_lab, lab):
                            g[a] = b
                        gt = tuple(g)
                        if len(gens) < _MAX_GENS and gt not in gens:
                            gens.append(gt)
                        break
            if best_val is None or val < best_val:
                best_val, best_lab = val, lab
            return
        cell = part[target]
        # candidates are taken lazily: orbit-prune before paying for the
        # refinement, drop traces already beaten, and let generators found in
        # earlier subtrees shrink the remainder of the cell
        seen: list[int] = []
        cur_min: Trace | None = None
        for v in cell:
            fixing = [g for g in gens if all(g[x] == x for x in fixed)]
            if _orbit_hits(v, seen, fixing):
                continue
            seen.append(v)
            child, tr = _refine(adj, _individualize(part, target, v),
                                (target, target + 1))
            if cur_min is not None and tr > cur_min:
                continue
            cur_min = tr
            path.append(tr)
            descend = True
            if best_val is not None:
                bp = best_val[0]
                pt = tuple(path)
                m = min(len(bp), len(pt))
                if pt[:m] > bp[:m]:
                    descend = False
            if descend:
                fixed.append(v)
                walk(child, path, fixed)
                fixed.pop()
            path.pop()

    walk(start, [], [])
    assert best_val is not None and best_lab is not None
    return best_val, best_lab


def _canonical_bytes(graph: ColoredGraph, cells: list[list[int]] | None = None) -> bytes:
    """Canonical byte string: equal exactly for isomorphic colored graphs."""
    adj = graph.adj
    if cells is None:
        cells = graph.initial_cells()
    start, _ = _refine(adj, cells)
    (path, code), _lab = _search(adj, start)
    # positions of the refined start partition keep their spans across all
    # leaves, so class sizes + colors are part of the invariant header
    header = graph.n.to_bytes(4, "big") + len(start).to_bytes(4, "big")
    spans = b"".join(len(cell).to_bytes(4, "big")
                     + graph.colors[cell[0]].to_bytes(2, "big")
                     for cell in start)
    digest = hashlib.sha256(repr(path).encode()).digest()
    return header + spans + digest + code


def graph_aut_order(graph: ColoredGraph, cells: list[list[int]] | None = None) -> int:
    """Automorphism group order by orbit-stabilizer over canonical values."""
    adj = graph.adj
    if cells is None:
        cells = graph.initial_cells()

    def rec(part: list[list[int]]) -> int:
        target = _target_cell(part)
        if target < 0:
            return 1
        cell = part[target]
        v0 = cell[0]
        child0, _ = _refine(adj, _individualize(part, target, v0),
                            (target, target + 1))
        stab = rec(child0)
        spans0 = tuple(len(c) for c in child0)
        val0, lab0 = _search(adj, child0)
        # u joins the orbit of v0 iff individualizing u gives the same
        # canonical value; the two canonical labellings then exhibit an
        # automorphism, whose action on the cell spares later siblings
        parent = {u: u for u in cell}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        orbit = 1
        for u in cell[1:]:
            if find(u) == find(v0):
                orbit += 1
                continue
            child_u, _ = _refine(adj, _individualize(part, target, u),
                                 (target, target + 1))
            if tuple(len(c) for c in child_u) != spans0:
                continue
            val_u, lab_u = _search(adj, child_u)
            if val_u == val0:
                orbit += 1
                for a, b in zip(lab0, lab_u):
                    if a in parent and b in parent:
                        ra, rb = find(a), find(b)
                        if ra != rb:
                            parent[ra] = rb
        return orbit * stab

    part0, _ = _refine(adj, cells)
    return rec(part0)


def graph_certificate(graph: ColoredGraph) -> Certificate:
    return Certificate(data=_canonical_bytes(graph),
                       group_order=graph_aut_order(graph))


def _design_graph(design: "BlockDesign") -> tuple[ColoredGraph, int]:
    """Bipartite incidence graph with one vertex per block copy; returns the
    graph and the product of multiplicity factorials (the slot-swap factor)."""
    v = design.v
    b = design.b
    colors = [0] * v + [1] * b
    edges = []
    for j, block in enumerate(design.blocks):
        for t in block:
            edges.append((t - 1, v + j))
    mult_factor = 1
    run = 1
    for prev, cur in zip(design.blocks, design.blocks[1:]):
        if prev == cur:
            run += 1
        else:
            mult_factor *= math.factorial(run)
            run = 1
    mult_factor *= math.factorial(run)
    return (ColoredGraph.from_edges(v + b, colors, edges), mult_factor)


def design_certificate(design: "BlockDesign") -> Certificate:
    """Certificate of the block design; equality decides design isomorphism
    (block multisets, so repeated blocks matter).

    group_order is the design's automorphism count: treatment permutations
    preserving the block multiset.  Slot swaps among equal copies are divided
    out of the graph group.
    """
    graph, mult_factor = _design_graph(design)
    data = _canonical_bytes(graph)
    graph_order = graph_aut_order(graph)
    assert graph_order % mult_factor == 0
    return Certificate(data=data, group_order=graph_order // mult_factor)


def _square_graph(square: "SemiLatinSquare") -> ColoredGraph:
    """Row and column vertices share one color class so transposing is an
    isomorphism; then cells, then treatments."""
    n = square.n
    v = square.v
    total = 2 * n + n * n + v
    colors = [0] * (2 * n) + [1] * (n * n) + [2] * v
    edges = []
    for i in range(n):
        for j in range(n):
            cell_vertex = 2 * n + i * n + j
            edges.append((cell_vertex, i))          # its row
            edges.append((cell_vertex, n + j))      # its column
            for t in square.cells[i][j]:
                edges.append((cell_vertex, 2 * n + n * n + t - 1))
    return ColoredGraph.from_edges(total, colors, edges)


def sls_certificate(square: "SemiLatinSquare") -> Certificate:
    """Certificate of a semi-Latin square; equality decides isomorphism up to
    row/column permutation, transposing, and treatment renaming."""
    graph = _square_graph(square)
    return Certificate(data=_canonical_bytes(graph),
                       group_order=graph_aut_order(graph))


def sls_are_isomorphic(a: "SemiLatinSquare", b: "SemiLatinSquare") -> bool:
    if (a.n, a.k) != (b.n, b.k):
        return False
    return _canonical_bytes(_square_graph(a)) == _canonical_bytes(_square_graph(b))


def aut_order(obj) -> int:
    """Automorphism group order of a square, design, or colored graph."""
    from .block_design import BlockDesign
    from .sls_core import SemiLatinSquare

    if isinstance(obj, SemiLatinSquare):
        return graph_aut_order(_square_graph(obj))
    if isinstance(obj, BlockDesign):
        graph, mult_factor = _design_graph(obj)
        order = graph_aut_order(graph)
        assert order % mult_factor == 0
        return order // mult_factor
    if isinstance(obj, ColoredGraph):
        return graph_aut_order(obj)
    raise TypeError(f"no automorphism notion for {type(obj).__name__}")
