"""Exhaustive classification of uniform (n x n)/(mu(n-1)) semi-Latin squares.

The search runs on the dual side: the dual of a uniform square with
parameter mu is a multiset of size-n co-cliques of the rook's graph H(2,n)
(one co-clique per treatment) covering every non-adjacent vertex pair
exactly mu times.  Co-cliques of size n are exactly the permutation
matrices, and isomorphism of the squares corresponds to the action of the
automorphism group of H(2,n) (row permutations x column permutations x
transposing) on those block multisets.

Two phases, then dedup:

* seed phase: orderly depth-first search over (block, multiplicity) pairs in
  (block lex, multiplicity descending) order, pruning every prefix that is
  not the lexicographic minimum of its orbit.  A prefix whose stabilizer is
  trivial is emitted as a SeedTask and not explored further.
* extension phase: per seed, exact-multicover backtracking over the
  remaining candidate pairs (no symmetry handling), yielding all solutions.
* dedup: every solution is replaced by a canonical orbit representative via
  a vectorized minimal-image computation; distinct representatives are the
  isomorphism classes.
"""
from __future__ import annotations

import itertools
import json
import math
import os
import struct
import time
from dataclasses import dataclass

import numpy as np

from .block_design import BlockDesign, eta as design_eta
from .sls_core import SemiLatinSquare, underlying_design, validate

CoCliqueBlock = tuple[int, ...]


@dataclass(frozen=True)
class HammingGraph:
    """Rook's graph on {0..n-1} x {0..n-1}; vertex (i,j) is i*n+j."""

    n: int

    @property
    def vertex_count(self) -> int:
        return self.n * self.n

    def adjacent(self, u: int, v: int) -> bool:
        if u == v:
            return False
        n = self.n
        return u // n == v // n or u % n == v % n

    def nonedges(self) -> list[tuple[int, int]]:
        n = self.n
        out = []
        for u in range(n * n):
            for v in range(u + 1, n * n):
                if u // n != v // n and u % n != v % n:
                    out.append((u, v))
        return out


def cocliques(n: int) -> list[CoCliqueBlock]:
    """All maximum co-cliques (independent sets of size n) of H(2,n): one per
    permutation, listed in lexicographic word order."""
    out = []
    for word in itertools.permutations(range(n)):
        out.append(tuple(i * n + word[i] for i in range(n)))
    return out


@dataclass(frozen=True)
class PartialSolution:
    """Pairs (block index, multiplicity), ascending block index."""

    pairs: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SeedTask:
    """A symmetry-reduced prefix plus the candidate pairs allowed to extend
    it.  For extendable seeds the prefix has trivial stabilizer; a seed that
    is already a full solution carries an empty candidate pool instead."""

    prefix: tuple[tuple[int, int], ...]
    pool: tuple[tuple[int, int], ...]
    complete: bool = False


class _Context:
    """Precomputed tables for one (n, mu) classification."""

    def __init__(self, n: int, mu: int):
        self.n = n
        self.mu = mu
        self.graph = HammingGraph(n)
        self.blocks = cocliques(n)
        self.nfact = len(self.blocks)
        words = list(itertools.permutations(range(n)))
        self.words = np.array(words, dtype=np.int16)             # (n!, n)
        self.inv_words = np.argsort(self.words, axis=1).astype(np.int16)
        self.powers = (n ** np.arange(n - 1, -1, -1)).astype(np.int64)
        self.word_codes = self.words.astype(np.int64) @ self.powers
        self.inv_codes = self.inv_words.astype(np.int64) @ self.powers
        code_to_index = {int(c): i for i, c in enumerate(self.word_codes)}
        self.code_to_index = code_to_index
        self.inv_index = np.array([code_to_index[int(c)] for c in self.inv_codes],
                                  dtype=np.int64)
        ne = self.graph.nonedges()
        self.nonedges = ne
        self.nonedge_index = {pair: i for i, pair in enumerate(ne)}
        block_ne = []
        for block in self.blocks:
            ids = []
            for a, bvert in itertools.combinations(block, 2):
                ids.append(self.nonedge_index[(a, bvert)])
            block_ne.append(tuple(ids))
        self.block_nonedges = block_ne
        cand: list[list[int]] = [[] for _ in ne]
        for bi, ids in enumerate(block_ne):
            for e in ids:
                cand[e].append(bi)
        self.nonedge_blocks = [tuple(c) for c in cand]

    # -- group action ------------------------------------------------------

    def block_index_of_vertices(self, vertices) -> int:
        n = self.n
        word = [0] * n
        for v in vertices:
            word[v // n] = v % n
        code = 0
        for x in word:
            code = code * n + x
        return self.code_to_index[code]

    def vertex_perm(self, t: int, g, h) -> tuple[int, ...]:
        """Vertex map of the element 'transpose^t then rows by g, columns
        by h'."""
        n = self.n
        out = [0] * (n * n)
        for i in range(n):
            for j in range(n):
                if t:
                    out[i * n + j] = g[j] * n + h[i]
                else:
                    out[i * n + j] = g[i] * n + h[j]
        return tuple(out)

    def group_elements(self):
        """Every automorphism of H(2,n) as a vertex permutation (brute-force
        oracle use only)."""
        perms = list(itertools.permutations(range(self.n)))
        for t in (0, 1):
            for g in perms:
                for h in perms:
                    yield self.vertex_perm(t, g, h)

    def apply_vertex_perm_to_block(self, sigma, block_index: int) -> int:
        return self.block_index_of_vertices(
            sigma[v] for v in self.blocks[block_index])


def _pair_code(ctx: _Context, block_code: int, mult: int) -> int:
    return block_code * (ctx.mu + 1) + (ctx.mu - mult)


def minimal_image(ctx: _Context, pairs, need_stab: bool = False,
                  anchors=None, test_only: bool = False):
    """Orbit-minimal representative of a pair multiset under Aut(H(2,n)).

    Returns (canonical_pairs, is_minimal, stabilizer) where canonical_pairs
    is the lexicographically least image as ((block, mult), ...) and
    stabilizer is a list of vertex permutations fixing the multiset
    (collected only when need_stab; requires the identity block to be in the
    multiset, which holds for every orbit-minimal multiset).

    anchors optionally restricts which member blocks may be mapped onto the
    identity; the restriction must be isomorphism-invariant (used by the
    profile-restricted dedup canon).  Minimality testing must use the full
    anchor set.

    test_only stops at the first strictly smaller image; canonical_pairs is
    then None.  A multiset that IS minimal still gets the full scan, so the
    stabilizer stays complete in that case.
    """
    mu = ctx.mu
    d = len(pairs)
    block_idx = np.fromiter((p[0] for p in pairs), dtype=np.int64, count=d)
    mults = np.fromiter((p[1] for p in pairs), dtype=np.int64, count=d)
    self_comp = np.sort(ctx.word_codes[block_idx] * (mu + 1) + (mu - mults))
    self_tuple = tuple(int(x) for x in self_comp)
    # the multiset itself is only a legitimate candidate when every member
    # block may anchor; with restricted anchors it would break invariance
    best = self_tuple if anchors is None else None
    nfact = ctx.nfact
    hrange = np.arange(nfact)[None, :, None]
    stab: list[tuple[int, int, int]] = []  # (t, anchor_pos, h_index)
    anchor_positions = range(d) if anchors is None else anchors
    for t in (0, 1):
        words_t = ctx.words[block_idx] if t == 0 else ctx.inv_words[block_idx]
        for pos in anchor_positions:
            b_inv = np.argsort(words_t[pos])
            sig = words_t[:, b_inv]                       # (d, n)
            x = sig[:, ctx.inv_words]                     # (d, n!, n)
            y = ctx.words[hrange, x]                      # (d, n!, n)
            codes = y.astype(np.int64) @ ctx.powers       # (d, n!)
            comp = codes * (mu + 1) + (mu - mults[:, None])
            arr = np.sort(comp, axis=0).T                 # (n!, d)
            order = np.lexsort(arr.T[::-1])
            cand = tuple(int(v) for v in arr[order[0]])
            if best is None or cand < best:
                best = cand
                if test_only and cand < self_tuple:
                    return None, False, []
            if need_stab:
                hits = np.nonzero((arr == self_comp).all(axis=1))[0]
                for hi in hits:
                    stab.append((t, pos, int(hi)))
    is_minimal = best == self_tuple
    canonical = tuple(
        (ctx.code_to_index[c // (mu + 1)], mu - (c % (mu + 1))) for c in best)
    stab_perms: list[tuple[int, ...]] = []
    if need_stab:
        for t, pos, hi in stab:
            h = tuple(int(v) for v in ctx.words[hi])
            bw = ctx.words[block_idx[pos]] if t == 0 else ctx.inv_words[block_idx[pos]]
            g = tuple(h[int(bw[i])] for i in range(ctx.n))  # g = h o word
            stab_perms.append(ctx.vertex_perm(t, g, h))
    return canonical, is_minimal, stab_perms


def _feasible_mult(ctx: _Context, coverage, block: int) -> int:
    room = ctx.mu
    for e in ctx.block_nonedges[block]:
        room = min(room, ctx.mu - coverage[e])
        if room == 0:
            return 0
    return room


def _orbit_min_ok(ctx: _Context, stab_perms, block: int) -> bool:
    """True iff no stabilizer element maps the block to a smaller one."""
    for sigma in stab_perms:
        if ctx.apply_vertex_perm_to_block(sigma, block) < block:
            return False
    return True


DEFAULT_SEED_DEPTH = 4


def seed_phase(n: int, mu: int, depth_policy: int | None = None) -> list[SeedTask]:
    """Symmetry-reduced seed set: every isomorphism class of solutions has a
    representative extending some emitted prefix from its pool.

    A prefix is emitted once its stabilizer is trivial; depth_policy, when
    given, also force-emits every surviving prefix of that length, because
    some lex-minimal chains keep a small stabilizer for a long time and the
    per-node minimality test gets expensive.  Either way the downstream dedup
    does not rely on seeds being orbit-unique.
    """
    ctx = _Context(n, mu)
    max_depth = depth_policy if depth_policy is not None else math.inf
    seeds: list[SeedTask] = []
    coverage = [0] * len(ctx.nonedges)
    total_cover = mu * len(ctx.nonedges)

    def pool_after(prefix) -> tuple[tuple[int, int], ...]:
        frontier = prefix[-1][0]
        pool = []
        for b in range(frontier + 1, ctx.nfact):
            room = _feasible_mult(ctx, coverage, b)
            for m in range(room, 0, -1):
                pool.append((b, m))
        return tuple(pool)

    def descend(prefix: list[tuple[int, int]], covered: int,
                stab_perms: list[tuple[int, ...]]):
        if covered == total_cover:
            seeds.append(SeedTask(prefix=tuple(prefix), pool=(), complete=True))
            return
        if prefix and (len(stab_perms) == 1 or len(prefix) >= max_depth):
            seeds.append(SeedTask(prefix=tuple(prefix), pool=pool_after(prefix)))
            return
        frontier = prefix[-1][0] if prefix else -1
        for b in range(frontier + 1, ctx.nfact):
            room = _feasible_mult(ctx, coverage, b)
            if room == 0:
                continue
            if prefix and not _orbit_min_ok(ctx, stab_perms, b):
                continue
            for m in range(room, 0, -1):
                child = prefix + [(b, m)]
                if prefix:
                    _, is_minimal, child_stab = minimal_image(
                        ctx, child, need_stab=True, test_only=True)
                    if not is_minimal:
                        continue
                else:
                    # single-pair prefixes are minimal iff they use block 0
                    if b != 0:
                        continue
                    _, _, child_stab = minimal_image(ctx, child, need_stab=True)
                for e in ctx.block_nonedges[b]:
                    coverage[e] += m
                descend(child, covered + m * len(ctx.block_nonedges[b]),
                        child_stab)
                for e in ctx.block_nonedges[b]:
                    coverage[e] -= m
        return

    descend([], 0, [])
    return seeds


def extend(ctx: _Context, task: SeedTask):
    """All completions of a seed prefix using pairs from its pool: exact
    multicover of the non-edge residuals, most-constrained branching, no
    symmetry handling.  Yields full pair tuples."""
    mu = ctx.mu
    ne_count = len(ctx.nonedges)
    res = [mu] * ne_count
    for b, m in task.prefix:
        for e in ctx.block_nonedges[b]:
            res[e] -= m
            if res[e] < 0:
                return
    if task.complete or all(x == 0 for x in res):
        if all(x == 0 for x in res):
            yield tuple(task.prefix)
        return
    allowed = sorted({b for b, _m in task.pool})
    alive = [False] * ctx.nfact
    live_count = [0] * ne_count
    # a block stays usable only while every one of its non-edges has room
    for b in allowed:
        if min(res[e] for e in ctx.block_nonedges[b]) >= 1:
            alive[b] = True
            for e in ctx.block_nonedges[b]:
                live_count[e] += 1

    chosen: list[tuple[int, int]] = []
    out_prefix = tuple(task.prefix)

    def kill(b: int, journal: list[int]) -> bool:
        alive[b] = False
        journal.append(b)
        ok = True
        for e in ctx.block_nonedges[b]:
            live_count[e] -= 1
            if res[e] > 0 and live_count[e] * mu < res[e]:
                ok = False
        return ok

    def apply_pair(b: int, m: int, journal_blocks: list[int],
                   journal_res: list[tuple[int, int]]) -> bool:
        ok = True
        for e in ctx.block_nonedges[b]:
            if res[e] < m:
                ok = False
            journal_res.append((e, res[e]))
            res[e] -= m
        if not ok:
            return False
        if not kill(b, journal_blocks):
            ok = False
        for e in ctx.block_nonedges[b]:
            if res[e] == 0:
                for c in ctx.nonedge_blocks[e]:
                    if alive[c]:
                        if not kill(c, journal_blocks):
                            ok = False
        return ok

    def undo(journal_blocks: list[int], journal_res: list[tuple[int, int]]):
        for b in reversed(journal_blocks):
            alive[b] = True
            for e in ctx.block_nonedges[b]:
                live_count[e] += 1
        for e, old in reversed(journal_res):
            res[e] = old

    def search():
        # most-constrained open non-edge
        target = -1
        best_live = None
        for e in range(ne_count):
            if res[e] > 0:
                lc = live_count[e]
                if lc * mu < res[e]:
                    return
                if best_live is None or lc < best_live:
                    best_live = lc
                    target = e
                    if lc == 1:
                        break
        if target < 0:
            yield out_prefix + tuple(sorted(chosen))
            return
        cands = [c for c in ctx.nonedge_blocks[target] if alive[c]]
        need = res[target]

        def combos(start: int, remaining: int):
            """Multisets of (block, mult) over cands[start:] summing to
            remaining, blocks strictly ascending."""
            if remaining == 0:
                yield []
                return
            for ci in range(start, len(cands)):
                b = cands[ci]
                cap = min(remaining, mu,
                          min(res[e] for e in ctx.block_nonedges[b]))
                for m in range(cap, 0, -1):
                    for rest in combos(ci + 1, remaining - m):
                        yield [(b, m)] + rest

        for combo in combos(0, need):
            journal_blocks: list[int] = []
            journal_res: list[tuple[int, int]] = []
            ok = True
            for b, m in combo:
                if not alive[b]:
                    ok = False
                    break
                if not apply_pair(b, m, journal_blocks, journal_res):
                    ok = False
                    break
            if ok:
                chosen.extend(combo)
                yield from search()
                del chosen[len(chosen) - len(combo):]
            undo(journal_blocks, journal_res)

    yield from search()


# -- solutions back to squares ----------------------------------------------


def square_from_pairs(ctx: _Context, pairs) -> SemiLatinSquare:
    """Primal square of a dual solution: one treatment per block copy, in
    pair order; cell (i,j) collects the treatments whose permutation sends
    row i to column j."""
    n = ctx.n
    cells: list[list[list[int]]] = [[[] for _ in range(n)] for _ in range(n)]
    t = 0
    for b, m in pairs:
        for _copy in range(m):
            t += 1
            for v in ctx.blocks[b]:
                cells[v // n][v % n].append(t)
    return validate(n, ctx.mu * (n - 1), cells)


def dual_design_from_pairs(ctx: _Context, pairs) -> BlockDesign:
    blocks = []
    for b, m in pairs:
        block = tuple(v + 1 for v in ctx.blocks[b])
        blocks.extend([block] * m)
    return BlockDesign(v=ctx.n * ctx.n, blocks=blocks)


# -- dedup -------------------------------------------------------------------


def _profile_anchor_positions(ctx: _Context, pairs) -> list[int]:
    """Positions whose (multiplicity, intersection pattern) profile is
    minimal; the true orbit minimum is not guaranteed to anchor here, but the
    set is isomorphism-invariant, so restricting the minimal-image search to
    these anchors still yields one canonical form per orbit."""
    masks = []
    for b, _m in pairs:
        mask = 0
        for v in ctx.blocks[b]:
            mask |= 1 << v
        masks.append(mask)
    best = None
    positions: list[int] = []
    for i, (_b, m) in enumerate(pairs):
        pattern = sorted(
            ((masks[i] & masks[j]).bit_count(), pairs[j][1])
            for j in range(len(pairs)) if j != i)
        prof = (ctx.mu - m, tuple(pattern))
        if best is None or prof < best:
            best = prof
            positions = [i]
        elif prof == best:
            positions.append(i)
    return positions


def canonical_solution(ctx: _Context, pairs) -> tuple[tuple[int, int], ...]:
    """Dedup key: minimal image over the profile-restricted anchor set."""
    anchors = _profile_anchor_positions(ctx, pairs)
    canonical, _, _ = minimal_image(ctx, pairs, anchors=anchors)
    return canonical


def class_certificate(ctx: _Context, pairs) -> str:
    """Canonical byte encoding of an isomorphism class, hex form.

    pairs must already be the orbit-minimal multiset (full anchor set); the
    encoding packs n, the cell pair count, and each (column word, count)
    item, so equality decides class identity across runs and machines.
    """
    out = struct.pack(">BBH", ctx.n, ctx.mu, len(pairs))
    for b, m in pairs:
        out += struct.pack(">IH", int(ctx.word_codes[b]), m)
    return out.hex()


# -- orchestration -----------------------------------------------------------


@dataclass(frozen=True)
class ClassRecord:
    index: int
    pairs: tuple[tuple[int, int], ...]
    eta: tuple[int, ...]
    aut_square: int
    aut_dual: int
    certificate: str
    square: SemiLatinSquare


@dataclass(frozen=True)
class ClassificationResult:
    n: int
    mu: int
    seed_count: int
    seed_range: tuple[int, int]
    solution_count: int
    classes: tuple[ClassRecord, ...]
    elapsed_seconds: float
    complete: bool

    @property
    def class_count(self) -> int:
        return len(self.classes)


_WCTX: _Context | None = None


def _worker_init(n: int, mu: int):
    global _WCTX
    _WCTX = _Context(n, mu)


def _solve_seed(arg):
    idx, task = arg
    ctx = _WCTX
    canon = set()
    count = 0
    for sol in extend(ctx, task):
        count += 1
        canon.add(canonical_solution(ctx, sol))
    return idx, count, sorted(canon)


def _load_checkpoint(path: str, n: int, mu: int, seed_count: int) -> dict:
    done: dict[int, tuple[int, list]] = {}
    if not os.path.exists(path):
        return done
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            return done
        header = json.loads(first).get("header")
        if header != {"n": n, "mu": mu, "seed_count": seed_count}:
            raise ValueError("checkpoint belongs to a different run")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            canon = [tuple((b, m) for b, m in sol) for sol in rec["canon"]]
            done[rec["seed"]] = (rec["count"], canon)
    return done


def _checkpoint_writer(path: str, n: int, mu: int, seed_count: int,
                       fresh: bool):
    mode = "w" if fresh else "a"
    fh = open(path, mode, encoding="utf-8")
    if fresh:
        fh.write(json.dumps(
            {"header": {"n": n, "mu": mu, "seed_count": seed_count}}) + "\n")
        fh.flush()
    return fh


def classify_uniform(n: int, mu: int, workers: int = 1,
                     out_dir: str | None = None,
                     checkpoint_path: str | None = None,
                     seed_range: tuple[int, int] | None = None,
                     depth_policy: int | None = None) -> ClassificationResult:
    """Classify uniform (n x n)/(mu(n-1)) semi-Latin squares up to
    isomorphism.  Deterministic: the result does not depend on worker count
    or scheduling.  seed_range (half-open, over the seed list) restricts the
    run to a shard; the result is then marked incomplete."""
    if n < 3 or mu < 1:
        raise ValueError("need n >= 3 and mu >= 1")
    t0 = time.monotonic()
    ctx = _Context(n, mu)
    if depth_policy is None:
        depth_policy = DEFAULT_SEED_DEPTH
    seeds = seed_phase(n, mu, depth_policy)
    lo, hi = seed_range if seed_range is not None else (0, len(seeds))
    if not (0 <= lo <= hi <= len(seeds)):
        raise ValueError(f"seed range {lo}..{hi} outside 0..{len(seeds)}")
    selected = list(range(lo, hi))
    done: dict[int, tuple[int, list]] = {}
    writer = None
    if checkpoint_path:
        done = _load_checkpoint(checkpoint_path, n, mu, len(seeds))
        writer = _checkpoint_writer(checkpoint_path, n, mu, len(seeds),
                                    fresh=not done)
    todo = [i for i in selected if i not in done]

    def record(idx, count, canon):
        done[idx] = (count, canon)
        if writer is not None:
            writer.write(json.dumps(
                {"seed": idx, "count": count,
                 "canon": [[list(p) for p in sol] for sol in canon]}) + "\n")
            writer.flush()

    try:
        if workers > 1 and len(todo) > 1:
            import multiprocessing as mp

            with mp.get_context("fork").Pool(
                    processes=workers, initializer=_worker_init,
                    initargs=(n, mu)) as pool:
                jobs = [(i, seeds[i]) for i in todo]
                for idx, count, canon in pool.imap_unordered(
                        _solve_seed, jobs, chunksize=1):
                    record(idx, count, canon)
        else:
            for i in todo:
                canon_set = set()
                count = 0
                for sol in extend(ctx, seeds[i]):
                    count += 1
                    canon_set.add(canonical_solution(ctx, sol))
                record(i, count, sorted(canon_set))
    finally:
        if writer is not None:
            writer.close()

    solution_count = sum(done[i][0] for i in selected)
    merged = set()
    for i in selected:
        merged.update(done[i][1])

    # one representative per orbit: re-minimize over the full anchor set so
    # the stored form is the true orbit minimum, and collect stabilizers
    records = []
    for key in sorted(merged):
        rep, _, stab = minimal_image(ctx, key, need_stab=True)
        square = square_from_pairs(ctx, rep)
        aut_dual = len(stab)
        aut_square = aut_dual
        for _b, m in rep:
            aut_square *= math.factorial(m)
        records.append(ClassRecord(
            index=0,
            pairs=rep,
            eta=design_eta(underlying_design(square)),
            aut_square=aut_square,
            aut_dual=aut_dual,
            certificate=class_certificate(ctx, rep),
            square=square,
        ))
    records.sort(key=lambda r: (r.eta, r.certificate))
    records = [ClassRecord(index=i + 1, pairs=r.pairs, eta=r.eta,
                           aut_square=r.aut_square, aut_dual=r.aut_dual,
                           certificate=r.certificate, square=r.square)
               for i, r in enumerate(records)]
    result = ClassificationResult(
        n=n, mu=mu, seed_count=len(seeds), seed_range=(lo, hi),
        solution_count=solution_count, classes=tuple(records),
        elapsed_seconds=time.monotonic() - t0,
        complete=(lo, hi) == (0, len(seeds)))
    if out_dir is not None:
        write_classification(result, out_dir)
    return result


# -- results on disk ---------------------------------------------------------


class IncompleteRunError(RuntimeError):
    pass


def write_classification(result: ClassificationResult, out_dir: str):
    os.makedirs(os.path.join(out_dir, "classes"), exist_ok=True)
    index_entries = []
    for rec in result.classes:
        fname = f"class_{rec.index:05d}.json"
        payload = {
            "id": rec.index,
            "n": result.n,
            "mu": result.mu,
            "eta": list(rec.eta),
            "aut_square": rec.aut_square,
            "aut_dual": rec.aut_dual,
            "certificate": rec.certificate,
            "pairs": [list(p) for p in rec.pairs],
            "square": json.loads(rec.square.to_json()),
        }
        with open(os.path.join(out_dir, "classes", fname), "w",
                  encoding="utf-8") as fh:
            json.dump(payload, fh, separators=(",", ":"))
            fh.write("\n")
        index_entries.append({
            "id": rec.index, "eta": list(rec.eta),
            "aut_square": rec.aut_square, "aut_dual": rec.aut_dual,
            "certificate": rec.certificate, "file": f"classes/{fname}"})
    with open(os.path.join(out_dir, "index.json"), "w",
              encoding="utf-8") as fh:
        json.dump({"n": result.n, "mu": result.mu,
                   "class_count": result.class_count,
                   "classes": index_entries}, fh, indent=1)
        fh.write("\n")
    manifest = {
        "n": result.n, "mu": result.mu,
        "seed_count": result.seed_count,
        "seed_range": list(result.seed_range),
        "solution_count": result.solution_count,
        "class_count": result.class_count,
        "elapsed_seconds": round(result.elapsed_seconds, 3),
        "complete": result.complete,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")


def load_classification(out_dir: str, with_squares: bool = False):
    """(manifest, index, records).  Raises IncompleteRunError unless the
    manifest marks the run complete."""
    mpath = os.path.join(out_dir, "manifest.json")
    if not os.path.exists(mpath):
        raise IncompleteRunError(f"no manifest in {out_dir}")
    with open(mpath, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if not manifest.get("complete"):
        raise IncompleteRunError(
            f"classification in {out_dir} is a partial shard")
    with open(os.path.join(out_dir, "index.json"), "r",
              encoding="utf-8") as fh:
        index = json.load(fh)
    records = None
    if with_squares:
        records = []
        for entry in index["classes"]:
            with open(os.path.join(out_dir, entry["file"]), "r",
                      encoding="utf-8") as fh:
                records.append(json.load(fh))
    return manifest, index, records


# -- brute-force oracle -------------------------------------------------------


def naive_classify(n: int, mu: int) -> list[tuple[tuple[int, int], ...]]:
    """Independent oracle: enumerate every solution with no symmetry
    reduction, then dedup by explicitly minimizing over all 2*(n!)^2 group
    elements.  Only feasible for small n."""
    ctx = _Context(n, mu)
    pool = tuple((b, m) for b in range(ctx.nfact)
                 for m in range(mu, 0, -1))
    task = SeedTask(prefix=(), pool=pool)
    group = list(ctx.group_elements())
    reps = set()
    for sol in extend(ctx, task):
        best = None
        for sigma in group:
            mapped = sorted(
                (ctx.apply_vertex_perm_to_block(sigma, b) * (mu + 1)
                 + (mu - m)) for b, m in sol)
            if best is None or mapped < best:
                best = mapped
        reps.add(tuple(
            (c // (mu + 1), mu - c % (mu + 1)) for c in best))
    return sorted(reps)
