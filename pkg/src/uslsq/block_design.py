"""Block designs: concurrence, PV aberration, efficiency spectra, and the
derived designs of a uniform semi-Latin square.

A (v,b,r,k)-design here is a multiset of b blocks (k-subsets of 1..v) in
which every treatment occurs in exactly r blocks.  BlockDesign itself only
requires blocks to be nonempty subsets of 1..v; the derived quantities that
need equireplication or constant block size check for it and complain.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:  # import cycle: sls_core builds on BlockDesign
    from .sls_core import SemiLatinSquare


@dataclass(frozen=True)
class BlockDesign:
    v: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.v < 1:
            raise ValueError(f"need v >= 1, got {self.v}")
        if not self.blocks:
            raise ValueError("design needs at least one block")
        norm = []
        for block in self.blocks:
            block = tuple(sorted(block))
            if not block:
                raise ValueError("empty block")
            if len(set(block)) != len(block):
                raise ValueError(f"block repeats a treatment: {block}")
            if block[0] < 1 or block[-1] > self.v:
                raise ValueError(f"block {block} outside 1..{self.v}")
            norm.append(block)
        object.__setattr__(self, "blocks", tuple(sorted(norm)))

    @property
    def b(self) -> int:
        return len(self.blocks)

    @property
    def r(self) -> int:
        """Common replication; raises if the design is not equireplicate."""
        counts = [0] * (self.v + 1)
        for block in self.blocks:
            for t in block:
                counts[t] += 1
        reps = set(counts[1:])
        if len(reps) != 1:
            raise ValueError(f"not equireplicate: replications {sorted(reps)}")
        return reps.pop()

    @property
    def k(self) -> int:
        """Common block size; raises if blocks vary in size."""
        sizes = {len(block) for block in self.blocks}
        if len(sizes) != 1:
            raise ValueError(f"block sizes vary: {sorted(sizes)}")
        return sizes.pop()

    def to_json(self) -> str:
        return json.dumps({"v": self.v, "blocks": [list(b) for b in self.blocks]},
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "BlockDesign":
        obj = json.loads(text)
        return cls(v=obj["v"], blocks=tuple(tuple(b) for b in obj["blocks"]))


def concurrence_matrix(design: BlockDesign) -> np.ndarray:
    """v x v integer matrix; entry (a,b) counts blocks containing both,
    so the diagonal holds replications."""
    inc = np.zeros((design.v, design.b), dtype=np.int64)
    for j, block in enumerate(design.blocks):
        for t in block:
            inc[t - 1, j] = 1
    return inc @ inc.T


def eta(design: BlockDesign) -> tuple[int, ...]:
    """Concurrence census: entry i counts unordered pairs of distinct
    treatments that appear together in exactly i blocks.  Length r+1."""
    r = design.r
    design.k  # constant block size required for the census to be comparable
    lam = concurrence_matrix(design)
    counts = [0] * (r + 1)
    v = design.v
    for a in range(v):
        row = lam[a]
        for b_ in range(a + 1, v):
            counts[row[b_]] += 1
    return tuple(counts)


def eta_less(a: tuple[int, ...], B: tuple[int, ...]) -> int:
    """Lexicographic comparison: -1 if a is better (smaller), 0 equal, 1 worse."""
    if len(a) != len(B):
        raise ValueError(f"census lengths differ: {len(a)} vs {len(B)}")
    if tuple(a) < tuple(B):
        return -1
    if tuple(a) > tuple(B):
        return 1
    return 0


def eta0_lower_bound(v: int, b: int, r: int, k: int, mu: int) -> Fraction:
    """Best possible count of never-concurring pairs for a (v,b,r,k)-design
    whose maximum concurrence is mu; exact rational."""
    del b  # not part of the closed form
    return Fraction(v * (v - k - (r - 1) * (k - mu)), 2)


def sym_eig(matrix: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
    rotations iterated until the off-diagonal norm drops below tol."""
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(m, m.T, atol=1e-10):
        raise ValueError("matrix must be symmetric")
    dim = m.shape[0]
    if dim == 1:
        return m.reshape(1).copy()
    off_mask = ~np.eye(dim, dtype=bool)
    for _sweep in range(100):
        # norm of the off-diagonal part, summed directly; subtracting
        # diagonal squares from the full norm cancels catastrophically
        off = np.sqrt(np.sum(np.square(m[off_mask])))
        if off < tol:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = m[p, q]
                if abs(apq) < tol / (dim * dim):
                    continue
                theta = (m[q, q] - m[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = m[:, p].copy()
                col_q = m[:, q].copy()
                m[:, p] = c * col_p - s * col_q
                m[:, q] = s * col_p + c * col_q
                row_p = m[p, :].copy()
                row_q = m[q, :].copy()
                m[p, :] = c * row_p - s * row_q
                m[q, :] = s * row_p + c * row_q
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.sort(np.diag(m))


CLUSTER_TOL = 1e-7


@dataclass(frozen=True)
class Spectrum:
    """Clustered eigenvalues, ascending, as (value, multiplicity) pairs."""

    factors: tuple[tuple[float, int], ...]
    excluded_structural_zero: bool = True

    def expand(self) -> list[float]:
        out: list[float] = []
        for value, mult in self.factors:
            out.extend([value] * mult)
        return out

    @property
    def size(self) -> int:
        return sum(mult for _, mult in self.factors)


def _cluster(values: np.ndarray, tol: float = CLUSTER_TOL) -> tuple[tuple[float, int], ...]:
    clusters: list[tuple[float, int]] = []
    group: list[float] = []
    for x in values:
        if group and x - group[-1] > tol:
            clusters.append((float(np.mean(group)), len(group)))
            group = []
        group.append(float(x))
    if group:
        clusters.append((float(np.mean(group)), len(group)))
    return tuple(clusters)


def canonical_efficiency_factors(design: BlockDesign) -> Spectrum:
    """Eigenvalues of I - (rk)^(-1) * concurrence, excluding the one
    structural zero carried by the all-one eigenvector."""
    r = design.r
    k = design.k
    lam = concurrence_matrix(design)
    f = np.eye(design.v) - lam / float(r * k)
    vals = sym_eig(f)
    drop = int(np.argmin(np.abs(vals)))
    if abs(vals[drop]) > 1e-9:
        raise ArithmeticError(
            f"no structural zero eigenvalue found (closest {vals[drop]:.3e})")
    rest = np.delete(vals, drop)
    return Spectrum(factors=_cluster(rest), excluded_structural_zero=True)


def is_connected(design: BlockDesign) -> bool:
    """Treatment-block incidence graph connectivity, by traversal."""
    neighbors: dict[int, set[int]] = {t: set() for t in range(1, design.v + 1)}
    for block in design.blocks:
        for a in block:
            neighbors[a].update(block)
    seen = {1}
    stack = [1]
    while stack:
        t = stack.pop()
        for u in neighbors[t]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == design.v


def schur_dominates(a: Spectrum, b: Spectrum, tol: float = 1e-9) -> bool:
    """True iff every ascending prefix sum of a's factors is >= b's.

    Both spectra must describe the same number of factors.
    """
    xs = a.expand()
    ys = b.expand()
    if len(xs) != len(ys):
        raise ValueError(f"spectrum sizes differ: {len(xs)} vs {len(ys)}")
    run_a = 0.0
    run_b = 0.0
    for x, y in zip(xs, ys):
        run_a += x
        run_b += y
        if run_a < run_b - tol:
            return False
    return True


def is_bibd(design: BlockDesign) -> tuple[bool, int | None]:
    """Balanced incomplete block design test: constant block size k < v and
    every pair of distinct treatments concurring the same lambda >= 1.
    Returns (verdict, lambda)."""
    try:
        k = design.k
        design.r
    except ValueError:
        return (False, None)
    if not (2 <= k < design.v):
        return (False, None)
    lam = concurrence_matrix(design)
    off = {int(lam[a, b_]) for a in range(design.v)
           for b_ in range(a + 1, design.v)}
    if len(off) == 1:
        value = off.pop()
        if value >= 1:
            return (True, value)
    return (False, None)


def detect_inflation(design: BlockDesign) -> tuple[int, BlockDesign] | None:
    """Recognize the design as a mu-fold inflation, mu >= 2, if possible.

    Treatments are grouped by identical block incidence (equivalently,
    pairwise concurrence equal to the replication r).  If all groups share
    one size mu >= 2, returns (mu, quotient) where the quotient design keeps
    one representative per group, relabelled 1.. by ascending representative.
    Returns None otherwise, including for the trivial mu = 1 grouping.
    """
    design.r  # equireplicate required
    incidence: dict[int, list[int]] = {t: [] for t in range(1, design.v + 1)}
    for j, block in enumerate(design.blocks):
        for t in block:
            incidence[t].append(j)
    groups: dict[tuple[int, ...], list[int]] = {}
    for t in range(1, design.v + 1):
        groups.setdefault(tuple(incidence[t]), []).append(t)
    sizes = {len(members) for members in groups.values()}
    if len(sizes) != 1:
        return None
    mu = sizes.pop()
    if mu < 2:
        return None
    reps = sorted(min(members) for members in groups.values())
    relabel = {rep: i + 1 for i, rep in enumerate(reps)}
    rep_set = set(reps)
    quotient_blocks = []
    for block in design.blocks:
        quotient_blocks.append(tuple(sorted(relabel[t] for t in block
                                            if t in rep_set)))
    quotient = BlockDesign(v=design.v // mu, blocks=tuple(quotient_blocks))
    return (mu, quotient)


@dataclass(frozen=True)
class Resolution:
    """Partition of the block multiset into parallel classes; each entry is a
    tuple of indices into design.blocks (copies are distinguishable slots)."""

    classes: tuple[tuple[int, ...], ...]


def check_resolution(design: BlockDesign, resolution: Resolution) -> bool:
    used: list[int] = []
    for cls in resolution.classes:
        covered: list[int] = []
        for idx in cls:
            covered.extend(design.blocks[idx])
        if sorted(covered) != list(range(1, design.v + 1)):
            return False
        used.extend(cls)
    return sorted(used) == list(range(design.b))


def find_resolution(design: BlockDesign) -> Resolution | None:
    """Search for a partition of the blocks into parallel classes.

    Backtracking with most-constrained-point branching; a new class is
    anchored on the least unused block so block-copy and class-order
    symmetries are not re-explored.  Returns the first resolution found.
    """
    v = design.v
    try:
        k = design.k
    except ValueError:
        return None
    if v % k != 0:
        return None
    # collapse copies: value -> list of slot indices
    slots: dict[tuple[int, ...], list[int]] = {}
    for idx, block in enumerate(design.blocks):
        slots.setdefault(block, []).append(idx)
    values = sorted(slots)
    remaining = {blk: len(slots[blk]) for blk in values}
    containing: dict[int, list[tuple[int, ...]]] = {t: [] for t in range(1, v + 1)}
    for blk in values:
        for t in blk:
            containing[t].append(blk)

    classes_out: list[list[tuple[int, ...]]] = []
    full = frozenset(range(1, v + 1))

    def least_unused() -> tuple[int, ...] | None:
        for blk in values:
            if remaining[blk] > 0:
                return blk
        return None

    def build_class(current: list[tuple[int, ...]], covered: frozenset[int]) -> bool:
        if covered == full:
            classes_out.append(list(current))
            anchor = least_unused()
            if anchor is None:
                return True
            if complete_from(anchor):
                return True
            classes_out.pop()
            return False
        # most constrained uncovered point
        best_t = None
        best: list[tuple[int, ...]] | None = None
        for t in range(1, v + 1):
            if t in covered:
                continue
            cands = [blk for blk in containing[t]
                     if remaining[blk] > 0 and covered.isdisjoint(blk)]
            if best is None or len(cands) < len(best):
                best = cands
                best_t = t
                if not cands:
                    return False
        del best_t
        for blk in best:
            remaining[blk] -= 1
            current.append(blk)
            if build_class(current, covered | frozenset(blk)):
                return True
            current.pop()
            remaining[blk] += 1
        return False

    def complete_from(anchor: tuple[int, ...]) -> bool:
        remaining[anchor] -= 1
        ok = build_class([anchor], frozenset(anchor))
        if not ok:
            remaining[anchor] += 1
        return ok

    first = least_unused()
    if first is None or not complete_from(first):
        return None
    # map block values back to distinct slot indices
    pools = {blk: list(slots[blk]) for blk in values}
    index_classes = []
    for cls in classes_out:
        index_classes.append(tuple(sorted(pools[blk].pop(0) for blk in cls)))
    resolution = Resolution(classes=tuple(index_classes))
    assert check_resolution(design, resolution)
    return resolution


def _disjointness_classes(design: BlockDesign) -> list[list[int]] | None:
    """Partition block slots so same-class blocks are disjoint and
    cross-class blocks all meet; None if disjointness is not transitive."""
    b = design.b
    sets = [frozenset(block) for block in design.blocks]
    assigned = [-1] * b
    classes: list[list[int]] = []
    for i in range(b):
        if assigned[i] >= 0:
            continue
        cls = [i]
        assigned[i] = len(classes)
        for j in range(i + 1, b):
            if assigned[j] < 0 and not (sets[i] & sets[j]):
                cls.append(j)
                assigned[j] = len(classes)
        classes.append(cls)
    # verify: within-class disjoint, cross-class intersecting
    for cls in classes:
        for x, y in combinations(cls, 2):
            if sets[x] & sets[y]:
                return None
    for c1, c2 in combinations(classes, 2):
        for x in c1:
            for y in c2:
                if not (sets[x] & sets[y]):
                    return None
    return classes


def is_affine_resolvable(design: BlockDesign) -> bool:
    """Resolvable with every two blocks from different classes meeting in
    exactly k^2/v treatments.

    For such designs parallel = disjoint, so the classes, if any, are the
    disjointness classes; no search is needed.
    """
    try:
        k = design.k
    except ValueError:
        return False
    if (k * k) % design.v != 0:
        return False
    q = (k * k) // design.v
    classes = _disjointness_classes(design)
    if classes is None:
        return False
    sets = [set(block) for block in design.blocks]
    for cls in classes:
        covered: list[int] = []
        for idx in cls:
            covered.extend(design.blocks[idx])
        if sorted(covered) != list(range(1, design.v + 1)):
            return False
    for c1, c2 in combinations(classes, 2):
        for x in c1:
            for y in c2:
                if len(sets[x] & sets[y]) != q:
                    return False
    return True


def delta12(square: "SemiLatinSquare") -> tuple[BlockDesign, BlockDesign]:
    """Augment each cell of a uniform square with mu fresh treatments shared
    along its row (first design) or its column (second).

    Both results are (mu n^2, n^2, n, mu n)-designs, affine resolvable by
    construction.
    """
    mu = _require_uniform(square)
    n = square.n
    base = square.v

    def build(by_row: bool) -> BlockDesign:
        blocks = []
        for i in range(n):
            for j in range(n):
                extra_index = i if by_row else j
                extras = [base + extra_index * mu + c for c in range(1, mu + 1)]
                blocks.append(tuple(sorted(square.cells[i][j] + tuple(extras))))
        return BlockDesign(v=base + mu * n, blocks=tuple(blocks))

    return (build(True), build(False))


def delta3(square: "SemiLatinSquare") -> BlockDesign:
    """Augment each cell with mu row treatments and mu column treatments,
    then dualize.  Yields an (n^2, mu n(n+1), mu(n+1), n, mu)-BIBD."""
    mu = _require_uniform(square)
    n = square.n
    base = square.v
    where: dict[int, list[int]] = {}
    for i in range(n):
        for j in range(n):
            cell_id = i * n + j + 1
            members = list(square.cells[i][j])
            members += [base + i * mu + c for c in range(1, mu + 1)]
            members += [base + n * mu + j * mu + c for c in range(1, mu + 1)]
            for t in members:
                where.setdefault(t, []).append(cell_id)
    blocks = [tuple(sorted(cells)) for cells in where.values()]
    return BlockDesign(v=n * n, blocks=tuple(sorted(blocks)))


def _require_uniform(square: "SemiLatinSquare") -> int:
    from .sls_core import uniformity

    report = uniformity(square)
    if not report.uniform:
        raise ValueError(f"square is not uniform (witness {report.witness})")
    return report.mu


@dataclass(frozen=True)
class OrthogonalArray:
    """N runs, r factors, s levels (1-based symbols in rows)."""

    n_runs: int
    factors: int
    levels: int
    rows: tuple[tuple[int, ...], ...]

    def to_text(self) -> str:
        lines = [f"{self.n_runs} {self.factors} {self.levels}"]
        lines.extend(" ".join(str(x) for x in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "OrthogonalArray":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        n_runs, factors, levels = (int(x) for x in lines[0].split())
        rows = tuple(tuple(int(x) for x in ln.split()) for ln in lines[1:])
        if len(rows) != n_runs or any(len(row) != factors for row in rows):
            raise ValueError("array body does not match header")
        return cls(n_runs=n_runs, factors=factors, levels=levels, rows=rows)


def to_orthogonal_array(design: BlockDesign) -> OrthogonalArray:
    """Encode an affine resolvable design as an orthogonal array: one run per
    treatment, one factor per parallel class, the entry naming the block of
    that class containing the treatment.

    Classes and the blocks inside each class are ordered lexicographically
    by block content, so the output is deterministic.
    """
    if not is_affine_resolvable(design):
        raise ValueError("design is not affine resolvable")
    classes = _disjointness_classes(design)
    keyed = sorted(
        (sorted(design.blocks[idx] for idx in cls) for cls in classes),
    )
    s = design.v // design.k
    rows = []
    for t in range(1, design.v + 1):
        row = []
        for cls_blocks in keyed:
            for pos, blk in enumerate(cls_blocks, start=1):
                if t in blk:
                    row.append(pos)
                    break
        rows.append(tuple(row))
    return OrthogonalArray(n_runs=design.v, factors=len(keyed), levels=s,
                           rows=tuple(rows))


def oa_strength(oa: OrthogonalArray) -> int:
    """Largest t such that every t columns carry every level t-tuple equally
    often; exhaustive counting."""
    best = 0
    for t in range(1, oa.factors + 1):
        if oa.n_runs % (oa.levels ** t) != 0:
            break
        want = oa.n_runs // (oa.levels ** t)
        ok = True
        for cols in combinations(range(oa.factors), t):
            counts: dict[tuple[int, ...], int] = {}
            for row in oa.rows:
                key = tuple(row[c] for c in cols)
                counts[key] = counts.get(key, 0) + 1
            if len(counts) != oa.levels ** t or set(counts.values()) != {want}:
                ok = False
                break
        if not ok:
            break
        best = t
    return best
