"""Semi-Latin squares: validation, uniformity, and the building operations.

An (n x n)/k semi-Latin square assigns to each of the n^2 cells a k-subset
of the nk treatments 1..nk such that every treatment occurs exactly once in
each row and exactly once in each column.  Cells are stored as sorted tuples
in row-major order; all treatment numbering in files and reports is 1-based.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

from .algebra import LatinSquare, are_orthogonal
from .block_design import BlockDesign


class ValidationError(ValueError):
    """A structural violation, carrying enough detail to point at the cell."""

    def __init__(self, message: str, *, row: int | None = None,
                 col: int | None = None, treatment: int | None = None):
        super().__init__(message)
        self.row = row
        self.col = col
        self.treatment = treatment


@dataclass(frozen=True)
class SemiLatinSquare:
    n: int
    k: int
    cells: tuple[tuple[tuple[int, ...], ...], ...]

    @property
    def v(self) -> int:
        return self.n * self.k

    def cell(self, i: int, j: int) -> tuple[int, ...]:
        """1-based cell access."""
        return self.cells[i - 1][j - 1]

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "k": self.k,
             "cells": [[list(c) for c in row] for row in self.cells]},
            separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "SemiLatinSquare":
        obj = json.loads(text)
        return validate(obj["n"], obj["k"], obj["cells"])


@dataclass(frozen=True)
class UniformityReport:
    uniform: bool
    mu: int | None
    # (cell1, cell2, size) with 1-based (row, col) cell coordinates
    witness: tuple[tuple[int, int], tuple[int, int], int] | None


def validate(n: int, k: int, cells) -> SemiLatinSquare:
    """Check the semi-Latin square property and return the normalized square.

    Raises ValidationError naming the first offending row/column and
    treatment.
    """
    if n < 1 or k < 1:
        raise ValidationError(f"need n >= 1 and k >= 1, got n={n} k={k}")
    if len(cells) != n or any(len(row) != n for row in cells):
        raise ValidationError(f"cell array is not {n}x{n}")
    v = n * k
    norm = []
    for i, row in enumerate(cells, start=1):
        norm_row = []
        for j, cell in enumerate(row, start=1):
            cell = tuple(sorted(cell))
            if len(cell) != k:
                raise ValidationError(
                    f"cell ({i},{j}) has {len(cell)} entries, expected {k}",
                    row=i, col=j)
            if len(set(cell)) != k:
                raise ValidationError(f"cell ({i},{j}) repeats a treatment",
                                      row=i, col=j)
            for t in cell:
                if not (1 <= t <= v):
                    raise ValidationError(
                        f"treatment {t} in cell ({i},{j}) outside 1..{v}",
                        row=i, col=j, treatment=t)
            norm_row.append(cell)
        norm.append(tuple(norm_row))
    for i in range(n):
        seen: dict[int, int] = {}
        for j in range(n):
            for t in norm[i][j]:
                seen[t] = seen.get(t, 0) + 1
        for t in range(1, v + 1):
            if seen.get(t, 0) != 1:
                raise ValidationError(
                    f"treatment {t} occurs {seen.get(t, 0)} times in row {i + 1}",
                    row=i + 1, treatment=t)
    for j in range(n):
        seen = {}
        for i in range(n):
            for t in norm[i][j]:
                seen[t] = seen.get(t, 0) + 1
        for t in range(1, v + 1):
            if seen.get(t, 0) != 1:
                raise ValidationError(
                    f"treatment {t} occurs {seen.get(t, 0)} times in column {j + 1}",
                    col=j + 1, treatment=t)
    return SemiLatinSquare(n=n, k=k, cells=tuple(norm))


def from_latin(square: LatinSquare) -> SemiLatinSquare:
    """View a Latin square as an (n x n)/1 semi-Latin square on 1..n."""
    cells = tuple(
        tuple((square.grid[i][j] + 1,) for j in range(square.n))
        for i in range(square.n)
    )
    return SemiLatinSquare(n=square.n, k=1, cells=cells)


def uniformity(s: SemiLatinSquare) -> UniformityReport:
    """Decide whether every pair of cells not sharing a row or column meets
    in the same positive number mu of treatments.

    Requires n > 2: smaller squares have no such cell pairs.
    """
    n = s.n
    if n <= 2:
        raise ValueError(f"uniformity needs n > 2, got n={n}")
    coords = [(i, j) for i in range(n) for j in range(n)]
    first_size = None
    first_pair = None
    for (i1, j1), (i2, j2) in combinations(coords, 2):
        if i1 == i2 or j1 == j2:
            continue
        size = len(set(s.cells[i1][j1]) & set(s.cells[i2][j2]))
        if first_size is None:
            first_size = size
            first_pair = ((i1 + 1, j1 + 1), (i2 + 1, j2 + 1))
        elif size != first_size:
            witness = ((i1 + 1, j1 + 1), (i2 + 1, j2 + 1), size)
            return UniformityReport(uniform=False, mu=None, witness=witness)
    if first_size == 0:
        # constant but not positive: not uniform
        return UniformityReport(uniform=False, mu=None,
                                witness=(first_pair[0], first_pair[1], 0))
    assert s.k == first_size * (n - 1), "uniform square must have k = mu(n-1)"
    return UniformityReport(uniform=True, mu=first_size, witness=None)


def transpose(s: SemiLatinSquare) -> SemiLatinSquare:
    cells = tuple(
        tuple(s.cells[j][i] for j in range(s.n))
        for i in range(s.n)
    )
    return SemiLatinSquare(n=s.n, k=s.k, cells=cells)


def inflate(s: SemiLatinSquare, factor: int) -> SemiLatinSquare:
    """Replace every treatment a by the clone set {factor*(a-1)+1 .. factor*a}."""
    if factor < 1:
        raise ValueError(f"inflation factor must be >= 1, got {factor}")
    cells = tuple(
        tuple(
            tuple(sorted(factor * (a - 1) + c
                         for a in cell for c in range(1, factor + 1)))
            for cell in row)
        for row in s.cells
    )
    return SemiLatinSquare(n=s.n, k=s.k * factor, cells=cells)


def superpose(parts: list[SemiLatinSquare]) -> SemiLatinSquare:
    """Cellwise union after shifting each part onto its own treatment range.

    Part i (0-based) has its treatments shifted by n * (k_0 + ... + k_{i-1}),
    so the result's treatment set is consecutive 1..n*sum(k_i).
    """
    if not parts:
        raise ValueError("superpose needs at least one square")
    n = parts[0].n
    if any(p.n != n for p in parts):
        raise ValueError("all parts must share the same n")
    offset = 0
    merged = [[[] for _ in range(n)] for _ in range(n)]
    for part in parts:
        for i in range(n):
            for j in range(n):
                merged[i][j].extend(t + offset for t in part.cells[i][j])
        offset += n * part.k
    cells = tuple(tuple(tuple(sorted(c)) for c in row) for row in merged)
    return SemiLatinSquare(n=n, k=sum(p.k for p in parts), cells=cells)


def underlying_design(s: SemiLatinSquare) -> BlockDesign:
    """The block design whose blocks are the n^2 cell contents."""
    blocks = [cell for row in s.cells for cell in row]
    return BlockDesign(v=s.v, blocks=tuple(sorted(blocks)))


def dual(s: SemiLatinSquare) -> BlockDesign:
    """Treatments become the n^2 cells (cell (i,j) -> (i-1)n + j, 1-based);
    each original treatment contributes the block of cells containing it."""
    n = s.n
    where: dict[int, list[int]] = {t: [] for t in range(1, s.v + 1)}
    for i in range(n):
        for j in range(n):
            cell_id = i * n + j + 1
            for t in s.cells[i][j]:
                where[t].append(cell_id)
    blocks = [tuple(sorted(where[t])) for t in range(1, s.v + 1)]
    return BlockDesign(v=n * n, blocks=tuple(sorted(blocks)))


def bar_s(mols: list[LatinSquare]) -> SemiLatinSquare:
    """Border-extension construction from n-1 pairwise-orthogonal Latin
    squares of order n.

    Produces a uniform ((n+1) x (n+1))/((n-2)n) square with mu = n-2.  The
    first n-2 Latin squares are n-fold inflated, the last is (n-2)-fold
    inflated; the clone of each symbol indexed by its own column is moved to
    the border row and column, and the last square's clones fill the corner.

    Clone (t, a, c) -- square t in 1..n-2, symbol a in 0..n-1, clone index
    c in 1..n -- is numbered (t-1)n^2 + a*n + c; clone (a, c) of the last
    square, c in 1..n-2, is numbered (n-2)n^2 + a(n-2) + c.
    """
    if not mols:
        raise ValueError("need n-1 Latin squares, got none")
    n = mols[0].n
    if n <= 2:
        raise ValueError(f"need order > 2, got n={n}")
    if len(mols) != n - 1:
        raise ValueError(f"need {n - 1} squares of order {n}, got {len(mols)}")
    for idx, sq in enumerate(mols):
        if sq.n != n:
            raise ValueError(f"square {idx} has order {sq.n}, expected {n}")
    for i in range(len(mols)):
        for j in range(i + 1, len(mols)):
            if not are_orthogonal(mols[i], mols[j]):
                raise ValueError(f"squares {i} and {j} are not orthogonal")

    def main_id(t: int, a: int, c: int) -> int:
        return (t - 1) * n * n + a * n + c

    last_base = (n - 2) * n * n

    def last_id(a: int, c: int) -> int:
        return last_base + a * (n - 2) + c

    size = n + 1
    cells = [[[] for _ in range(size)] for _ in range(size)]
    for i in range(n):
        for j in range(n):
            for t in range(1, n - 1):
                a = mols[t - 1].grid[i][j]
                # all clones except the one indexed by this column
                cells[i][j].extend(main_id(t, a, c)
                                   for c in range(1, n + 1) if c != j + 1)
                cells[i][n].append(main_id(t, a, j + 1))
                cells[n][j].append(main_id(t, a, j + 1))
            a_last = mols[n - 2].grid[i][j]
            cells[i][j].extend(last_id(a_last, c) for c in range(1, n - 1))
    cells[n][n] = [last_id(a, c) for a in range(n) for c in range(1, n - 1)]
    k = (n - 2) * n
    norm = tuple(tuple(tuple(sorted(c)) for c in row) for row in cells)
    return validate(size, k, norm)
