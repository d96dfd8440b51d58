"""Finite fields and mutually orthogonal Latin squares (MOLS).

Fields GF(p^m) are built from polynomial arithmetic over GF(p) modulo a
deterministically chosen irreducible, so repeated runs always produce the
same addition/multiplication tables.  Elements are encoded as the integers
0..q-1, read as base-p coefficient vectors (least significant coefficient
first).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations


def _prime_power(q: int) -> tuple[int, int] | None:
    """Return (p, m) with q == p**m and p prime, or None."""
    if q < 2:
        return None
    n = q
    p = None
    d = 2
    while d * d <= n:
        if n % d == 0:
            p = d
            while n % d == 0:
                n //= d
            if n != 1:
                return None  # second prime factor
            break
        d += 1
    if p is None:
        return (q, 1)  # q itself is prime
    m = 0
    n = q
    while n > 1:
        n //= p
        m += 1
    return (p, m)


def _poly_mod(poly: list[int], modulus: tuple[int, ...], p: int) -> list[int]:
    """Reduce poly (ascending coefficients) modulo a monic modulus over GF(p)."""
    poly = [c % p for c in poly]
    deg_m = len(modulus) - 1
    while len(poly) > deg_m:
        lead = poly[-1]
        if lead:
            shift = len(poly) - 1 - deg_m
            for i, c in enumerate(modulus):
                poly[shift + i] = (poly[shift + i] - lead * c) % p
        poly.pop()
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % p
    return out


def _int_to_poly(x: int, p: int) -> list[int]:
    if x == 0:
        return [0]
    digits = []
    while x:
        digits.append(x % p)
        x //= p
    return digits


def _poly_to_int(poly: list[int], p: int) -> int:
    x = 0
    for c in reversed(poly):
        x = x * p + c
    return x


def _is_irreducible(candidate: tuple[int, ...], p: int) -> bool:
    """Trial division by all monic polynomials of degree 1..deg/2."""
    deg = len(candidate) - 1
    for d in range(1, deg // 2 + 1):
        for low in range(p**d):
            divisor = _int_to_poly(low + p**d, p)  # monic of degree d
            rem = _poly_mod(list(candidate), tuple(divisor), p)
            if rem == [0]:
                return False
    return True


def _least_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Monic irreducible of degree m over GF(p) with least base-p encoding."""
    if m == 1:
        return (0, 1)
    for low in range(p**m):
        candidate = tuple(_int_to_poly(low + p**m, p))
        while len(candidate) < m + 1:
            candidate = candidate + (0,)
        if _is_irreducible(candidate, p):
            return candidate
    raise AssertionError("no irreducible found")  # cannot happen


@dataclass(frozen=True)
class FiniteField:
    """GF(q) with full addition and multiplication tables.

    Elements are 0..q-1; 0 and 1 are the additive and multiplicative
    identities.  The modulus is the monic irreducible used for the
    polynomial representation (degree 1 for prime fields).
    """

    q: int
    p: int
    m: int
    modulus: tuple[int, ...]
    add_table: tuple[tuple[int, ...], ...]
    mul_table: tuple[tuple[int, ...], ...]

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        row = self.add_table[a]
        return row.index(0)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return self.mul_table[a].index(1)

    def elements(self) -> range:
        return range(self.q)


def finite_field(q: int) -> FiniteField:
    """Construct GF(q) deterministically.

    Raises ValueError if q is not a prime power; the message names q.
    """
    pm = _prime_power(q)
    if pm is None:
        raise ValueError(f"{q} is not a prime power, no field of that order exists")
    p, m = pm
    modulus = _least_irreducible(p, m)
    polys = [_int_to_poly(x, p) for x in range(q)]
    add = []
    mul = []
    for a in range(q):
        add_row = []
        mul_row = []
        for b in range(q):
            s = [0] * max(len(polys[a]), len(polys[b]))
            for i, c in enumerate(polys[a]):
                s[i] += c
            for i, c in enumerate(polys[b]):
                s[i] += c
            add_row.append(_poly_to_int([c % p for c in s], p))
            prod = _poly_mod(_poly_mul(polys[a], polys[b], p), modulus, p)
            mul_row.append(_poly_to_int(prod, p))
        add.append(tuple(add_row))
        mul.append(tuple(mul_row))
    return FiniteField(q=q, p=p, m=m, modulus=modulus,
                       add_table=tuple(add), mul_table=tuple(mul))


@dataclass(frozen=True)
class LatinSquare:
    """n x n array over symbols 0..n-1, each symbol once per row and column."""

    n: int
    grid: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = self.n
        if len(self.grid) != n or any(len(row) != n for row in self.grid):
            raise ValueError(f"grid is not {n}x{n}")
        want = set(range(n))
        for i, row in enumerate(self.grid):
            if set(row) != want:
                raise ValueError(f"row {i} is not a permutation of 0..{n - 1}")
        for j in range(n):
            if {row[j] for row in self.grid} != want:
                raise ValueError(f"column {j} is not a permutation of 0..{n - 1}")

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "grid": [list(r) for r in self.grid]},
                          separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "LatinSquare":
        obj = json.loads(text)
        return cls(n=obj["n"], grid=tuple(tuple(r) for r in obj["grid"]))


def are_orthogonal(a: LatinSquare, b: LatinSquare) -> bool:
    """True iff superimposing a and b yields every ordered symbol pair once."""
    if a.n != b.n:
        raise ValueError(f"order mismatch: {a.n} vs {b.n}")
    seen = set()
    for i in range(a.n):
        for j in range(a.n):
            seen.add((a.grid[i][j], b.grid[i][j]))
    return len(seen) == a.n * a.n


def bose_mols(q: int) -> list[LatinSquare]:
    """q-1 mutually orthogonal Latin squares of prime-power order q.

    Square a (a = 1..q-1) holds a*i + j over GF(q) at position (i, j),
    rows/columns/symbols all indexed by field elements 0..q-1.
    """
    field = finite_field(q)
    squares = []
    for a in range(1, q):
        grid = tuple(
            tuple(field.add(field.mul(a, i), j) for j in range(q))
            for i in range(q)
        )
        squares.append(LatinSquare(n=q, grid=grid))
    return squares


def all_latin_squares(n: int) -> list[LatinSquare]:
    """Every Latin square of order n, by exhaustive row-by-row search.

    Only intended for tiny n (test oracles).
    """
    from itertools import permutations

    perms = list(permutations(range(n)))
    out: list[LatinSquare] = []

    def extend(rows: list[tuple[int, ...]]):
        if len(rows) == n:
            out.append(LatinSquare(n=n, grid=tuple(rows)))
            return
        for perm in perms:
            if all(perm[j] != prev[j] for prev in rows for j in range(n)):
                extend(rows + [perm])

    extend([])
    return out


def verify_mols(squares: list[LatinSquare]) -> bool:
    """Pairwise orthogonality over a whole family."""
    return all(are_orthogonal(a, b) for a, b in combinations(squares, 2))
