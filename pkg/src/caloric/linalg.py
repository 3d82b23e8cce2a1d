"""Exact dense linear algebra over the rationals.

Elimination runs on integer rows (each row is cleared of denominators and
kept primitive by dividing out its content), and only the final reduced
form is converted back to ``Fraction``.  This keeps intermediate numbers
small on the monomial-basis operator matrices this package builds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

from .errors import DimensionMismatch, Inconsistent


@dataclass(frozen=True)
class RationalMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], cols: int | None = None) -> "RationalMatrix":
        data = tuple(tuple(Fraction(v) for v in r) for r in rows)
        if cols is None:
            if not data:
                raise ValueError("column count is required for a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows(([int(i == j) for j in range(n)] for i in range(n)), cols=n)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls.from_rows(([0] * cols for _ in range(rows)), cols=cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def matvec(self, v: Sequence) -> list[Fraction]:
        if len(v) != self.cols:
            raise DimensionMismatch(f"vector has length {len(v)}, expected {self.cols}")
        v = [Fraction(x) for x in v]
        return [sum((a * b for a, b in zip(row, v) if a), Fraction(0)) for row in self.entries]

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]


@dataclass(frozen=True)
class KernelBasis:
    vectors: tuple[tuple[Fraction, ...], ...]
    rank: int

    @property
    def dimension(self) -> int:
        return len(self.vectors)


def _integer_row(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for v in row:
        if v:
            den = lcm(den, v.denominator)
    return [int(v * den) for v in row]


def _primitive(row: list[int]) -> list[int]:
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def _echelon(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Integer Gauss-Jordan elimination; returns reduced rows and pivot columns."""
    pivots: list[int] = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        # smallest nonzero pivot keeps numbers small
        best = None
        for i in range(r, nrows):
            v = rows[i][c]
            if v and (best is None or abs(v) < abs(rows[best][c])):
                best = i
        if best is None:
            continue
        rows[r], rows[best] = rows[best], rows[r]
        prow = rows[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            v = rows[i][c]
            if v:
                g = gcd(p, v)
                a, b = p // g, v // g
                rows[i] = _primitive([a * x - b * y for x, y in zip(rows[i], prow)])
        pivots.append(c)
        r += 1
    return rows, pivots


def rref(M: RationalMatrix) -> tuple[RationalMatrix, int, list[int]]:
    rows = [_primitive(_integer_row(r)) for r in M.entries]
    rows, pivots = _echelon(rows, M.cols)
    out = []
    for i, row in enumerate(rows):
        if i < len(pivots):
            p = row[pivots[i]]
            out.append(tuple(Fraction(v, p) for v in row))
        else:
            out.append(tuple(Fraction(0) for _ in row))
    return RationalMatrix(M.rows, M.cols, tuple(out)), len(pivots), pivots


def rank(M: RationalMatrix) -> int:
    rows = [_primitive(_integer_row(r)) for r in M.entries]
    return len(_echelon(rows, M.cols)[1])


def kernel(M: RationalMatrix) -> KernelBasis:
    """Null-space basis: one vector per free column, with that column set to 1."""
    R, r, pivots = rref(M)
    pivot_set = set(pivots)
    vectors = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * M.cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R.entries[i][f]
        vectors.append(tuple(v))
    return KernelBasis(tuple(vectors), r)


def solve(M: RationalMatrix, b: Sequence) -> list[Fraction]:
    """A particular solution of ``M x = b`` with every free variable set to zero."""
    if len(b) != M.rows:
        raise DimensionMismatch(f"right-hand side has length {len(b)}, expected {M.rows}")
    aug = RationalMatrix.from_rows(
        (list(row) + [Fraction(v)] for row, v in zip(M.entries, b)), cols=M.cols + 1
    )
    R, _, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        raise Inconsistent("right-hand side is not in the column span")
    x = [Fraction(0)] * M.cols
    for i, pc in enumerate(pivots):
        x[pc] = R.entries[i][M.cols]
    return x
