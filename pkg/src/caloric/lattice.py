"""Cayley graphs of Z^n and their operators on space-time polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DimensionMismatch, InvalidGeneratingSet
from .linalg import RationalMatrix
from .poly import Monomial, Poly, monomial_key, parabolic_degree_of, partial_t, shift_substitute


def _integer_echelon(vectors: list[list[int]], n: int) -> list[list[int]]:
    """Row-reduce integer vectors with unimodular operations (Hermite-style)."""
    rows = [list(v) for v in vectors]
    out = []
    for c in range(n):
        live = [r for r in rows if r[c]]
        rest = [r for r in rows if not r[c]]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            head = live[0]
            nxt = []
            for r in live[1:]:
                q = r[c] // head[c]
                r = [a - q * b for a, b in zip(r, head)]
                (nxt if r[c] else rest).append(r)
            live = [head] + nxt
        if live:
            out.append(live[0])
        rows = rest
    return out


def spans_integer_lattice(vectors: Sequence[Sequence[int]], n: int) -> bool:
    """True iff the integer span of ``vectors`` is all of Z^n."""
    ech = _integer_echelon([list(v) for v in vectors], n)
    if len(ech) != n:
        return False
    # triangular basis: lattice index is the product of the diagonal
    return all(abs(row[i]) == 1 for i, row in enumerate(ech))


@dataclass(frozen=True)
class GeneratingSet:
    """A finite symmetric generating set S of Z^n; edges have unit weight."""

    n: int
    generators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        gens = tuple(tuple(int(v) for v in g) for g in self.generators)
        object.__setattr__(self, "generators", tuple(sorted(gens)))
        if self.n < 1:
            raise InvalidGeneratingSet("dimension must be at least 1")
        for g in gens:
            if len(g) != self.n:
                raise InvalidGeneratingSet(f"generator {g} does not have {self.n} entries")
            if not any(g):
                raise InvalidGeneratingSet("0 is not allowed as a generator")
        if len(set(gens)) != len(gens):
            raise InvalidGeneratingSet("generators must be distinct")
        present = set(gens)
        for g in gens:
            if tuple(-v for v in g) not in present:
                raise InvalidGeneratingSet(f"set is not symmetric: -{g} missing")
        if not spans_integer_lattice(gens, self.n):
            raise InvalidGeneratingSet("generators do not span Z^n")

    @classmethod
    def standard(cls, n: int) -> "GeneratingSet":
        gens = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            gens.append(tuple(e))
            e[i] = -1
            gens.append(tuple(e))
        return cls(n, tuple(gens))

    @classmethod
    def symmetrize(cls, n: int, vectors: Iterable[Sequence[int]]) -> "GeneratingSet":
        """Close ``vectors`` under negation and drop duplicates."""
        seen = set()
        for v in vectors:
            v = tuple(int(a) for a in v)
            seen.add(v)
            seen.add(tuple(-a for a in v))
        return cls(n, tuple(seen))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def to_text(self) -> str:
        return "\n".join(",".join(str(v) for v in g) for g in self.generators) + "\n"


def load_generating_set(path: str | Path, n: int | None = None) -> GeneratingSet:
    gens = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            gens.append(tuple(int(v) for v in line.split(",")))
        except ValueError as exc:
            raise InvalidGeneratingSet(f"{path}:{lineno}: cannot parse {line!r}") from exc
    if not gens:
        raise InvalidGeneratingSet(f"{path}: no generators")
    dim = len(gens[0])
    if n is not None and dim != n:
        raise InvalidGeneratingSet(f"{path}: generators have length {dim}, expected {n}")
    return GeneratingSet(dim, tuple(gens))


def _check(S: GeneratingSet, p: Poly) -> None:
    if S.n != p.n:
        raise DimensionMismatch(f"generating set lives in Z^{S.n}, polynomial in dimension {p.n}")


@lru_cache(maxsize=65536)
def _laplacian_of_monomial(S: GeneratingSet, m: Monomial) -> Poly:
    p = Poly.monomial(m)
    acc = Poly.zero(S.n)
    for s in S.generators:
        acc = acc + shift_substitute(p, s)
    return (acc - p.scale(len(S))).scale(Fraction(1, len(S)))


def lattice_laplacian(S: GeneratingSet, p: Poly) -> Poly:
    """Unit-weight Laplacian: mean of p(x+s) - p(x) over s in S."""
    _check(S, p)
    out: dict = {}
    for m, c in p.terms.items():
        for mm, cc in _laplacian_of_monomial(S, m).terms.items():
            out[mm] = out.get(mm, 0) + c * cc
    return Poly(S.n, out)


def heat_operator(S: GeneratingSet, p: Poly) -> Poly:
    """Return (Delta - d/dt) p.  Caloric polynomials are its kernel."""
    _check(S, p)
    return lattice_laplacian(S, p) - partial_t(p, 1)


@dataclass(frozen=True)
class LatticeOperatorReport:
    input_parabolic_degree: int
    output_parabolic_degree: int


def operator_report(S: GeneratingSet, op: str, p: Poly) -> LatticeOperatorReport:
    q = _OPERATORS[op](S, p)
    return LatticeOperatorReport(p.parabolic_degree, q.parabolic_degree)


def _compositions(total: int, parts: int) -> Iterable[tuple[int, ...]]:
    for combo in combinations_with_replacement(range(parts), total):
        e = [0] * parts
        for i in combo:
            e[i] += 1
        yield tuple(e)


@lru_cache(maxsize=1024)
def monomial_basis(n: int, k: int, parabolic: bool = False) -> tuple[Monomial, ...]:
    """Monomials of P^k (t-free, degree <= k) or of the parabolic space, ascending."""
    if n < 1:
        raise ValueError("n must be positive")
    if k < 0:
        return ()
    monos = []
    for b in range(k // 2 + 1 if parabolic else 1):
        for d in range(k - 2 * b + 1):
            for a in _compositions(d, n):
                monos.append(a + (b,))
    return tuple(sorted(monos, key=monomial_key))


_OPERATORS = {"laplacian": lattice_laplacian, "heat": heat_operator}


def coefficient_vector(p: Poly, basis: Sequence[Monomial]) -> list[Fraction]:
    index = {m: i for i, m in enumerate(basis)}
    v = [Fraction(0)] * len(basis)
    for m, c in p.terms.items():
        if m not in index:
            raise ValueError(f"monomial {m} lies outside the basis")
        v[index[m]] = c
    return v


def poly_from_vector(n: int, basis: Sequence[Monomial], v: Sequence) -> Poly:
    return Poly(n, {m: c for m, c in zip(basis, v) if c})


def operator_matrix(S: GeneratingSet, op: str, k: int, parabolic: bool) -> RationalMatrix:
    """Matrix of ``op`` from the degree-k monomial space into the degree-(k-2) one."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if op not in _OPERATORS:
        raise ValueError(f"unknown operator {op!r}")
    apply = _OPERATORS[op]
    cols = monomial_basis(S.n, k, parabolic)
    rows = monomial_basis(S.n, k - 2, parabolic)
    row_index = {m: i for i, m in enumerate(rows)}
    data = [[Fraction(0)] * len(cols) for _ in rows]
    for j, m in enumerate(cols):
        for mm, c in apply(S, Poly.monomial(m)).terms.items():
            data[row_index[mm]][j] = c
    return RationalMatrix(len(rows), len(cols), tuple(tuple(r) for r in data))


def lattice_ball(S: GeneratingSet, center: Sequence[int], radius: int) -> list[tuple[int, ...]]:
    """Points of Z^n within graph distance ``radius`` of ``center``, by BFS."""
    center = tuple(center)
    seen = {center}
    frontier = [center]
    for _ in range(int(radius)):
        nxt = []
        for x in frontier:
            for s in S.generators:
                y = tuple(a + b for a, b in zip(x, s))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
        if not frontier:
            break
    return sorted(seen)
