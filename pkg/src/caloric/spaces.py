"""Harmonic and caloric polynomial spaces on (Z^n, S) and their dimension counts.

Harmonic polynomials of degree <= k stand in for the growth class H_k and
caloric polynomials of parabolic degree <= k for P_k.  On lattices every
solution of polynomial growth extends to such a polynomial (a cited fact,
used here as an assumption), so the dimensions computed below are the
dimensions of the growth classes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .errors import DimensionMismatch, DuplicateTimes, Inconsistent, InternalInconsistency, NotCaloric, TimeOutOfRange
from .lattice import (
    GeneratingSet,
    coefficient_vector,
    heat_operator,
    lattice_laplacian,
    monomial_basis,
    operator_matrix,
    poly_from_vector,
)
from .linalg import RationalMatrix, kernel, rank, solve
from .poly import Monomial, Poly, monomial_key, partial_t

# counting


def homogeneous_count(n: int, i: int) -> int:
    """Number of degree-i monomials in n variables."""
    return comb(i + n - 1, n - 1) if i >= 0 else 0


def dim_polynomials(n: int, k: int) -> int:
    """dim P^k: polynomials in n variables of degree <= k."""
    return sum(homogeneous_count(n, i) for i in range(k + 1))


def parabolic_homogeneous_count(n: int, i: int) -> int:
    """Number of monomials in (x, t) of parabolic degree exactly i."""
    if i < 0:
        return 0
    return sum(homogeneous_count(n, i - 2 * j) for j in range(i // 2 + 1))


def dim_parabolic(n: int, k: int) -> int:
    return sum(parabolic_homogeneous_count(n, i) for i in range(k + 1))


def caloric_dimension_formula(n: int, k: int) -> int:
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    return sum(comb(i + n - 1, n - 1) for i in range(k + 1))


def harmonic_dimension_formula(n: int, k: int) -> int:
    """dim P^k - dim P^(k-2), valid whenever Delta maps P^k onto P^(k-2)."""
    return dim_polynomials(n, k) - dim_polynomials(n, k - 2)


# bases


@dataclass(frozen=True)
class SpaceBasis:
    kind: str
    n: int
    k: int
    generating_set: GeneratingSet
    polynomials: tuple[Poly, ...]

    @property
    def dimension(self) -> int:
        return len(self.polynomials)

    def formula_dimension(self) -> int:
        if self.kind == "caloric":
            return caloric_dimension_formula(self.n, self.k)
        return harmonic_dimension_formula(self.n, self.k)

    def to_dict(self) -> dict:
        formula = self.formula_dimension()
        return {
            "kind": self.kind,
            "n": self.n,
            "k": self.k,
            "generators": [list(g) for g in self.generating_set.generators],
            "dimension": self.dimension,
            "polynomials": [str(p) for p in self.polynomials],
            "formula_dimension": formula,
            "match": formula == self.dimension,
        }


def _normalized(p: Poly) -> Poly:
    lead = max(p.terms, key=monomial_key)
    return p.scale(1 / p.terms[lead])


@lru_cache(maxsize=256)
def _kernel_basis(S: GeneratingSet, op: str, k: int, parabolic: bool) -> tuple[Poly, ...]:
    M = operator_matrix(S, op, k, parabolic)
    cols = monomial_basis(S.n, k, parabolic)
    ker = kernel(M)
    return tuple(_normalized(poly_from_vector(S.n, cols, v)) for v in ker.vectors)


def harmonic_basis(S: GeneratingSet, k: int) -> SpaceBasis:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return SpaceBasis("harmonic", S.n, k, S, _kernel_basis(S, "laplacian", k, False))


def caloric_basis(S: GeneratingSet, k: int) -> SpaceBasis:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return SpaceBasis("caloric", S.n, k, S, _kernel_basis(S, "heat", k, True))


def heat_matrix_rank(S: GeneratingSet, k: int) -> int:
    return rank(operator_matrix(S, "heat", k, True))


# solving (Delta - d/dt) u = g


@lru_cache(maxsize=256)
def _laplacian_system(S: GeneratingSet, d: int) -> tuple[RationalMatrix, tuple[Monomial, ...], tuple[Monomial, ...]]:
    return (
        operator_matrix(S, "laplacian", d, False),
        monomial_basis(S.n, d, False),
        monomial_basis(S.n, d - 2, False),
    )


def _solve_laplace(S: GeneratingSet, rhs: Poly, d: int) -> Poly:
    """Some p of degree <= d with Delta p = rhs (free coefficients zero)."""
    M, cols, rows = _laplacian_system(S, d)
    try:
        x = solve(M, coefficient_vector(rhs, rows))
    except Inconsistent as exc:
        raise InternalInconsistency(
            f"Delta: P^{d} -> P^{d - 2} failed to reach {rhs} on generators {S.generators}"
        ) from exc
    return poly_from_vector(S.n, cols, x)


@lru_cache(maxsize=4096)
def _poisson_monomial(S: GeneratingSet, m: Monomial, top_layer: Fraction) -> Poly:
    n = S.n
    b = m[-1]
    spatial = Poly.monomial(m[:-1] + (0,))
    k = sum(m[:-1]) + 2 * b + 2
    layers: dict[int, Poly] = {b + 1: Poly.constant(n, top_layer)}
    rhs = layers[b + 1].scale(b + 1) + spatial
    for i in range(b, -1, -1):
        layers[i] = _solve_laplace(S, rhs, k - 2 * i)
        rhs = layers[i].scale(i)
    t = Poly.t(n)
    u = Poly.zero(n)
    for i, p in layers.items():
        u = u + p * t**i
    return u


def poisson_solve(S: GeneratingSet, g: Poly, top_layer: Fraction | int = 0) -> Poly:
    """Return u with (Delta - d/dt) u = g and parabolic degree <= deg g + 2.

    Each monomial x^a t^b of ``g`` is handled by writing u = sum p_i t^i and
    solving Delta p_i = (i+1) p_(i+1) (+ x^a when i = b) from the top layer
    down.  ``top_layer`` is the constant chosen for p_(b+1); any value gives
    a solution, and 0 keeps the result of smallest time degree.
    """
    if g.n != S.n:
        raise DimensionMismatch(f"g lives in dimension {g.n}, generators in Z^{S.n}")
    top = Fraction(top_layer)
    u = Poly.zero(S.n)
    for m, c in g.terms.items():
        u = u + _poisson_monomial(S, m, top).scale(c)
    if heat_operator(S, u) != g:
        raise InternalInconsistency(f"solution of (Delta - d/dt) u = {g} failed re-application")
    return u


# decomposition in time


@dataclass(frozen=True)
class TimeDecomposition:
    """u = p_0 + t p_1 + ... + t^l p_l with t-free layers."""

    coefficients: tuple[Poly, ...]

    @property
    def l(self) -> int:
        return len(self.coefficients) - 1

    def reassemble(self) -> Poly:
        n = self.coefficients[0].n
        t = Poly.t(n)
        u = Poly.zero(n)
        for i, p in enumerate(self.coefficients):
            u = u + p * t**i
        return u

    def trimmed(self) -> "TimeDecomposition":
        c = list(self.coefficients)
        while len(c) > 1 and c[-1].is_zero():
            c.pop()
        return TimeDecomposition(tuple(c))


def time_decompose(u: Poly) -> TimeDecomposition:
    l = max(u.time_degree, 0)
    buckets: list[dict] = [{} for _ in range(l + 1)]
    for m, c in u.terms.items():
        buckets[m[-1]][m[:-1] + (0,)] = c
    return TimeDecomposition(tuple(Poly(u.n, b) for b in buckets))


def vandermonde_recover(samples: Sequence[tuple[Fraction, Poly]], l: int) -> TimeDecomposition:
    """Recover the layers of a time-polynomial of degree <= l from l+1 time slices.

    ``samples`` holds pairs (t_j, u(., t_j)) with distinct t_j in (-1, 0].
    With beta_j = (1, t_j, ..., t_j^l), each unit vector is written as
    e_i = sum_j b^i_j beta_j, and then p_i = sum_j b^i_j u(., t_j).
    """
    if l < 0:
        raise ValueError("l must be nonnegative")
    if len(samples) != l + 1:
        raise ValueError(f"need exactly {l + 1} samples, got {len(samples)}")
    samples = sorted(((Fraction(t), u) for t, u in samples), key=lambda s: s[0])
    times = [t for t, _ in samples]
    if len(set(times)) != len(times):
        raise DuplicateTimes(f"sample times must be distinct: {times}")
    for t in times:
        if not -1 < t <= 0:
            raise TimeOutOfRange(f"sample time {t} is outside (-1, 0]")
    for _, u in samples:
        if not u.is_time_free():
            raise ValueError("samples must be t-free polynomials")
    # columns are beta_j
    B = RationalMatrix.from_rows(([t**i for t in times] for i in range(l + 1)), cols=l + 1)
    layers = []
    for i in range(l + 1):
        e = [Fraction(int(r == i)) for r in range(l + 1)]
        b = solve(B, e)
        p = Poly.zero(samples[0][1].n)
        for bj, (_, u) in zip(b, samples):
            if bj:
                p = p + u.scale(bj)
        layers.append(p)
    return TimeDecomposition(tuple(layers))


def sample_in_time(u: Poly, t: Fraction) -> Poly:
    """The t-free polynomial x -> u(x, t)."""
    t = Fraction(t)
    out: dict = {}
    for m, c in u.terms.items():
        key = m[:-1] + (0,)
        out[key] = out.get(key, 0) + c * t ** m[-1]
    return Poly(u.n, out)


@dataclass(frozen=True)
class StructureCheck:
    ok: bool
    residuals: tuple[tuple[int, Poly], ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


def structure_check(S: GeneratingSet, u: Poly) -> StructureCheck:
    """Check Delta p_l = 0 and Delta p_i = (i+1) p_(i+1) on the layers of u."""
    layers = time_decompose(u).coefficients
    l = len(layers) - 1
    bad = []
    for i in range(l + 1):
        expected = layers[i + 1].scale(i + 1) if i < l else Poly.zero(u.n)
        r = lattice_laplacian(S, layers[i]) - expected
        if r:
            bad.append((i, r))
    return StructureCheck(not bad, tuple(bad))


# the dimension bound on lattices


@dataclass(frozen=True)
class BoundReport:
    n: int
    k: int
    dim_caloric_2k: int
    dim_harmonic_2k: int
    bound: int

    @property
    def satisfied(self) -> bool:
        return self.dim_caloric_2k <= self.bound

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "dim_caloric_2k": self.dim_caloric_2k,
            "dim_harmonic_2k": self.dim_harmonic_2k,
            "bound": self.bound,
            "satisfied": self.satisfied,
        }


def bound_check(S: GeneratingSet, k: int) -> BoundReport:
    if k < 1:
        raise ValueError("k must be at least 1")
    cal = caloric_basis(S, 2 * k).dimension
    har = harmonic_basis(S, 2 * k).dimension
    return BoundReport(S.n, k, cal, har, (k + 1) * har)


def vanishing_order(k: int | Fraction, alpha: int | Fraction) -> int:
    """Least integer m with 4m > 2k + alpha + 2."""
    return int((2 * Fraction(k) + Fraction(alpha) + 2) // 4) + 1


def derivative_vanishing_check(S: GeneratingSet, u: Poly, k: int, alpha) -> bool:
    alpha = Fraction(alpha)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if u.parabolic_degree > k:
        raise ValueError(f"parabolic degree {u.parabolic_degree} exceeds k = {k}")
    if heat_operator(S, u):
        raise NotCaloric(f"{u} is not caloric")
    return partial_t(u, vanishing_order(k, alpha)).is_zero()
