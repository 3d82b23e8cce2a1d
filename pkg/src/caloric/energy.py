"""Parabolic-cylinder energies of ancient solutions and the Caccioppoli ratio.

Two kinds of ancient solution are supported:

* ``PolynomialField``: a caloric polynomial on the lattice (Z^n, S), seen
  through a finite box window.  All integrals are exact rationals, computed
  with the lattice measure mu = |S| on a ball that must fit in the window.
* ``SpectralField``: u(x, t) = sum_j exp(theta_j t) phi_j(x) on a finite
  graph with Delta phi_j = theta_j phi_j.  Integrals use closed-form time
  integrals evaluated with mpmath, so large cylinders do not overflow.

For a cylinder Q_r = B_r(x0) x [-r^2, 0] the integral of v is
int_{-r^2}^0 sum_{x in B_r} v(x, t) mu_x dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

import mpmath
import numpy as np

from .errors import BallTruncated, DimensionMismatch, NotCaloric, SpectralFailure, ZeroDenominator
from .graph import WeightedGraph, graph_laplacian
from .lattice import GeneratingSet, heat_operator, lattice_ball
from .poly import Poly, integrate_time, partial_t, shift_substitute

Number = Union[Fraction, float]

SPECTRAL_TOLERANCE = 1e-8
INTEGRANDS = ("u2", "gamma", "ut2", "dtm2")


@dataclass(frozen=True)
class CylinderSpec:
    center: object
    R: Fraction
    dilation: int = 36

    def __post_init__(self):
        R = Fraction(self.R)
        if R < 1:
            raise ValueError(f"cylinder radius must be at least 1, got {R}")
        if self.dilation < 1:
            raise ValueError("dilation must be a positive integer")
        object.__setattr__(self, "R", R)


@dataclass(frozen=True)
class PolynomialField:
    """A polynomial on (Z^n, S) restricted to the box max|x_i| <= box."""

    generating_set: GeneratingSet
    u: Poly
    box: int

    def __post_init__(self):
        if self.u.n != self.generating_set.n:
            raise DimensionMismatch("polynomial and generating set dimensions differ")

    @property
    def n(self) -> int:
        return self.u.n

    def is_caloric(self) -> bool:
        return heat_operator(self.generating_set, self.u).is_zero()

    def require_ball(self, center: Sequence[int], radius: int) -> list[tuple[int, ...]]:
        pts = _ball(self.generating_set, tuple(center), radius)
        lim = self.box
        if max(abs(c) for p in pts for c in p) > lim:
            raise BallTruncated(radius, f"ball B_{radius}({tuple(center)}) leaves the box of radius {lim}")
        return pts

    def restrict(self, G: WeightedGraph, t=0) -> list[Fraction]:
        """Values at time t on an embedded graph (vertex labels map to lattice points)."""
        if G.embedding is None:
            raise ValueError("graph carries no lattice embedding")
        return [self.u(G.embedding[v], t) for v in G.vertices]


@dataclass(frozen=True)
class SpectralField:
    """u = sum_j exp(theta_j t) phi_j on a finite graph."""

    graph: WeightedGraph
    thetas: tuple[float, ...]
    phis: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.thetas) != len(self.phis):
            raise ValueError("one eigenfunction per eigenvalue is required")
        for theta, phi in zip(self.thetas, self.phis):
            if theta > 0:
                raise SpectralFailure(f"eigenvalue {theta} is positive")
            res = np.max(np.abs(graph_laplacian(self.graph, phi) - theta * phi))
            if res > SPECTRAL_TOLERANCE:
                raise SpectralFailure(f"eigen-residual {res:.3e} exceeds {SPECTRAL_TOLERANCE}")

    def values(self, t: float) -> np.ndarray:
        return sum(math.exp(th * t) * phi for th, phi in zip(self.thetas, self.phis))


Field = Union[PolynomialField, SpectralField]


# polynomial path


@lru_cache(maxsize=64)
def _ball(S: GeneratingSet, center: tuple, radius: int) -> tuple:
    return tuple(lattice_ball(S, center, radius))


def _power_sums(points: Sequence[tuple[int, ...]], degree: int) -> dict[tuple, int]:
    """sum over points of x^a for every exponent vector a with |a| <= degree."""
    n = len(points[0])
    if n == 1:
        sums = [0] * (degree + 1)
        counts: dict[int, int] = {}
        for (v,) in points:
            counts[v] = counts.get(v, 0) + 1
        for v, c in counts.items():
            pw = c
            for a in range(degree + 1):
                sums[a] += pw
                pw *= v
        return {(a,): s for a, s in enumerate(sums)}
    groups: dict[int, list] = {}
    for p in points:
        groups.setdefault(p[0], []).append(p[1:])
    out: dict[tuple, int] = {}
    for v, rest in groups.items():
        sub = _power_sums(rest, degree)
        pows = [1]
        for _ in range(degree):
            pows.append(pows[-1] * v)
        for mono, s in sub.items():
            if not s:
                continue
            used = sum(mono)
            for a in range(degree - used + 1):
                key = (a,) + mono
                out[key] = out.get(key, 0) + pows[a] * s
    return out


@lru_cache(maxsize=64)
def _ball_moments(S: GeneratingSet, center: tuple, radius: int, degree: int) -> dict[tuple, int]:
    return _power_sums(_ball(S, center, radius), degree)


def lattice_gamma(S: GeneratingSet, u: Poly) -> Poly:
    """Gamma(u) on (Z^n, S) as a polynomial: (1/2|S|) sum_s (u(x+s) - u(x))^2."""
    acc = Poly.zero(u.n)
    for s in S.generators:
        d = shift_substitute(u, s) - u
        acc = acc + d * d
    return acc.scale(Fraction(1, 2 * len(S)))


def _integrand_poly(field: PolynomialField, integrand: str, order: int) -> Poly:
    u = field.u
    if integrand == "u2":
        return u * u
    if integrand == "gamma":
        return lattice_gamma(field.generating_set, u)
    if integrand == "ut2":
        d = partial_t(u, 1)
        return d * d
    if integrand == "dtm2":
        d = partial_t(u, order)
        return d * d
    raise ValueError(f"unknown integrand {integrand!r}; choose from {INTEGRANDS}")


def _polynomial_integral(field: PolynomialField, v: Poly, center, r: Fraction) -> Fraction:
    radius = math.floor(r)
    center = tuple(center)
    field.require_ball(center, radius)
    if v.is_zero():
        return Fraction(0)
    q = integrate_time(v, r * r)
    if q.is_zero():
        return Fraction(0)
    moments = _ball_moments(field.generating_set, center, radius, q.spatial_degree)
    total = sum((c * moments.get(m[:-1], 0) for m, c in q.terms.items()), Fraction(0))
    return total * len(field.generating_set)


# spectral path


def _time_integral(c, T) -> mpmath.mpf:
    """int_{-T}^0 exp(c t) dt, with the c = 0 limit taken explicitly."""
    if c == 0:
        return mpmath.mpf(T)
    c = mpmath.mpf(c)
    return -mpmath.expm1(-c * T) / c


def _spectral_integral(field: SpectralField, integrand: str, center: int, r: Fraction, order: int):
    G = field.graph
    ball = G.ball(center, math.floor(r))
    T = mpmath.mpf(r.numerator) ** 2 / mpmath.mpf(r.denominator) ** 2
    W, mu = G.float_arrays()
    Phi = np.array(field.phis).T  # vertices x modes
    th = np.array(field.thetas)
    if integrand == "gamma":
        # 1/2 sum_{x in B} sum_y w_xy grad(phi_j) grad(phi_k)
        A = np.zeros((len(th), len(th)))
        for x in ball:
            nbrs = np.nonzero(W[x])[0]
            D = Phi[nbrs] - Phi[x]
            A += 0.5 * (W[x, nbrs][:, None] * D).T @ D
        factor = np.ones_like(A)
    else:
        P = Phi[ball]
        A = (P * mu[ball][:, None]).T @ P
        if integrand == "u2":
            factor = np.ones_like(A)
        elif integrand in ("ut2", "dtm2"):
            m = 1 if integrand == "ut2" else order
            factor = np.outer(th**m, th**m)
        else:
            raise ValueError(f"unknown integrand {integrand!r}; choose from {INTEGRANDS}")
    total = mpmath.mpf(0)
    for j in range(len(th)):
        for k in range(len(th)):
            coeff = A[j, k] * factor[j, k]
            if coeff:
                total += coeff * _time_integral(th[j] + th[k], T)
    return total


def cylinder_integral(
    field: Field,
    integrand: str,
    spec: CylinderSpec,
    radius_multiplier: int = 1,
    order: int = 1,
):
    """Integral of ``integrand`` over Q_{multiplier * R}.

    ``integrand`` is one of "u2" (u^2), "gamma" (Gamma(u)), "ut2" (u_t^2)
    or "dtm2" ((d/dt)^order u squared).  Exact ``Fraction`` for polynomial
    fields; ``float`` for spectral ones.
    """
    r = spec.R * radius_multiplier
    if isinstance(field, PolynomialField):
        return _polynomial_integral(field, _integrand_poly(field, integrand, order), spec.center, r)
    return float(_spectral_integral(field, integrand, field.graph.vertex(spec.center), r, order))


@dataclass(frozen=True)
class CaccioppoliReport:
    R: Fraction
    dilation: int
    gradient_term: Number
    time_term: Number
    denominator: Number
    ratio: Number

    @property
    def numerator(self) -> Number:
        return self.gradient_term + self.time_term

    def to_dict(self) -> dict:
        def enc(v):
            return str(v) if isinstance(v, Fraction) else v

        return {
            "R": enc(self.R),
            "dilation": self.dilation,
            "gradient_term": enc(self.gradient_term),
            "time_term": enc(self.time_term),
            "numerator": enc(self.numerator),
            "denominator": enc(self.denominator),
            "ratio": enc(self.ratio),
            "ratio_float": float(self.ratio),
        }


def caccioppoli_ratio(field: Field, spec: CylinderSpec) -> CaccioppoliReport:
    """Both sides of R^2 int_{Q_R} Gamma(u) + R^4 int_{Q_R} u_t^2 <= C int_{Q_dR} u^2."""
    R = spec.R
    if isinstance(field, PolynomialField):
        if not field.is_caloric():
            raise NotCaloric(f"{field.u} does not solve the heat equation")
        # check the large ball first so truncation is reported for it
        big = _polynomial_integral(field, field.u * field.u, spec.center, R * spec.dilation)
        grad = R**2 * cylinder_integral(field, "gamma", spec)
        time = R**4 * cylinder_integral(field, "ut2", spec)
        if big == 0:
            raise ZeroDenominator("u vanishes on the large cylinder")
        return CaccioppoliReport(R, spec.dilation, grad, time, big, (grad + time) / big)

    center = field.graph.vertex(spec.center)
    big = _spectral_integral(field, "u2", center, R * spec.dilation, 1)
    grad = _spectral_integral(field, "gamma", center, R, 1) * mpmath.mpf(float(R)) ** 2
    time = _spectral_integral(field, "ut2", center, R, 1) * mpmath.mpf(float(R)) ** 4
    if big == 0:
        raise ZeroDenominator("u vanishes on the large cylinder")
    return CaccioppoliReport(R, spec.dilation, float(grad), float(time), float(big), float((grad + time) / big))


def derivative_decay_profile(field: Field, m: int, radii: Sequence, center) -> list[tuple[Fraction, Number]]:
    """Table of (R, int_{Q_R} |d^m u / dt^m|^2)."""
    if m < 1:
        raise ValueError("m must be positive")
    rows = []
    for R in radii:
        spec = CylinderSpec(center, Fraction(R))
        rows.append((spec.R, cylinder_integral(field, "dtm2", spec, order=m)))
    return rows


# volume growth


@dataclass(frozen=True)
class VolumeFit:
    alpha: float
    table: tuple[tuple[int, Fraction], ...]


def volume_growth_fit(G: WeightedGraph, center, R_max: int) -> VolumeFit:
    """mu(B_R) for R = 1..R_max and the least-squares slope of log mu(B_R) on log(1+R)."""
    if R_max < 2:
        raise ValueError("R_max must be at least 2")
    dist = G.distances(G.vertex(center))
    table = []
    for R in range(1, R_max + 1):
        table.append((R, G.measure(i for i, d in enumerate(dist) if d <= R)))
    xs = np.log1p([R for R, _ in table])
    ys = np.log([float(v) for _, v in table])
    slope = float(np.polyfit(xs, ys, 1)[0])
    return VolumeFit(slope, tuple(table))


# spectral ancient solutions


def spectral_ancient_solutions(G: WeightedGraph, count: int) -> list[SpectralField]:
    """u = exp(theta t) phi for the ``count`` eigenpairs with smallest |theta|.

    Eigenpairs come from the symmetric matrix D^-1/2 W D^-1/2, which is
    similar to the mu-normalised Laplacian plus the identity.
    """
    if not G.is_connected():
        raise ValueError("graph must be connected")
    if not 1 <= count <= len(G):
        raise ValueError(f"count must lie in 1..{len(G)}")
    W, mu = G.float_arrays()
    d = 1 / np.sqrt(mu)
    lam, psi = np.linalg.eigh(d[:, None] * W * d[None, :])
    thetas = lam - 1
    order = np.argsort(np.abs(thetas), kind="stable")[:count]
    fields = []
    for idx in order:
        theta = float(min(thetas[idx], 0.0))
        phi = d * psi[:, idx]
        phi = phi / np.max(np.abs(phi))
        lead = np.flatnonzero(np.abs(phi) > 1e-12)[0]
        if phi[lead] < 0:
            phi = -phi
        res = np.max(np.abs(graph_laplacian(G, phi) - theta * phi))
        if res > SPECTRAL_TOLERANCE:
            raise SpectralFailure(f"eigen-residual {res:.3e} exceeds {SPECTRAL_TOLERANCE}")
        fields.append(SpectralField(G, (theta,), (phi,)))
    return fields
