"""Sparse exact polynomials in spatial variables x1..xn and a time variable t.

A monomial is stored as a flat tuple ``(a1, ..., an, b)`` of exponents, the
last entry being the exponent of ``t``.  Coefficients are ``Fraction``.
Zero coefficients are never stored, so two polynomials are equal exactly
when their term maps are equal.

Terms are ordered by parabolic degree ``a1 + ... + an + 2b`` and then
lexicographically on the exponent tuple (x1 > x2 > ... > xn > t).  Matrix
columns use this order ascending; text output lists terms descending.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import comb
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Union

from .errors import DimensionMismatch, NonPositiveSpan, PolynomialSyntaxError

Monomial = tuple  # (a1, ..., an, b)
Scalar = Union[int, Fraction]


def spatial_degree(m: Monomial) -> int:
    return sum(m[:-1])


def parabolic_degree_of(m: Monomial) -> int:
    return sum(m[:-1]) + 2 * m[-1]


def monomial_key(m: Monomial):
    """Sort key of the graded-lex term order (ascending)."""
    return (parabolic_degree_of(m), m)


@dataclass(frozen=True)
class DegreeInfo:
    total_degree: int
    parabolic_degree: int


class Poly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Scalar] | None = None):
        if n < 1:
            raise ValueError("ambient dimension must be at least 1")
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != n + 1:
                raise DimensionMismatch(f"monomial {mono} does not have {n} + 1 exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = Fraction(coeff)
            if c:
                c = clean.get(mono, 0) + c
                if c:
                    clean[mono] = c
                else:
                    clean.pop(mono, None)
        self.n = n
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Poly":
        # caller guarantees canonical form
        p = object.__new__(cls)
        p.n = n
        p._terms = terms
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c: Scalar) -> "Poly":
        return cls(n, {(0,) * (n + 1): c})

    @classmethod
    def x(cls, n: int, i: int) -> "Poly":
        """The coordinate function x_i, 1-based."""
        if not 1 <= i <= n:
            raise DimensionMismatch(f"x{i} does not exist in dimension {n}")
        m = [0] * (n + 1)
        m[i - 1] = 1
        return cls._raw(n, {tuple(m): Fraction(1)})

    @classmethod
    def t(cls, n: int) -> "Poly":
        return cls._raw(n, {(0,) * n + (1,): Fraction(1)})

    @classmethod
    def monomial(cls, m: Sequence[int], coeff: Scalar = 1) -> "Poly":
        return cls(len(m) - 1, {tuple(m): coeff})

    # inspection

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, m: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(m), Fraction(0))

    def sorted_terms(self, descending: bool = True) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: monomial_key(kv[0]), reverse=descending)

    def degree_info(self) -> DegreeInfo:
        if not self._terms:
            return DegreeInfo(-1, -1)
        return DegreeInfo(
            max(sum(m) for m in self._terms),
            max(parabolic_degree_of(m) for m in self._terms),
        )

    @property
    def total_degree(self) -> int:
        return self.degree_info().total_degree

    @property
    def parabolic_degree(self) -> int:
        return max((parabolic_degree_of(m) for m in self._terms), default=-1)

    @property
    def spatial_degree(self) -> int:
        return max((spatial_degree(m) for m in self._terms), default=-1)

    @property
    def time_degree(self) -> int:
        return max((m[-1] for m in self._terms), default=-1)

    def is_time_free(self) -> bool:
        return all(m[-1] == 0 for m in self._terms)

    # arithmetic

    def _check(self, other: "Poly") -> None:
        if self.n != other.n:
            raise DimensionMismatch(f"dimensions differ: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.constant(self.n, other)
        return NotImplemented

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "Poly":
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Scalar) -> "Poly":
        c = Fraction(c)
        if not c:
            return Poly.zero(self.n)
        return Poly._raw(self.n, {m: v * c for m, v in self._terms.items()})

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Poly._raw(self.n, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        result = Poly.constant(self.n, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.n}, {format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # calculus and substitution

    def shift(self, s: Sequence[int]) -> "Poly":
        return shift_substitute(self, s)

    def partial_t(self, m: int = 1) -> "Poly":
        return partial_t(self, m)

    def integrate_time(self, span: Scalar) -> "Poly":
        return integrate_time(self, span)

    def __call__(self, x: Sequence[Scalar], t: Scalar = 0) -> Fraction:
        return evaluate(self, x, t)


def add(p: Poly, q: Poly) -> Poly:
    return p + q


def multiply(p: Poly, q: Poly) -> Poly:
    return p * q


@lru_cache(maxsize=4096)
def _binomial_row(a: int, s: int) -> tuple[tuple[int, int], ...]:
    # (x + s)^a = sum_j C(a, j) s^(a-j) x^j
    return tuple((j, comb(a, j) * s ** (a - j)) for j in range(a + 1) if s or j == a)


def shift_substitute(p: Poly, s: Sequence[int]) -> Poly:
    """Return ``p(x + s, t)``."""
    if len(s) != p.n:
        raise DimensionMismatch(f"shift vector has length {len(s)}, expected {p.n}")
    s = tuple(int(v) for v in s)
    if not any(s):
        return p
    out: dict[Monomial, Fraction] = {}
    for mono, c in p._terms.items():
        rows = [_binomial_row(a, si) for a, si in zip(mono[:-1], s)]
        b = mono[-1]
        for combo in product(*rows):
            coeff = c
            exps = []
            for j, w in combo:
                coeff *= w
                exps.append(j)
            exps.append(b)
            key = tuple(exps)
            out[key] = out.get(key, 0) + coeff
    return Poly._raw(p.n, {m: c for m, c in out.items() if c})


def partial_t(p: Poly, m: int = 1) -> Poly:
    """The m-th formal derivative in t."""
    if m < 1:
        raise ValueError("derivative order must be positive")
    out = {}
    for mono, c in p._terms.items():
        b = mono[-1]
        if b >= m:
            falling = 1
            for j in range(b - m + 1, b + 1):
                falling *= j
            out[mono[:-1] + (b - m,)] = c * falling
    return Poly._raw(p.n, out)


def integrate_time(p: Poly, span: Scalar) -> Poly:
    """Integrate over ``t`` in ``[-span, 0]``; the result is t-free."""
    T = Fraction(span)
    if T <= 0:
        raise NonPositiveSpan(f"time span must be positive, got {T}")
    out: dict[Monomial, Fraction] = {}
    for mono, c in p._terms.items():
        b = mono[-1]
        # int_{-T}^0 t^b dt = (-1)^b T^(b+1) / (b+1)
        w = (-1) ** b * T ** (b + 1) / (b + 1)
        key = mono[:-1] + (0,)
        out[key] = out.get(key, 0) + c * w
    return Poly._raw(p.n, {m: c for m, c in out.items() if c})


def evaluate(p: Poly, x: Sequence[Scalar], t: Scalar = 0) -> Fraction:
    if len(x) != p.n:
        raise DimensionMismatch(f"point has {len(x)} coordinates, expected {p.n}")
    point = [Fraction(v) for v in x] + [Fraction(t)]
    total = Fraction(0)
    for mono, c in p._terms.items():
        v = c
        for base, e in zip(point, mono):
            if e:
                v *= base ** e
        total += v
    return total


def time_free_part(p: Poly) -> Poly:
    return Poly._raw(p.n, {m: c for m, c in p._terms.items() if m[-1] == 0})


def from_terms(n: int, items: Iterable[tuple[Sequence[int], Scalar]]) -> Poly:
    acc: dict = {}
    for m, c in items:
        m = tuple(m)
        acc[m] = acc.get(m, 0) + Fraction(c)
    return Poly(n, acc)


# text form


def _format_monomial(m: Monomial) -> str:
    parts = []
    for i, a in enumerate(m[:-1], start=1):
        if a:
            parts.append(f"x{i}" if a == 1 else f"x{i}^{a}")
    b = m[-1]
    if b:
        parts.append("t" if b == 1 else f"t^{b}")
    return " ".join(parts)


def format_poly(p: Poly) -> str:
    if not p._terms:
        return "0"
    pieces = []
    for idx, (m, c) in enumerate(p.sorted_terms(descending=True)):
        mono = _format_monomial(m)
        mag = abs(c)
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag} {mono}"
        if idx == 0:
            pieces.append(f"-{body}" if c < 0 else body)
        else:
            pieces.append(f" - {body}" if c < 0 else f" + {body}")
    return "".join(pieces)


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\s*/\s*\d+)?)|(?P<var>x\d+|t)(?:\s*\^\s*(?P<exp>\d+))?|(?P<sign>[+\-−])|(?P<bad>\S))")


def parse_poly(text: str, n: int) -> Poly:
    """Parse the text form, e.g. ``"3/2 x1^2 t + x2 - 1"``."""
    tokens = []
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        mt = _TOKEN.match(text, pos)
        start = mt.start(mt.lastgroup)
        if mt.lastgroup == "bad":
            raise PolynomialSyntaxError(f"unexpected character {mt.group('bad')!r}", text, start)
        tokens.append((mt.lastgroup if mt.lastgroup != "exp" else "var", mt, start))
        pos = mt.end()
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial", text, 0)

    terms: dict[Monomial, Fraction] = {}
    i = 0
    first = True
    while i < len(tokens):
        sign = 1
        kind, mt, start = tokens[i]
        if kind == "sign":
            sign = 1 if mt.group("sign") == "+" else -1
            i += 1
        elif not first:
            raise PolynomialSyntaxError("expected '+' or '-' between terms", text, start)
        first = False
        if i >= len(tokens):
            raise PolynomialSyntaxError("dangling sign", text, len(text))
        coeff = Fraction(1)
        exps = [0] * (n + 1)
        seen = False
        kind, mt, start = tokens[i]
        if kind == "num":
            num = mt.group("num").replace(" ", "")
            if "/" in num and int(num.split("/")[1]) == 0:
                raise PolynomialSyntaxError("zero denominator", text, start)
            coeff = Fraction(num)
            seen = True
            i += 1
        while i < len(tokens) and tokens[i][0] == "var":
            _, mt, start = tokens[i]
            name = mt.group("var")
            e = int(mt.group("exp")) if mt.group("exp") is not None else 1
            if name == "t":
                exps[n] += e
            else:
                idx = int(name[1:])
                if not 1 <= idx <= n:
                    raise DimensionMismatch(f"variable {name} at position {start} exceeds dimension {n}")
                exps[idx - 1] += e
            seen = True
            i += 1
        if not seen:
            kind, mt, start = tokens[i]
            raise PolynomialSyntaxError("expected a coefficient or variable", text, start)
        if i < len(tokens) and tokens[i][0] == "num":
            raise PolynomialSyntaxError("coefficient must precede variables", text, tokens[i][2])
        m = tuple(exps)
        terms[m] = terms.get(m, 0) + sign * coeff
    return Poly(n, terms)

