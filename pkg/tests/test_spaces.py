from fractions import Fraction
import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from caloric.errors import DimensionMismatch, DuplicateTimes, NotCaloric, TimeOutOfRange
from caloric.lattice import GeneratingSet, heat_operator, lattice_laplacian
from caloric.poly import Poly, parse_poly, partial_t
from caloric.spaces import (
    bound_check,
    caloric_basis,
    caloric_dimension_formula,
    derivative_vanishing_check,
    dim_parabolic,
    dim_polynomials,
    harmonic_basis,
    harmonic_dimension_formula,
    heat_matrix_rank,
    poisson_solve,
    sample_in_time,
    structure_check,
    time_decompose,
    vandermonde_recover,
    vanishing_order,
)
from oracles import kernel_dimension, lagrange_layers, to_sympy
from strategies import generating_sets, polys

S1 = GeneratingSet.standard(1)
S2 = GeneratingSet.standard(2)


def P(text, n=1):
    return parse_poly(text, n)


def span_equal(basis, expected):
    """The polynomials in ``basis`` and ``expected`` span the same space."""
    from caloric.lattice import coefficient_vector, monomial_basis
    from caloric.linalg import RationalMatrix, rank

    n = expected[0].n
    k = max(p.parabolic_degree for p in list(basis) + list(expected))
    cols = monomial_basis(n, k, True)
    a = [coefficient_vector(p, cols) for p in basis]
    b = [coefficient_vector(p, cols) for p in expected]
    r = lambda rows: rank(RationalMatrix.from_rows(rows, cols=len(cols)))
    return r(a) == r(b) == r(a + b)


def test_harmonic_examples():
    h = harmonic_basis(S1, 2)
    assert h.dimension == 2 and span_equal(h.polynomials, [P("1"), P("x1")])
    h2 = harmonic_basis(S2, 2)
    # 1, x1, x2, x1 x2 and x1^2 - x2^2: five elements
    assert h2.dimension == 5
    assert span_equal(h2.polynomials, [P(s, 2) for s in ("1", "x1", "x2", "x1 x2", "x1^2 - x2^2")])
    for S in (S1, S2, GeneratingSet.symmetrize(2, [(1, 0), (0, 1), (1, 1)])):
        assert [str(p) for p in harmonic_basis(S, 0).polynomials] == ["1"]


def test_caloric_examples():
    c = caloric_basis(S1, 2)
    assert c.dimension == 3 and span_equal(c.polynomials, [P("1"), P("x1"), P("x1^2 + t")])
    assert P("x1^2 + t") in c.polynomials
    assert caloric_basis(S1, 1).dimension == 2
    assert caloric_basis(S1, 0).dimension == 1
    assert caloric_basis(S1, 2).to_dict()["match"] is True


def test_basis_elements_normalised():
    for p in caloric_basis(S2, 4).polynomials:
        lead = max(p.terms, key=lambda m: (sum(m[:-1]) + 2 * m[-1], m))
        assert p.terms[lead] == 1


def test_formula_examples():
    assert caloric_dimension_formula(1, 2) == 3
    assert caloric_dimension_formula(2, 2) == 6
    assert caloric_dimension_formula(3, 0) == 1
    with pytest.raises(ValueError):
        caloric_dimension_formula(0, 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("k", range(9))
def test_counting_identities(n, k):
    assert caloric_dimension_formula(n, k) == dim_polynomials(n, k)
    assert dim_parabolic(n, k) - dim_parabolic(n, k - 2) == dim_polynomials(n, k)
    assert harmonic_dimension_formula(n, k) <= dim_polynomials(n, k)


@pytest.mark.parametrize("n,k", [(1, 4), (2, 3), (2, 4)])
def test_dimensions_match_sympy_oracle(n, k):
    S = GeneratingSet.standard(n)
    assert caloric_basis(S, k).dimension == kernel_dimension(n, k, S.generators, True)
    assert harmonic_basis(S, k).dimension == kernel_dimension(n, k, S.generators, False)


def test_dimensions_match_oracle_on_skew_set():
    S = GeneratingSet.symmetrize(2, [(1, 0), (0, 1), (1, 1), (2, -1)])
    assert caloric_basis(S, 4).dimension == kernel_dimension(2, 4, S.generators, True)
    assert harmonic_basis(S, 4).dimension == kernel_dimension(2, 4, S.generators, False)


@given(st.data())
def test_dimensions_grow_with_k(data):
    S = data.draw(generating_sets(2))
    dims = [caloric_basis(S, k).dimension for k in range(5)]
    assert dims == sorted(dims)
    assert dims == [caloric_dimension_formula(2, k) for k in range(5)]
    assert heat_matrix_rank(S, 4) == dim_parabolic(2, 2)


def test_basis_elements_are_caloric_and_harmonic():
    S = GeneratingSet.symmetrize(2, [(1, 0), (0, 1), (1, 1)])
    for p in caloric_basis(S, 5).polynomials:
        assert heat_operator(S, p).is_zero()
        assert structure_check(S, p)
    for p in harmonic_basis(S, 5).polynomials:
        assert lattice_laplacian(S, p).is_zero()
        assert p.is_time_free()


def test_poisson_examples():
    assert poisson_solve(S1, P("1")) == P("x1^2")
    assert poisson_solve(S1, P("t")) == P("x1^2 t + 1/6 x1^4 - 1/6 x1^2")
    assert poisson_solve(S1, Poly.zero(1)).is_zero()
    with pytest.raises(DimensionMismatch):
        poisson_solve(S1, P("1", 2))


def test_poisson_top_layer_variant():
    u = poisson_solve(S1, P("t"), top_layer=1)
    assert heat_operator(S1, u) == P("t")
    assert u.time_degree == 2


@given(st.data())
def test_poisson_reapplies(data):
    S = data.draw(generating_sets(2))
    g = data.draw(polys(n=2, max_degree=3, max_terms=3))
    u = poisson_solve(S, g)
    assert heat_operator(S, u) == g
    if g:
        assert u.parabolic_degree <= g.parabolic_degree + 2


def test_time_decompose_examples():
    d = time_decompose(P("x1^2 + t"))
    assert d.l == 1 and d.coefficients == (P("x1^2"), P("1"))
    d = time_decompose(P("x1 x2", 2))
    assert d.l == 0 and d.coefficients == (P("x1 x2", 2),)
    d = time_decompose(P("t^2 - t"))
    assert d.coefficients == (Poly.zero(1), P("-1"), P("1"))


@given(polys(n=2))
def test_time_decompose_reassembles(u):
    assert time_decompose(u).reassemble() == u


def test_vandermonde_examples():
    half = Fraction(-1, 2)
    for u in (P("x1 + t"), P("x1^2 + t")):
        d = vandermonde_recover([(half, sample_in_time(u, half)), (0, sample_in_time(u, 0))], 1)
        assert d.coefficients == time_decompose(u).coefficients
    c = P("x1^3 - 2")
    d = vandermonde_recover([(Fraction(-j, 4), c) for j in range(3)], 2)
    assert d.coefficients == (c, Poly.zero(1), Poly.zero(1))


def test_vandermonde_errors():
    u = P("x1")
    with pytest.raises(DuplicateTimes):
        vandermonde_recover([(0, u), (0, u)], 1)
    with pytest.raises(TimeOutOfRange):
        vandermonde_recover([(-1, u), (0, u)], 1)
    with pytest.raises(TimeOutOfRange):
        vandermonde_recover([(Fraction(1, 2), u), (0, u)], 1)
    with pytest.raises(ValueError):
        vandermonde_recover([(0, u)], 1)


def test_vandermonde_matches_lagrange_oracle():
    rng = random.Random(3)
    for u in caloric_basis(S2, 6).polynomials:
        l = u.time_degree
        times = sorted({Fraction(-rng.randrange(0, 40), 41) for _ in range(20)})[: l + 1]
        samples = [(t, sample_in_time(u, t)) for t in times]
        got = vandermonde_recover(samples, l).coefficients
        assert [to_sympy(p) for p in got] == lagrange_layers(samples, l)


def test_structure_check_examples():
    assert structure_check(S1, P("x1^2 + t"))
    bad = structure_check(S1, P("x1^2"))
    assert not bad and bad.residuals[0] == (0, P("1"))
    assert structure_check(S1, P("5"))


@given(st.data())
def test_structure_check_agrees_with_heat_operator(data):
    S = data.draw(generating_sets(2))
    u = data.draw(polys(n=2))
    assert bool(structure_check(S, u)) == heat_operator(S, u).is_zero()


def test_bound_examples():
    r = bound_check(S1, 1)
    assert (r.dim_caloric_2k, r.dim_harmonic_2k, r.bound, r.satisfied) == (3, 2, 4, True)
    r = bound_check(S1, 2)
    assert (r.dim_caloric_2k, r.dim_harmonic_2k, r.bound, r.satisfied) == (5, 2, 6, True)
    r = bound_check(S2, 1)
    assert (r.dim_caloric_2k, r.dim_harmonic_2k, r.bound, r.satisfied) == (6, 5, 10, True)
    with pytest.raises(ValueError):
        bound_check(S1, 0)


def test_vanishing_order():
    assert vanishing_order(2, 1) == 2
    assert vanishing_order(6, 2) == 5
    for k in range(8):
        for a in (1, 2, 3, Fraction(1, 2)):
            m = vanishing_order(k, a)
            assert 4 * m > 2 * k + a + 2 >= 4 * (m - 1)


def test_derivative_vanishing_examples():
    assert derivative_vanishing_check(S1, P("x1^2 + t"), 2, 1)
    assert derivative_vanishing_check(S1, P("1"), 0, 3)
    assert all(derivative_vanishing_check(S2, u, 6, 2) for u in caloric_basis(S2, 6).polynomials)
    with pytest.raises(NotCaloric):
        derivative_vanishing_check(S1, P("x1^2"), 2, 1)
    with pytest.raises(ValueError):
        derivative_vanishing_check(S1, P("x1^2 + t"), 1, 1)
    with pytest.raises(ValueError):
        derivative_vanishing_check(S1, P("1"), 1, 0)
