from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from dhtr.series import (
    AlgebraError,
    ComplexRing,
    Poly,
    RationalRing,
    RingMismatchError,
    Series,
    SeriesRing,
)
from dhtr.weightpoly import WeightPolynomial, WeightPolyRing

QQ = RationalRing()


def qseries(coeffs, order=None, lo=0):
    order = order if order is not None else lo + len(coeffs)
    return Series.from_coeffs(QQ, "z", coeffs, order, lo=lo)


def reversion_by_substitution(f, order):
    """Independent order-by-order solve of f(g(x)) = x, for tests only."""
    ring = f.ring
    g_coeffs = [ring.zero, ring.invert(f.coefficient(1))]
    for n in range(2, order):
        g = Series(ring, f.var, 0, g_coeffs + [ring.zero], n + 1)
        delta = f.truncate(n + 1).compose(g) - Series.identity(ring, f.var, n + 1)
        # coefficient of x^n of f(g) is linear in the unknown with slope c1
        g_coeffs.append(-delta.coefficient(n) * ring.invert(f.coefficient(1)))
    return Series(ring, f.var, 0, g_coeffs, order)


# ----------------------------------------------------------------------
# multiplication / addition / division


def test_mul_difference_of_squares():
    one_plus = qseries([1, 1, 0, 0])
    one_minus = qseries([1, -1, 0, 0])
    prod = one_plus * one_minus
    assert [prod.coefficient(k) for k in range(4)] == [1, 0, -1, 0]


def test_div_geometric_series():
    one = qseries([1, 0, 0, 0])
    denom = qseries([1, -1, 0, 0])
    quot = one / denom
    assert [quot.coefficient(k) for k in range(4)] == [1, 1, 1, 1]


def test_laurent_product():
    a = qseries([1, 1], lo=-1)  # z^-1 + 1
    b = qseries([1, -1], lo=-1)  # z^-1 - 1
    prod = a * b
    assert prod.lo == -2
    assert prod.coefficient(-2) == 1
    assert prod.coefficient(-1) == 0
    # z^-2 - 1: the constant term sits at the edge of the trusted window
    assert prod.order == 0


def test_min_order_rule_documented():
    a = qseries([1, 2, 3], order=3)
    b = qseries([1, 1, 1, 1, 1], order=5)
    assert (a + b).order == 3
    assert (a * b).order == 3  # both lowest exponents are 0
    shifted = a.shift(2)
    assert (shifted * b).order == 5  # 2 + min(3 + 5 - 2, ...) bookkeeping


def test_ring_and_variable_mismatch():
    a = qseries([1, 2])
    b = Series.from_coeffs(QQ, "w", [1, 2], 2)
    with pytest.raises(RingMismatchError):
        a + b
    ring = WeightPolyRing(2)
    c = Series.constant(ring, "z", ring.one, 2)
    with pytest.raises(RingMismatchError):
        a * c


def test_division_by_zero_leading_coefficient():
    a = qseries([1, 1])
    with pytest.raises(AlgebraError):
        a / Series.zero(QQ, "z", 2)
    # dividing by a series with exactly-zero head is Laurent division
    b = qseries([0, 1])
    quot = a / b
    assert quot.lo == -1 and quot.coefficient(-1) == 1


# ----------------------------------------------------------------------
# exp / log


def test_exp_zero():
    z = Series.zero(QQ, "z", 4)
    e = z.exp()
    assert [e.coefficient(k) for k in range(4)] == [1, 0, 0, 0]


def test_exp_of_sz_taylor():
    ring = WeightPolyRing(1)
    s = WeightPolynomial.s(1)
    f = Series.from_coeffs(ring, "z", [ring.zero, s], 4)
    e = f.exp()
    assert e.coefficient(0) == ring.one
    assert e.coefficient(1) == s
    assert e.coefficient(2) == (s * s) / 2
    assert e.coefficient(3) == (s * s * s) / 6


def test_exp_2sP_coefficient():
    # [z^2] exp(2 s P(z)) with P = q1 z + q2 z^2 equals 2 s q2 + 2 s^2 q1^2,
    # by multiplying out 1 + 2sP + (2sP)^2/2 through order 2.
    ring = WeightPolyRing(2)
    q1, q2, s = WeightPolynomial.q(1, 2), WeightPolynomial.q(2, 2), WeightPolynomial.s(2)
    P = Series.from_coeffs(ring, "z", [ring.zero, q1, q2], 3)
    e = P.scale(s).scale(2).exp()
    expected = (q2 * s).scale(2) + (q1 * q1 * s * s).scale(2)
    assert e.coefficient(2) == expected


def test_exp_rejects_constant_term():
    f = qseries([1, 1])
    with pytest.raises(AlgebraError):
        f.exp()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=7), min_size=1, max_size=5))
def test_exp_log_round_trip(tail):
    f = qseries([0] + tail)
    g = f.exp()
    assert g.log() == f or [
        g.log().coefficient(k) for k in range(f.order)
    ] == [f.coefficient(k) for k in range(f.order)]


# ----------------------------------------------------------------------
# reversion


def test_reversion_identity():
    f = Series.identity(QQ, "z", 6)
    g = f.reversion()
    assert [g.coefficient(k) for k in range(6)] == [0, 1, 0, 0, 0, 0]


def test_reversion_catalan():
    # x = z - z^2 inverts to the Catalan generating series
    # z = x + x^2 + 2x^3 + 5x^4 + O(x^5); cross-checked against the
    # independent substitution oracle.
    f = qseries([0, 1, -1, 0, 0])
    g = f.reversion()
    assert [g.coefficient(k) for k in range(5)] == [0, 1, 1, 2, 5]
    oracle = reversion_by_substitution(f, 5)
    assert [oracle.coefficient(k) for k in range(5)] == [0, 1, 1, 2, 5]


def test_reversion_tree_function():
    # x = z exp(-s z): [x^mu] z(x) = mu^(mu-1) s^(mu-1) / mu!
    ring = WeightPolyRing(1)
    s = WeightPolynomial.s(1)
    order = 7
    z = Series.identity(ring, "z", order)
    f = z * z.scale(s).scale(-1).exp()
    g = f.reversion()
    from math import factorial

    for mu in range(1, order):
        expected = WeightPolynomial.monomial(
            (0,), mu - 1, Fraction(mu ** (mu - 1), factorial(mu)), 1
        )
        assert g.coefficient(mu) == expected


@settings(max_examples=25, deadline=None)
@given(st.lists(st.fractions(min_value=-7, max_value=7, max_denominator=5), min_size=0, max_size=4))
def test_reversion_round_trip(tail):
    f = qseries([0, 1] + tail)
    g = f.reversion()
    back = f.compose(g)
    for k in range(back.order):
        assert back.coefficient(k) == (1 if k == 1 else 0)


def test_reversion_rejects_zero_linear_part():
    f = qseries([0, 0, 1, 1])
    with pytest.raises(AlgebraError):
        f.reversion()


# ----------------------------------------------------------------------
# residue and calculus


def test_residue_reads_minus_one():
    assert qseries([1], lo=-1).residue() == 1
    assert qseries([3, 1, 1]).residue() == 0
    u = qseries([5, 7, 0, 0], lo=-2)  # u^-2 (5 + 7u)
    assert u.residue() == 7


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.fractions(min_value=-9, max_value=9, max_denominator=5), min_size=1, max_size=6),
    st.integers(-3, 1),
)
def test_residue_of_derivative_vanishes(coeffs, lo):
    f = qseries(coeffs, lo=lo)
    assert f.derivative().residue() == 0


def test_antiderivative_requires_zero_residue():
    f = qseries([1], lo=-1)
    with pytest.raises(AlgebraError):
        f.antiderivative()
    g = qseries([3, 0, 2], lo=-4)  # 3 z^-4 + 2 z^-2, window up to z^-1
    h = g.antiderivative()
    assert h.coefficient(-3) == -1
    assert h.coefficient(-1) == -2
    assert h.derivative().coefficient(-4) == 3


# ----------------------------------------------------------------------
# composition, numeric ring, nesting


def test_compose_polynomial_case():
    f = qseries([0, 0, 1, 1])  # z^2 + z^3
    g = qseries([0, 1, 1, 0])  # z + z^2
    h = f.compose(g)
    # (z + z^2)^2 + (z + z^2)^3 = z^2 + 2z^3 + ...
    assert h.coefficient(2) == 1
    assert h.coefficient(3) == 3


def test_compose_laurent_outer():
    f = qseries([1], lo=-2, order=2)  # z^-2
    g = qseries([0, 1, 1, 0, 0])  # z + z^2
    h = f.compose(g)
    assert h.coefficient(-2) == 1
    assert h.coefficient(-1) == -2


def test_numeric_ring_against_exact():
    ring = ComplexRing(128)
    with mpmath.workprec(128):
        f = Series.from_coeffs(ring, "z", [0, 1, Fraction(-1)], 8)
        g = f.reversion()
        exact = qseries([0, 1, -1, 0, 0, 0, 0, 0]).reversion()
        for k in range(8):
            assert abs(g.coefficient(k) - ring.from_rational(exact.coefficient(k))) < mpmath.mpf(2) ** -100


def test_nested_series_ring():
    inner_ring = RationalRing()
    ring = SeriesRing(inner_ring, "w", 3)
    w = Series.identity(inner_ring, "w", 3)
    f = Series.from_coeffs(ring, "z", [ring.one, w], 3)  # 1 + w z
    g = f * f
    assert g.coefficient(0) == ring.one
    assert g.coefficient(1) == w.scale(2)
    assert g.coefficient(2) == w * w


def test_poly_shifted_series():
    p = Poly.from_rationals(QQ, [1, 0, 1])  # 1 + z^2
    s = p.shifted_series(Fraction(2), "u", 4)
    # (2+u)^2 + 1 = 5 + 4u + u^2
    assert [s.coefficient(k) for k in range(4)] == [5, 4, 1, 0]
    assert p(Fraction(2)) == 5


def test_truncation_error_raised():
    f = qseries([1, 2], order=2)
    with pytest.raises(AlgebraError):
        f.coefficient(5)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=6), min_size=1, max_size=5))
def test_log_exp_round_trip(tail):
    # exp(log(1 + a)) = 1 + a for zero-constant a
    one_plus = qseries([1] + tail)
    assert one_plus.log().exp() == one_plus
