from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.exceptions import PreconditionError, TruncationError
from app.polynomials import (
    ONE_POLYNOMIAL,
    Polynomial,
    PowerSeries,
    RationalFunction,
    Z,
    poly_arith,
    poly_gcd,
    series_div_poly,
    series_reciprocal,
)
from app.scalars import GaussianRational

coefficients = st.lists(st.fractions(max_denominator=9).filter(lambda f: abs(f) <= 9), max_size=6)
polynomials = coefficients.map(Polynomial.of)


def poly(*values) -> Polynomial:
    return Polynomial.of(values)


def test_trailing_zeros_are_trimmed():
    p = poly(1, 2, 0, 0)
    assert p.degree == 1
    assert p == poly(1, 2)
    assert Polynomial().degree is None
    assert poly(0, 0, 3).valuation == 2


@pytest.mark.parametrize(
    "case",
    [
        {"name": "add", "op": "add", "a": (1, 1), "b": (0, -1, 2), "expected": (1, 0, 2)},
        {"name": "sub", "op": "sub", "a": (1, 1), "b": (1, 1), "expected": ()},
        {"name": "mul", "op": "mul", "a": (1, 1), "b": (1, -1), "expected": (1, 0, -1)},
    ],
    ids=lambda case: case["name"],
)
def test_poly_arith(case):
    result = poly_arith(poly(*case["a"]), poly(*case["b"]), case["op"])
    assert result == poly(*case["expected"])


def test_poly_arith_rejects_unknown_operation():
    with pytest.raises(PreconditionError):
        poly_arith(ONE_POLYNOMIAL, ONE_POLYNOMIAL, "div")


@pytest.mark.parametrize(
    "case",
    [
        {"name": "common linear factor", "a": (-1, 0, 1), "b": (1, -2, 1), "expected": (-1, 1)},
        {"name": "coprime", "a": (1, 1), "b": (1, -1), "expected": (1,)},
        {"name": "zero and nonzero", "a": (), "b": (2, 4), "expected": (Fraction(1, 2), 1)},
    ],
    ids=lambda case: case["name"],
)
def test_poly_gcd(case):
    assert poly_gcd(poly(*case["a"]), poly(*case["b"])) == poly(*case["expected"])


def test_poly_gcd_of_zeros_is_an_error():
    with pytest.raises(PreconditionError):
        poly_gcd(Polynomial(), Polynomial())


def test_gaussian_gcd():
    i = GaussianRational.of("i")
    a = (Z - i) * (Z - 2)
    b = (Z - i) * (Z + 3)
    assert poly_gcd(a, b) == Z - i


@settings(max_examples=100, deadline=None)
@given(polynomials, polynomials.filter(lambda p: not p.is_zero))
def test_division_identity(a, b):
    quotient, remainder = divmod(a, b)
    assert quotient * b + remainder == a
    assert remainder.is_zero or remainder.degree < b.degree


def test_evaluation_and_text():
    p = poly(1, -1, Fraction(1, 2))
    assert p(2) == 1
    assert str(p) == "1 - z + 1/2*z^2"
    assert str(Polynomial()) == "0"


def test_series_truncation_is_enforced():
    s = PowerSeries.of([1, 2, 3])
    assert s.coefficient(-1) == 0
    assert s.coefficient(2) == 3
    with pytest.raises(TruncationError):
        s.coefficient(3)
    with pytest.raises(TruncationError):
        s.partial_sum(5)


def test_series_reciprocal_of_one_minus_z(geometric_series):
    assert series_reciprocal(PowerSeries.of([1, -1] + [0] * 10)) == geometric_series


def test_series_reciprocal_needs_constant_term():
    with pytest.raises(PreconditionError):
        series_reciprocal(PowerSeries.of([0, 1]))


def test_series_div_poly_matches_product(geometric_series):
    q = poly(1, Fraction(-1, 2))
    expansion = series_div_poly(PowerSeries.of([1] + [0] * 11), q)
    assert expansion.coeffs == tuple(GaussianRational(Fraction(1, 2 ** k)) for k in range(12))
    assert series_div_poly(geometric_series.multiply_polynomial(q), q) == geometric_series


@settings(max_examples=60, deadline=None)
@given(coefficients.filter(lambda c: c and c[0] != 0))
def test_reciprocal_is_inverse(values):
    s = PowerSeries.of(values + [0] * 3)
    product = s * series_reciprocal(s)
    assert product.coeffs == (GaussianRational.of(1),) + (GaussianRational.of(0),) * (len(product.coeffs) - 1)


def test_rational_function_reduction():
    r = RationalFunction(poly(-2, 2) * poly(1, 1), poly(-1, 1) * poly(4, -2))
    reduced = r.reduced()
    assert reduced.denominator == poly(1, Fraction(-1, 2))
    assert reduced.numerator == poly(Fraction(1, 2), Fraction(1, 2))
    assert reduced.same_as(r)


def test_rational_function_pole_evaluation():
    with pytest.raises(PreconditionError):
        RationalFunction(ONE_POLYNOMIAL, poly(1, -1))(1)
