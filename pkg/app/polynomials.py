"""
Polynomials, truncated power series and rational functions over the
Gaussian rationals.

A `PowerSeries` only knows its first `truncation_len` coefficients: reading a
coefficient past the truncation raises `TruncationError` instead of returning
an implicit zero. Negative indices read as zero.
"""
from dataclasses import dataclass, field
from numbers import Rational
from typing import Iterable, Literal

from app.exceptions import PreconditionError, TruncationError
from app.scalars import GaussianRational, ONE, ZERO, format_scalar


def _scalars(values: Iterable) -> tuple[GaussianRational, ...]:
    return tuple(GaussianRational.of(value) for value in values)


@dataclass(frozen=True, slots=True)
class Polynomial:
    coeffs: tuple[GaussianRational, ...] = ()
    degree: int | None = field(init=False, compare=False, repr=False)
    valuation: int | None = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        coeffs = _scalars(self.coeffs)
        end = len(coeffs)
        while end and not coeffs[end - 1]:
            end -= 1
        coeffs = coeffs[:end]
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "degree", end - 1 if end else None)
        object.__setattr__(
            self, "valuation", next((k for k, c in enumerate(coeffs) if c), None)
        )

    # Construction

    @classmethod
    def of(cls, values: Iterable) -> "Polynomial":
        return cls(tuple(values))

    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls((value,))

    @classmethod
    def monomial(cls, value, power: int) -> "Polynomial":
        return cls((ZERO,) * power + (GaussianRational.of(value),))

    # Inspection

    @property
    def is_zero(self) -> bool:
        return self.degree is None

    @property
    def leading(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def coefficient(self, k: int) -> GaussianRational:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def __call__(self, z) -> GaussianRational:
        z = GaussianRational.of(z)
        result = ZERO
        for c in reversed(self.coeffs):
            result = result * z + c
        return result

    # Arithmetic

    def __add__(self, other):
        other = _as_polynomial(other)
        if other is NotImplemented:
            return other
        size = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coefficient(k) + other.coefficient(k) for k in range(size)))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_polynomial(other)
        if other is NotImplemented:
            return other
        size = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coefficient(k) - other.coefficient(k) for k in range(size)))

    def __rsub__(self, other):
        other = _as_polynomial(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, Rational)):
            return self.scale(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return ZERO_POLYNOMIAL
        product = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    product[i + j] = product[i + j] + a * b
        return Polynomial(tuple(product))

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        result = ONE_POLYNOMIAL
        for _ in range(exponent):
            result = result * self
        return result

    def scale(self, value) -> "Polynomial":
        value = GaussianRational.of(value)
        return Polynomial(tuple(c * value for c in self.coeffs))

    def shift(self, power: int) -> "Polynomial":
        if self.is_zero:
            return self
        return Polynomial((ZERO,) * power + self.coeffs)

    def truncate(self, length: int) -> "Polynomial":
        return Polynomial(self.coeffs[:length])

    def monic(self) -> "Polynomial":
        if self.is_zero:
            return self
        return self.scale(self.leading.inverse())

    def __divmod__(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coeffs)
        quotient = [ZERO] * max(len(remainder) - len(other.coeffs) + 1, 0)
        lead_inverse = other.leading.inverse()
        for k in range(len(quotient) - 1, -1, -1):
            top = remainder[k + other.degree]
            if not top:
                continue
            factor = top * lead_inverse
            quotient[k] = factor
            for i, c in enumerate(other.coeffs):
                remainder[k + i] = remainder[k + i] - factor * c
        return Polynomial(tuple(quotient)), Polynomial(tuple(remainder[: other.degree]))

    def __floordiv__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[0]

    def __mod__(self, other: "Polynomial") -> "Polynomial":
        return divmod(self, other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        quotient, remainder = divmod(self, other)
        if not remainder.is_zero:
            raise PreconditionError(f"{other} does not divide {self}")
        return quotient

    # Text

    def __str__(self):
        if self.is_zero:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            negative = c.is_real() and c.re < 0
            magnitude = -c if negative else c
            text = format_scalar(magnitude)
            if not magnitude.is_real():
                text = f"({text})"
            if k:
                power = "z" if k == 1 else f"z^{k}"
                text = power if magnitude == ONE else f"{text}*{power}"
            terms.append((negative, text))
        first_negative, first = terms[0]
        rendered = f"-{first}" if first_negative else first
        for negative, text in terms[1:]:
            rendered += f" - {text}" if negative else f" + {text}"
        return rendered


ZERO_POLYNOMIAL = Polynomial()
ONE_POLYNOMIAL = Polynomial((ONE,))
Z = Polynomial((ZERO, ONE))


def _as_polynomial(value):
    if isinstance(value, Polynomial):
        return value
    if isinstance(value, (GaussianRational, Rational)):
        return Polynomial((value,))
    return NotImplemented


def poly_arith(a: Polynomial, b: Polynomial, op: Literal["add", "sub", "mul"]) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise PreconditionError(f"Unknown polynomial operation: {op}")


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_zero and b.is_zero:
        raise PreconditionError("gcd of two zero polynomials is undefined")
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


@dataclass(frozen=True, slots=True)
class PowerSeries:
    coeffs: tuple[GaussianRational, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _scalars(self.coeffs))

    @classmethod
    def of(cls, values: Iterable) -> "PowerSeries":
        return cls(tuple(values))

    @classmethod
    def from_polynomial(cls, polynomial: Polynomial, length: int) -> "PowerSeries":
        return cls(tuple(polynomial.coefficient(k) for k in range(length)))

    @property
    def truncation_len(self) -> int:
        return len(self.coeffs)

    def coefficient(self, k: int) -> GaussianRational:
        if k < 0:
            return ZERO
        if k >= len(self.coeffs):
            raise TruncationError(
                f"coefficient a_{k} requested from a series known to {len(self.coeffs)} terms"
            )
        return self.coeffs[k]

    def require(self, length: int, purpose: str = "") -> None:
        if len(self.coeffs) < length:
            detail = f" for {purpose}" if purpose else ""
            raise TruncationError(
                f"series truncation {len(self.coeffs)} is shorter than the {length} terms needed{detail}"
            )

    def partial_sum(self, degree: int) -> Polynomial:
        if degree < 0:
            return ZERO_POLYNOMIAL
        self.require(degree + 1, f"the partial sum of degree {degree}")
        return Polynomial(self.coeffs[: degree + 1])

    def truncate(self, length: int) -> "PowerSeries":
        self.require(length)
        return PowerSeries(self.coeffs[:length])

    def valuation(self) -> int | None:
        return next((k for k, c in enumerate(self.coeffs) if c), None)

    def with_coefficient(self, k: int, value) -> "PowerSeries":
        self.require(k + 1)
        coeffs = list(self.coeffs)
        coeffs[k] = GaussianRational.of(value)
        return PowerSeries(tuple(coeffs))

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        size = min(len(self.coeffs), len(other.coeffs))
        return PowerSeries(tuple(self.coeffs[k] + other.coeffs[k] for k in range(size)))

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        size = min(len(self.coeffs), len(other.coeffs))
        return PowerSeries(tuple(self.coeffs[k] - other.coeffs[k] for k in range(size)))

    def scale(self, value) -> "PowerSeries":
        value = GaussianRational.of(value)
        return PowerSeries(tuple(c * value for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return self.multiply_polynomial(other)
        if not isinstance(other, PowerSeries):
            return NotImplemented
        size = min(len(self.coeffs), len(other.coeffs))
        product = []
        for k in range(size):
            total = ZERO
            for i in range(k + 1):
                total = total + self.coeffs[i] * other.coeffs[k - i]
            product.append(total)
        return PowerSeries(tuple(product))

    def multiply_polynomial(self, polynomial: Polynomial) -> "PowerSeries":
        product = []
        for k in range(len(self.coeffs)):
            total = ZERO
            for i, c in enumerate(polynomial.coeffs[: k + 1]):
                if c:
                    total = total + c * self.coeffs[k - i]
            product.append(total)
        return PowerSeries(tuple(product))

    def __call__(self, z) -> GaussianRational:
        return Polynomial(self.coeffs)(z)


def series_reciprocal(s: PowerSeries) -> PowerSeries:
    a0 = s.coefficient(0) if s.truncation_len else ZERO
    if not a0:
        raise PreconditionError("reciprocal needs a nonzero constant term")
    inverse = a0.inverse()
    b = [inverse]
    for n in range(1, s.truncation_len):
        total = ZERO
        for i in range(1, n + 1):
            if s.coeffs[i]:
                total = total + s.coeffs[i] * b[n - i]
        b.append(-inverse * total)
    return PowerSeries(tuple(b))


def series_div_poly(s: PowerSeries, q: Polynomial) -> PowerSeries:
    q0 = q.coefficient(0)
    if not q0:
        raise PreconditionError("division needs a polynomial with nonzero constant term")
    inverse = q0.inverse()
    b: list[GaussianRational] = []
    for k in range(s.truncation_len):
        total = s.coeffs[k]
        for i in range(1, min(k, q.degree) + 1):
            c = q.coeffs[i]
            if c:
                total = total - c * b[k - i]
        b.append(total * inverse)
    return PowerSeries(tuple(b))


@dataclass(frozen=True, slots=True)
class RationalFunction:
    numerator: Polynomial
    denominator: Polynomial = ONE_POLYNOMIAL

    def __post_init__(self):
        if self.denominator.is_zero:
            raise PreconditionError("rational function with zero denominator")

    @classmethod
    def of(cls, numerator, denominator=(1,)) -> "RationalFunction":
        return cls(Polynomial(tuple(numerator)), Polynomial(tuple(denominator)))

    def __call__(self, z) -> GaussianRational:
        z = GaussianRational.of(z)
        value = self.denominator(z)
        if not value:
            raise PreconditionError(f"denominator {self.denominator} vanishes at {z}")
        return self.numerator(z) / value

    def reduced(self) -> "RationalFunction":
        common = poly_gcd(self.numerator, self.denominator)
        numerator = self.numerator // common
        denominator = self.denominator // common
        anchor = denominator.coefficient(0) or denominator.leading
        inverse = anchor.inverse()
        return RationalFunction(numerator.scale(inverse), denominator.scale(inverse))

    def same_as(self, other: "RationalFunction") -> bool:
        return self.numerator * other.denominator == other.numerator * self.denominator

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        other = _as_rational(other)
        if self.denominator == other.denominator:
            return RationalFunction(self.numerator + other.numerator, self.denominator)
        return RationalFunction(
            self.numerator * other.denominator + other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        return self + _as_rational(other).scale(-1)

    def scale(self, value) -> "RationalFunction":
        return RationalFunction(self.numerator.scale(value), self.denominator)

    def __str__(self):
        if self.denominator == ONE_POLYNOMIAL:
            return f"({self.numerator})"
        return f"({self.numerator}) / ({self.denominator})"


def _as_rational(value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    raise TypeError(f"Cannot interpret {value!r} as a rational function")
