"""
Exact complex scalars.

A `GaussianRational` is a pair of `Fraction`s. `Fraction` keeps both parts
canonical (coprime, positive denominator), so equality and hashing are exact.
The text form is ``a/b+c/d*i`` with the imaginary part omitted when zero.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from numbers import Rational


@dataclass(frozen=True, slots=True)
class GaussianRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if type(self.re) is not Fraction:
            object.__setattr__(self, "re", Fraction(self.re))
        if type(self.im) is not Fraction:
            object.__setattr__(self, "im", Fraction(self.im))

    # Construction

    @classmethod
    def of(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return parse_scalar(value)
        if isinstance(value, (int, Rational)):
            return cls(Fraction(value))
        raise TypeError(f"Cannot interpret {value!r} as an exact scalar")

    # Arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other:
            raise ZeroDivisionError("division by zero Gaussian rational")
        if not other.im:
            return GaussianRational(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** -exponent
        result = ONE
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "GaussianRational":
        norm = self.abs2()
        if not norm:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / norm, -self.im / norm)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return not self.im

    # Comparison

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    # Conversion

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        return f"GaussianRational('{format_scalar(self)}')"


ZERO = GaussianRational(Fraction(0))
ONE = GaussianRational(Fraction(1))


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Rational)):
        return GaussianRational(Fraction(value))
    return NotImplemented


# Text codec

def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value: GaussianRational) -> str:
    if not value.im:
        return _format_fraction(value.re)
    imaginary = f"{_format_fraction(abs(value.im))}*i"
    if not value.re:
        return imaginary if value.im > 0 else f"-{imaginary}"
    sign = "+" if value.im > 0 else "-"
    return f"{_format_fraction(value.re)}{sign}{imaginary}"


def _split_imaginary(body: str) -> tuple[str, str]:
    for index in range(len(body) - 1, 0, -1):
        if body[index] in "+-" and body[index - 1] not in "eE":
            return body[:index], body[index:]
    return "0", body


def parse_scalar(text: str) -> GaussianRational:
    body = "".join(str(text).split())
    if not body:
        raise ValueError("empty scalar literal")
    try:
        if body.endswith("*i") or body.endswith("i"):
            body = body[:-2] if body.endswith("*i") else body[:-1]
            real, imaginary = _split_imaginary(body)
            if imaginary in ("", "+", "-"):
                imaginary += "1"
            return GaussianRational(Fraction(real), Fraction(imaginary))
        return GaussianRational(Fraction(body))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"invalid exact scalar literal {text!r}") from exc


# Square-root bounds

def sqrt_bounds(value: Fraction, bits: int = 40) -> tuple[Fraction, Fraction]:
    """Rational bounds lower <= sqrt(value) <= upper with upper - lower <= 2**-bits."""
    if value < 0:
        raise ValueError("square root of a negative rational")
    root_num, root_den = isqrt(value.numerator), isqrt(value.denominator)
    if root_num * root_num == value.numerator and root_den * root_den == value.denominator:
        exact = Fraction(root_num, root_den)
        return exact, exact
    scale = 1 << bits
    floor_scaled = (value.numerator * scale * scale) // value.denominator
    root = isqrt(floor_scaled)
    return Fraction(root, scale), Fraction(root + 1, scale)


def modulus_upper(value: GaussianRational, bits: int = 40) -> Fraction:
    return sqrt_bounds(value.abs2(), bits)[1]


def modulus_lower(value: GaussianRational, bits: int = 40) -> Fraction:
    return sqrt_bounds(value.abs2(), bits)[0]
