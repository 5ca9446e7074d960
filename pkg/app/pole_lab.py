"""
Series whose Padé approximants have prescribed poles or zeros.

A placement witness is f = P + c1 z^(m-1+n) + c2 z^(m+n) with deg P = m-1.
The coefficient c2 enters the Jacobi determinants through a single matrix
entry, so both determinants are affine in c2; solving the affine relation at
the target puts an exact pole (or zero) of [f; m/n] there.

Numeric roots are reporting artifacts only; every correctness claim is made on
exact evaluation.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from functools import cmp_to_key
from typing import Iterable, Literal, Sequence

from mpmath import mp, mpc, mpf

from app.exceptions import (
    GuardBandError,
    PreconditionError,
    RetryableError,
    RootFindingError,
    VerificationError,
)
from app.models import PoleRow
from app.pade_core import jacobi_pair, pade_via_jacobi
from app.polynomials import Polynomial, PowerSeries, series_div_poly, series_reciprocal
from app.scalars import GaussianRational, ONE, ZERO
from app.utils import get_guard_band, get_root_precision

logger = logging.getLogger(__name__)

MAX_ITERATIONS = 2000


@dataclass(frozen=True)
class PolePlacementWitness:
    base: Polynomial
    m: int
    n: int
    c1: GaussianRational
    c2: GaussianRational
    witness: PowerSeries
    target: GaussianRational
    kind: Literal["pole", "zero"] = "pole"


@dataclass(frozen=True)
class Pencil:
    """Polynomial-valued affine map c2 -> constant + c2 * slope."""
    constant: Polynomial
    slope: Polynomial

    def at(self, c2: GaussianRational) -> Polynomial:
        return self.constant + self.slope.scale(c2)

    def root_parameter(self, z: GaussianRational) -> GaussianRational:
        slope = self.slope(z)
        if not slope:
            raise PreconditionError(f"the relation does not depend on c2 at {z}")
        return -self.constant(z) / slope


# Placement

def anti_diagonal_sign(n: int) -> int:
    return -1 if ((n - 1) * (n - 2) // 2) % 2 else 1


def assemble_witness(P: Polynomial, m: int, n: int, c1, c2) -> PowerSeries:
    coeffs = [P.coefficient(k) for k in range(m + n + 1)]
    coeffs[m - 1 + n] = GaussianRational.of(c1)
    coeffs[m + n] = GaussianRational.of(c2)
    return PowerSeries(tuple(coeffs))


def jacobi_pencils(P: Polynomial, m: int, n: int, c1) -> tuple[Pencil, Pencil]:
    """(numerator, denominator) Jacobi determinants of the witness as affine maps of c2."""
    p0, q0 = jacobi_pair(assemble_witness(P, m, n, c1, ZERO), m, n)
    p1, q1 = jacobi_pair(assemble_witness(P, m, n, c1, ONE), m, n)
    return Pencil(p0, p1 - p0), Pencil(q0, q1 - q0)


def denominator_relation(P: Polynomial, m: int, n: int, c1) -> tuple[Polynomial, Polynomial]:
    """(A, B) with Q_hat = A + c2 * B."""
    _, denominator = jacobi_pencils(P, m, n, c1)
    return denominator.constant, denominator.slope


def auxiliary_polynomial(P: Polynomial, m: int, n: int, c1) -> Polynomial:
    """P_{n-2} in  sign * Q_hat = -c1^2 P_{n-2}(z) z^2 - c2 a^{n-1} z + c1 a^{n-1}."""
    c1 = GaussianRational.of(c1)
    _, denominator = jacobi_pencils(P, m, n, c1)
    power = P.leading ** (n - 1)
    rest = denominator.constant.scale(anti_diagonal_sign(n)) - Polynomial.constant(c1 * power)
    if rest.coefficient(0) or rest.coefficient(1):
        raise VerificationError("denominator relation is not divisible by z^2")
    return Polynomial(rest.coeffs[2:]).scale(-(c1 * c1).inverse())


def pade_den_expression(P: Polynomial, m: int, n: int, c1, c2) -> Polynomial:
    c1, c2 = GaussianRational.of(c1), GaussianRational.of(c2)
    power = P.leading ** (n - 1)
    expression = (
        auxiliary_polynomial(P, m, n, c1).shift(2).scale(-c1 * c1)
        + Polynomial.monomial(-c2 * power, 1)
        + Polynomial.constant(c1 * power)
    )
    return expression.scale(anti_diagonal_sign(n))


def _validate_placement(P: Polynomial, m: int, n: int, target, c1) -> tuple[GaussianRational, GaussianRational]:
    target, c1 = GaussianRational.of(target), GaussianRational.of(c1)
    if m < 1 or n < 1:
        raise PreconditionError("placement needs m >= 1 and n >= 1")
    if P.degree != m - 1:
        raise PreconditionError(f"base polynomial must have degree m-1 = {m - 1}")
    if not target:
        raise PreconditionError("the target must be nonzero")
    if not c1:
        raise PreconditionError("c1 must be nonzero")
    return target, c1


def _place(P: Polynomial, m: int, n: int, target, c1, kind: Literal["pole", "zero"]) -> PolePlacementWitness:
    target, c1 = _validate_placement(P, m, n, target, c1)
    if kind == "zero" and not P(target):
        raise PreconditionError(f"P vanishes at the target {target}")
    numerator, denominator = jacobi_pencils(P, m, n, c1)
    pencil = denominator if kind == "pole" else numerator
    c2 = pencil.root_parameter(target)
    if not c2:
        raise RetryableError(f"derived c2 = 0 for c1 = {c1}; choose a different c1")
    witness = assemble_witness(P, m, n, c1, c2)
    result = pade_via_jacobi(witness, m, n)
    placed = result.denominator if kind == "pole" else result.numerator
    if not result.is_normal or placed(target):
        raise VerificationError(f"[f;{m}/{n}] does not carry the placed {kind} at {target}")
    logger.info("placed %s at %s with c1=%s c2=%s", kind, target, c1, c2)
    return PolePlacementWitness(P, m, n, c1, c2, witness, target, kind)


def place_pole(P: Polynomial, m: int, n: int, target, c1) -> PolePlacementWitness:
    return _place(P, m, n, target, c1, "pole")


def place_zero(P: Polynomial, m: int, n: int, target, c1) -> PolePlacementWitness:
    return _place(P, m, n, target, c1, "zero")


def reciprocal_pole_witness(P: Polynomial, m: int, n: int, target, c1) -> PowerSeries:
    """1/f for a zero-placement witness f; its (n, m) approximant has a pole at target."""
    placed = place_zero(P, m, n, target, c1)
    if not placed.witness.coefficient(0):
        raise PreconditionError("the reciprocal route needs P(0) != 0")
    reciprocal = series_reciprocal(placed.witness)
    result = pade_via_jacobi(reciprocal, n, m)
    if not result.exists or result.denominator(placed.target):
        raise VerificationError(f"[1/f;{n}/{m}] has no pole at {placed.target}")
    return reciprocal


def poles_outside_disk_witness(P: Polynomial, m: int, n: int, mu, trunc: int) -> PowerSeries:
    mu = GaussianRational.of(mu)
    if P.degree is not None and P.degree > m:
        raise PreconditionError(f"deg P exceeds m = {m}")
    if mu.abs2() <= 1:
        raise PreconditionError("mu must lie outside the closed unit disk")
    if not P(mu):
        raise PreconditionError(f"P vanishes at mu = {mu}")
    if trunc < m + n + 1:
        raise PreconditionError(f"truncation {trunc} is shorter than m+n+1 = {m + n + 1}")
    denominator = Polynomial((ONE, -mu.inverse())) ** n
    witness = series_div_poly(PowerSeries.from_polynomial(P, trunc), denominator)
    result = pade_via_jacobi(witness, m, n)
    if not result.exists or result.numerator != P or result.denominator != denominator:
        raise VerificationError(f"[f;{m}/{n}] does not reproduce P/(1-z/mu)^{n}")
    return witness


# Numeric roots

@dataclass(frozen=True)
class RootEstimate:
    root: complex
    residual: float


def _to_mpc(value: GaussianRational) -> mpc:
    return mpc(
        mpf(value.re.numerator) / value.re.denominator,
        mpf(value.im.numerator) / value.im.denominator,
    )


def _value_and_derivative(coeffs: Sequence[mpc], z: mpc) -> tuple[mpc, mpc]:
    value, derivative = coeffs[-1], mpc(0)
    for c in reversed(coeffs[:-1]):
        derivative = derivative * z + value
        value = value * z + c
    return value, derivative


def _aberth(coeffs: list[mpc], bits: int) -> list[mpc]:
    degree = len(coeffs) - 1
    monic = [c / coeffs[-1] for c in coeffs]
    radius = 1 + max(abs(c) for c in monic[:-1])
    roots = [radius * mp.expj(2 * mp.pi * k / degree + mpf("0.4")) for k in range(degree)]
    tolerance = mpf(2) ** (-(bits // 2))
    for iteration in range(MAX_ITERATIONS):
        largest = mpf(0)
        for k in range(degree):
            value, derivative = _value_and_derivative(monic, roots[k])
            if value == 0:
                continue
            repulsion = sum((1 / (roots[k] - roots[j]) for j in range(degree) if j != k), mpc(0))
            denominator = derivative - value * repulsion
            if denominator == 0:
                roots[k] *= 1 + tolerance
                largest = max(largest, tolerance)
                continue
            step = value / denominator
            roots[k] -= step
            largest = max(largest, abs(step) / max(1, abs(roots[k])))
        if largest <= tolerance:
            logger.debug("Aberth converged after %d sweeps", iteration + 1)
            return roots
    raise RootFindingError(f"Aberth iteration did not converge in {MAX_ITERATIONS} sweeps at {bits} bits")


def poly_roots_numeric(q: Polynomial, precision: int | None = None, alpha: float | None = None) -> list[RootEstimate]:
    if q.is_zero:
        raise PreconditionError("roots of the zero polynomial")
    bits = get_root_precision() if precision is None else precision
    if q.degree == 0:
        return []
    with mp.workprec(bits):
        coeffs = [_to_mpc(c) for c in q.coeffs]
        roots = _aberth(coeffs, bits)
        estimates = []
        for root in roots:
            value, _ = _value_and_derivative(coeffs, root)
            estimates.append(RootEstimate(complex(root), float(abs(value))))
    if alpha is None:
        alpha = default_alpha(estimate.root for estimate in estimates)
    return order_roots_polar(estimates, alpha)


def _as_complex(root) -> complex:
    return root.root if isinstance(root, RootEstimate) else complex(root)


def default_alpha(roots: Iterable) -> float:
    arguments = [cmath.phase(z) for z in map(_as_complex, roots) if z]
    for k in range(64):
        alpha = (0.5 + 0.7 * k) % (2 * math.pi)
        if all(_angular_gap(theta, alpha) > 1e-3 for theta in arguments):
            return alpha
    return 0.5


def _angular_gap(theta: float, alpha: float) -> float:
    offset = (theta - alpha) % (2 * math.pi)
    return min(offset, 2 * math.pi - offset)


def order_roots_polar(roots: Sequence, alpha: float, guard: float | None = None, modulus_tolerance: float = 1e-12) -> list:
    """Sort by modulus, then by argument shifted into [alpha, alpha + 2pi)."""
    guard = get_guard_band() if guard is None else guard
    keys = []
    for root in roots:
        z = _as_complex(root)
        if not z:
            keys.append((0.0, alpha))
            continue
        theta = cmath.phase(z)
        if _angular_gap(theta, alpha) <= guard:
            raise GuardBandError(f"alpha = {alpha} is within {guard} of the argument of {z}")
        keys.append((abs(z), alpha + (theta - alpha) % (2 * math.pi)))

    def compare(left, right):
        (left_modulus, left_angle), (right_modulus, right_angle) = left[0], right[0]
        if abs(left_modulus - right_modulus) > modulus_tolerance * max(1.0, left_modulus, right_modulus):
            return -1 if left_modulus < right_modulus else 1
        if left_angle == right_angle:
            return 0
        return -1 if left_angle < right_angle else 1

    ordered = sorted(zip(keys, roots), key=cmp_to_key(compare))
    return [root for _, root in ordered]


def pole_scan(s: PowerSeries, degrees: Iterable[tuple[int, int]], precision: int | None = None) -> list[PoleRow]:
    rows = []
    for m, n in degrees:
        result = pade_via_jacobi(s, m, n)
        if not result.exists or not result.denominator.degree:
            continue
        for index, estimate in enumerate(poly_roots_numeric(result.denominator, precision)):
            rows.append(PoleRow(
                m=m,
                n=n,
                pole_index=index,
                re=f"{estimate.root.real:.17g}",
                im=f"{estimate.root.imag:.17g}",
                residual=f"{estimate.residual:.3e}",
            ))
    return rows
