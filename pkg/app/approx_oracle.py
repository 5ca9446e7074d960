"""
Constrained polynomial approximation on sample clouds.

The oracle looks for P = z^p * Q that is close to a rational target on the
samples of a compact set K, small on the samples of a disk L, and avoids
prescribed values at given points. Q is the exact least-squares fit over the
union of both clouds; its degree climbs a ladder until the sampled errors meet
half the tolerance. All norms are sampled maxima bounded from above by exact
rationals.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from app.exceptions import EscalationError, PreconditionError, VerificationError
from app.linear_algebra import solve_fraction_free
from app.polynomials import Polynomial, RationalFunction
from app.scalars import GaussianRational, ZERO, modulus_upper, sqrt_bounds
from app.utils import get_escalation_cap, get_norm_slack_bits

logger = logging.getLogger(__name__)

PERTURBATION_SHIFT = 10


def _points(values: Iterable) -> tuple[GaussianRational, ...]:
    return tuple(GaussianRational.of(value) for value in values)


@dataclass(frozen=True)
class CompactSetSpec:
    samples: tuple[GaussianRational, ...]
    margin: Fraction
    excluded: tuple[GaussianRational, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", _points(self.samples))
        object.__setattr__(self, "excluded", _points(self.excluded))
        object.__setattr__(self, "margin", Fraction(self.margin))
        if not self.samples:
            raise PreconditionError("a compact sample set needs at least one sample")
        if self.margin <= 0:
            raise PreconditionError("the declared margin must be positive")
        for z in self.samples:
            if z.abs2() < 1:
                raise PreconditionError(f"sample {z} lies inside the open unit disk")
            for w in self.excluded:
                if (z - w).abs2() < self.margin * self.margin:
                    raise PreconditionError(f"sample {z} is closer than {self.margin} to the excluded point {w}")

    def excluding(self, points: Sequence) -> "CompactSetSpec":
        return CompactSetSpec(self.samples, self.margin, self.excluded + _points(points))


@dataclass(frozen=True)
class DiskSampleSpec:
    samples: tuple[GaussianRational, ...]
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "samples", _points(self.samples))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if not 0 <= self.radius < 1:
            raise PreconditionError("the disk radius must lie in [0, 1)")
        for z in self.samples:
            if z.abs2() > self.radius * self.radius:
                raise PreconditionError(f"disk sample {z} lies outside radius {self.radius}")


@dataclass(frozen=True)
class PointConstraint:
    point: GaussianRational
    forbidden: tuple[GaussianRational, ...]

    def holds(self, polynomial: Polynomial) -> bool:
        return polynomial(self.point) not in self.forbidden


@dataclass(frozen=True)
class ApproxTask:
    target: RationalFunction
    K: CompactSetSpec
    L: DiskSampleSpec
    epsilon: Fraction
    valuation_floor: int
    point_constraints: tuple[PointConstraint, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise PreconditionError("the tolerance must be positive")
        if self.valuation_floor < 1:
            raise PreconditionError("the valuation floor must be at least 1")
        for z in self.K.samples:
            if not self.target.denominator(z):
                raise PreconditionError(f"target denominator vanishes at sample {z}")


@dataclass(frozen=True)
class OracleResult:
    polynomial: Polynomial
    degree: int
    error_K: Fraction
    error_L: Fraction
    perturbation: Fraction = field(default=Fraction(0))


# Sampled norms and distances

def sup_norm_on_samples(
    f: RationalFunction | Polynomial, pts: Iterable, slack_bits: int | None = None
) -> Fraction:
    bits = get_norm_slack_bits() if slack_bits is None else slack_bits
    bound = Fraction(0)
    for z in _points(pts):
        value = f(z)
        bound = max(bound, sqrt_bounds(value.abs2(), bits)[1])
    return bound


def distance_lower_bound(points: Iterable, excluded: Iterable, slack_bits: int | None = None) -> Fraction:
    bits = get_norm_slack_bits() if slack_bits is None else slack_bits
    points, excluded = _points(points), _points(excluded)
    if not points or not excluded:
        raise PreconditionError("distance between empty point sets")
    return min(sqrt_bounds((z - w).abs2(), bits)[0] for z in points for w in excluded)


def min_modulus_lower_bound(f: Polynomial, pts: Iterable, slack_bits: int | None = None) -> Fraction:
    bits = get_norm_slack_bits() if slack_bits is None else slack_bits
    return min(sqrt_bounds(f(z).abs2(), bits)[0] for z in _points(pts))


def perturbation_coefficient(epsilon: Fraction, pts: Iterable, exponent: int) -> Fraction:
    """epsilon / 2**10 shrunk so that |c z^exponent| stays below it on every sample."""
    growth = Fraction(1)
    for z in _points(pts):
        growth = max(growth, modulus_upper(z) ** exponent)
    return Fraction(epsilon) / (1 << PERTURBATION_SHIFT) / growth


# Least squares

def _degree_ladder(top: int) -> list[int]:
    ladder, degree = [], 0
    while degree < top:
        ladder.append(degree)
        degree = 1 if degree == 0 else degree * 2
    if top >= 0:
        ladder.append(top)
    return ladder


def _least_squares(
    points: Sequence[GaussianRational],
    values: Sequence[GaussianRational],
    valuation: int,
    degree: int,
) -> list[GaussianRational]:
    size = degree + 1
    gram = [[ZERO] * size for _ in range(size)]
    rhs = [ZERO] * size
    for z, value in zip(points, values):
        basis = [z ** valuation]
        for _ in range(degree):
            basis.append(basis[-1] * z)
        conjugates = [b.conjugate() for b in basis]
        for k in range(size):
            if value:
                rhs[k] = rhs[k] + conjugates[k] * value
            for l in range(k, size):
                gram[k][l] = gram[k][l] + conjugates[k] * basis[l]
    for k in range(size):
        for l in range(k):
            gram[k][l] = gram[l][k].conjugate()
    return solve_fraction_free(gram, rhs)


def _fit_points(task: ApproxTask) -> tuple[list[GaussianRational], list[GaussianRational]]:
    points, values, seen = [], [], set()
    for z in task.K.samples:
        if z not in seen:
            seen.add(z)
            points.append(z)
            values.append(task.target(z))
    for z in task.L.samples:
        if z and z not in seen:
            seen.add(z)
            points.append(z)
            values.append(ZERO)
    return points, values


def _errors(task: ApproxTask, polynomial: Polynomial, bits: int) -> tuple[Fraction, Fraction]:
    residual = RationalFunction(
        polynomial * task.target.denominator - task.target.numerator, task.target.denominator
    )
    return (
        sup_norm_on_samples(residual, task.K.samples, bits),
        sup_norm_on_samples(polynomial, task.L.samples, bits),
    )


def _enforce_constraints(
    task: ApproxTask, polynomial: Polynomial, exponent: int
) -> tuple[Polynomial, Fraction]:
    if all(constraint.holds(polynomial) for constraint in task.point_constraints):
        return polynomial, Fraction(0)
    samples = task.K.samples + task.L.samples
    c = perturbation_coefficient(task.epsilon, samples, exponent)
    for _ in range(64):
        candidate = polynomial + Polynomial.monomial(c, exponent)
        if all(constraint.holds(candidate) for constraint in task.point_constraints):
            return candidate, c
        c /= 2
    raise PreconditionError("point constraints could not be met by a monomial perturbation")


def approximate(task: ApproxTask, cap: int | None = None, slack_bits: int | None = None) -> OracleResult:
    cap = get_escalation_cap() if cap is None else cap
    bits = get_norm_slack_bits() if slack_bits is None else slack_bits
    points, values = _fit_points(task)
    half = task.epsilon / 2
    fit, reached = None, None
    for degree in _degree_ladder(min(cap, len(points) - 1)):
        coefficients = _least_squares(points, values, task.valuation_floor, degree)
        candidate = Polynomial(tuple(coefficients)).shift(task.valuation_floor)
        error_K, error_L = _errors(task, candidate, bits)
        logger.debug(
            "degree %d: sampled errors K=%.3e L=%.3e (target %.3e)",
            degree, error_K, error_L, half,
        )
        reached = degree
        if error_K <= half and error_L <= half:
            fit = candidate
            break
    if fit is None:
        raise EscalationError(
            f"tolerance {float(task.epsilon):.3e} unreachable with deg Q <= {reached} "
            f"(cap {cap}, {len(points)} distinct samples)"
        )
    polynomial, perturbation = _enforce_constraints(task, fit, task.valuation_floor + reached + 1)
    error_K, error_L = _errors(task, polynomial, bits)
    if error_K > task.epsilon or error_L > task.epsilon:
        raise VerificationError("approximation exceeds its tolerance after constraint enforcement")
    if not polynomial.is_zero and polynomial.valuation < task.valuation_floor:
        raise VerificationError("approximation violates its valuation floor")
    if not all(constraint.holds(polynomial) for constraint in task.point_constraints):
        raise VerificationError("approximation violates a point constraint")
    return OracleResult(polynomial, reached, error_K, error_L, perturbation)


def approx_with_valuation(task: ApproxTask, cap: int | None = None) -> Polynomial:
    return approximate(task, cap).polynomial
