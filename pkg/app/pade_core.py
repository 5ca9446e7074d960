"""
Padé approximants by two independent routes with full degeneracy
classification.

Both routes return a `PadeResult` whose fraction is irreducible with
denominator(0) = 1. The classification follows the Hankel values:
normal iff C_{m,n} and C_{m+1,n} are both nonzero; when C_{m,n} vanishes the
approximant may still exist, and then the Jacobi pair is the reduced fraction
times a factor T with T(0) = 0.
"""
import logging
from dataclasses import dataclass

from app.exceptions import PreconditionError
from app.linear_algebra import determinant, kernel_vector, solve
from app.models import PadeStatus
from app.polynomials import (
    ONE_POLYNOMIAL,
    ZERO_POLYNOMIAL,
    Polynomial,
    PowerSeries,
    RationalFunction,
    poly_gcd,
    series_reciprocal,
)
from app.scalars import GaussianRational, ONE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PadeResult:
    m: int
    n: int
    status: PadeStatus
    C_mn: GaussianRational
    C_m1n: GaussianRational
    numerator: Polynomial | None = None
    denominator: Polynomial | None = None
    factor: Polynomial | None = None

    @property
    def exists(self) -> bool:
        return self.status != PadeStatus.NOT_EXISTS

    @property
    def is_normal(self) -> bool:
        return self.status == PadeStatus.NORMAL

    def as_rational(self) -> RationalFunction:
        if not self.exists:
            raise PreconditionError(f"[S;{self.m}/{self.n}] does not exist")
        return RationalFunction(self.numerator, self.denominator)


# Hankel values and the Jacobi determinants

def hankel_det(s: PowerSeries, m: int, n: int) -> GaussianRational:
    s.require(m + n, f"C_{{{m},{n}}}")
    if n == 0:
        return ONE
    matrix = [[s.coefficient(m - n + 1 + i + j) for j in range(n)] for i in range(n)]
    return determinant(matrix)


def is_in_D(s: PowerSeries, m: int, n: int) -> bool:
    return bool(hankel_det(s, m, n))


def is_in_N(s: PowerSeries, m: int, n: int) -> bool:
    return bool(hankel_det(s, m, n)) and bool(hankel_det(s, m + 1, n))


def _coefficient_rows(s: PowerSeries, m: int, n: int) -> list[list[GaussianRational]]:
    return [[s.coefficient(m - n + 1 + i + j) for j in range(n + 1)] for i in range(n)]


def jacobi_pair(s: PowerSeries, m: int, n: int) -> tuple[Polynomial, Polynomial]:
    """Expand the Jacobi determinants along their polynomial last row."""
    s.require(m + n + 1, f"the ({m},{n}) Jacobi determinants")
    rows = _coefficient_rows(s, m, n)
    p_hat, q_hat = ZERO_POLYNOMIAL, ZERO_POLYNOMIAL
    for j in range(n + 1):
        cofactor = determinant([row[:j] + row[j + 1:] for row in rows])
        if (n + j) % 2:
            cofactor = -cofactor
        if not cofactor:
            continue
        q_hat = q_hat + Polynomial.monomial(cofactor, n - j)
        p_hat = p_hat + s.partial_sum(m - n + j).shift(n - j).scale(cofactor)
    return p_hat, q_hat


def order_condition_holds(
    s: PowerSeries, numerator: Polynomial, denominator: Polynomial, m: int, n: int
) -> bool:
    length = m + n + 1
    residual = s.truncate(length).multiply_polynomial(denominator)
    return all(residual.coeffs[k] == numerator.coefficient(k) for k in range(length))


def _classify(
    s: PowerSeries,
    m: int,
    n: int,
    numerator: Polynomial,
    denominator: Polynomial,
    C_mn: GaussianRational,
    C_m1n: GaussianRational,
    q_hat: Polynomial | None = None,
    p_hat: Polynomial | None = None,
) -> PadeResult:
    missing = PadeResult(m, n, PadeStatus.NOT_EXISTS, C_mn, C_m1n)
    if denominator.is_zero:
        return missing
    common = poly_gcd(numerator, denominator)
    numerator, denominator = numerator // common, denominator // common
    anchor = denominator.coefficient(0)
    if not anchor:
        logger.debug("reduced (%d,%d) denominator vanishes at 0", m, n)
        return missing
    inverse = anchor.inverse()
    numerator, denominator = numerator.scale(inverse), denominator.scale(inverse)
    if not order_condition_holds(s, numerator, denominator, m, n):
        logger.debug("reduced (%d,%d) fraction misses the order condition", m, n)
        return missing
    if C_mn:
        status = PadeStatus.NORMAL if C_m1n else PadeStatus.EXISTS_NON_NORMAL
        return PadeResult(m, n, status, C_mn, C_m1n, numerator, denominator)
    factor = q_hat.exact_div(denominator) if q_hat is not None and not q_hat.is_zero else ZERO_POLYNOMIAL
    if factor.coefficient(0) or (p_hat is not None and p_hat != factor * numerator):
        raise PreconditionError(f"inconsistent degenerate factor at ({m},{n})")
    return PadeResult(
        m, n, PadeStatus.DEGENERATE_EXISTS, C_mn, C_m1n, numerator, denominator, factor
    )


# Routes

def pade_via_system(s: PowerSeries, m: int, n: int) -> PadeResult:
    s.require(m + n + 1, f"[S;{m}/{n}]")
    C_mn, C_m1n = hankel_det(s, m, n), hankel_det(s, m + 1, n)
    if not C_mn:
        logger.debug("C_{%d,%d} = 0, falling back to the Jacobi route", m, n)
        return pade_via_jacobi(s, m, n)
    denominator = ONE_POLYNOMIAL
    if n:
        matrix = [[s.coefficient(m - n + 1 + i + j) for j in range(n)] for i in range(n)]
        rhs = [-s.coefficient(m + 1 + i) for i in range(n)]
        solution = solve(matrix, rhs)
        denominator = Polynomial((ONE,) + tuple(solution[n - k] for k in range(1, n + 1)))
    numerator = Polynomial(s.truncate(m + 1).multiply_polynomial(denominator).coeffs)
    return _classify(s, m, n, numerator, denominator, C_mn, C_m1n)


def pade_via_jacobi(s: PowerSeries, m: int, n: int) -> PadeResult:
    s.require(m + n + 1, f"[S;{m}/{n}]")
    C_mn, C_m1n = hankel_det(s, m, n), hankel_det(s, m + 1, n)
    p_hat, q_hat = jacobi_pair(s, m, n)
    if not q_hat.is_zero:
        return _classify(s, m, n, p_hat, q_hat, C_mn, C_m1n, q_hat, p_hat)
    # Every nonzero solution of the linearized condition gives the same fraction
    logger.debug("Jacobi denominator vanishes at (%d,%d), using a kernel vector", m, n)
    rows = [[s.coefficient(k - i) for i in range(n + 1)] for k in range(m + 1, m + n + 1)]
    denominator = Polynomial(tuple(kernel_vector(rows, n + 1)))
    numerator = Polynomial(s.truncate(m + 1).multiply_polynomial(denominator).coeffs)
    return _classify(s, m, n, numerator, denominator, C_mn, C_m1n, q_hat, p_hat)


def pade(s: PowerSeries, m: int, n: int, route: str = "jacobi") -> PadeResult:
    if route == "system":
        return pade_via_system(s, m, n)
    return pade_via_jacobi(s, m, n)


def pade_table(s: PowerSeries, max_m: int, max_n: int) -> dict[tuple[int, int], PadeResult]:
    """Every cell (m, n) of the table that the truncation can decide."""
    table = {}
    for m in range(max_m + 1):
        for n in range(max_n + 1):
            if m + n + 1 <= s.truncation_len:
                table[m, n] = pade_via_jacobi(s, m, n)
    return table


# Duality

def reciprocal_duality_check(s: PowerSeries, m: int, n: int) -> bool:
    s.require(m + n + 1, f"[S;{m}/{n}]")
    if not s.coefficient(0):
        raise PreconditionError("duality needs a nonzero constant term")
    direct = pade_via_jacobi(s, m, n)
    if not direct.exists:
        raise PreconditionError(f"[S;{m}/{n}] does not exist")
    reciprocal = series_reciprocal(s)
    same_membership = is_in_D(s, m, n) == is_in_D(reciprocal, n, m)
    dual = pade_via_jacobi(reciprocal, n, m)
    if not dual.exists:
        return False
    inverse = direct.numerator.coefficient(0).inverse()
    return (
        same_membership
        and dual.numerator == direct.denominator.scale(inverse)
        and dual.denominator == direct.numerator.scale(inverse)
    )
