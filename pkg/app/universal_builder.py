"""
Finite-truncation builds of series whose row Padé approximants have a
prescribed denominator Q.

The build keeps a polynomial f_j, starting from f_0 = Q*T. Each step asks the
approximation oracle for an increment whose valuation clears the current
checkpoint window, so that [f; p/q] = f_j/Q stays frozen once f_j is fixed.
The finished series is f = f_tilde/Q expanded far enough to decide every
checkpoint.
"""
import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from app.approx_oracle import (
    ApproxTask,
    CompactSetSpec,
    DiskSampleSpec,
    PointConstraint,
    approximate,
    distance_lower_bound,
    min_modulus_lower_bound,
    sup_norm_on_samples,
)
from app.exceptions import (
    EscalationError,
    GuardBandError,
    PreconditionError,
    ScheduleError,
    TruncationError,
    VerificationError,
)
from app.models import BuildCertificateRow
from app.pade_core import PadeResult, pade_via_jacobi
from app.polynomials import (
    ONE_POLYNOMIAL,
    Polynomial,
    PowerSeries,
    RationalFunction,
    series_div_poly,
)
from app.pole_lab import order_roots_polar, poly_roots_numeric
from app.scalars import GaussianRational, ONE, ZERO, format_scalar
from app.utils import stable_hash

logger = logging.getLogger(__name__)

# Numeric roots count as certified only below this residual
RESIDUAL_BOUND = 1e-9


def polynomial_key(polynomial: Polynomial) -> str:
    return ",".join(format_scalar(c) for c in polynomial.coeffs)


def denominator_hash(polynomial: Polynomial) -> str:
    return stable_hash(polynomial_key(polynomial))


@dataclass(frozen=True)
class DenominatorSpec:
    Q: Polynomial
    roots: tuple[GaussianRational, ...]

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(GaussianRational.of(w) for w in self.roots))
        if self.Q != self.product(self.roots):
            raise PreconditionError("Q must equal the product of (1 - z/w) over its roots")

    @property
    def q(self) -> int:
        return len(self.roots)

    @staticmethod
    def product(roots: Iterable[GaussianRational]) -> Polynomial:
        Q = ONE_POLYNOMIAL
        for w in roots:
            if w.abs2() < 1:
                raise PreconditionError(f"root {w} lies inside the open unit disk")
            Q = Q * Polynomial((ONE, -w.inverse()))
        return Q

    @classmethod
    def from_roots(cls, roots: Iterable) -> "DenominatorSpec":
        roots = tuple(GaussianRational.of(w) for w in roots)
        if not roots:
            raise PreconditionError("a prescribed denominator needs at least one root")
        return cls(cls.product(roots), roots)


@dataclass(frozen=True)
class UniversalTask:
    target: RationalFunction
    K: CompactSetSpec
    epsilon: Fraction

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise PreconditionError("task tolerance must be positive")
        for z in self.K.samples:
            if not self.target.denominator(z):
                raise PreconditionError(f"target is not analytic at sample {z}")


@dataclass(frozen=True)
class BuildStep:
    j: int
    task: int
    increment: Polynomial
    valuation_floor: int
    checkpoint: int
    epsilon: Fraction
    degree: int
    perturbation: Fraction = Fraction(0)


@dataclass(frozen=True)
class TaskCertificate:
    task: int
    step: int
    p: int
    error_K: Fraction
    error_L: Fraction
    denominator: Polynomial
    C_pq: GaussianRational
    C_p1q: GaussianRational
    epsilon: Fraction

    def row(self) -> BuildCertificateRow:
        return BuildCertificateRow(
            task=self.task,
            step=self.step,
            p=self.p,
            sampled_error_K=f"{float(self.error_K):.12e}",
            sampled_error_L=f"{float(self.error_L):.12e}",
            denominator_hash=denominator_hash(self.denominator),
        )


@dataclass(frozen=True)
class CheckpointCertificate:
    j: int
    p: int
    C_pq: GaussianRational
    C_p1q: GaussianRational
    approximant: RationalFunction


@dataclass(frozen=True)
class BuildTrace:
    mu: tuple[int, ...]
    roots: tuple[GaussianRational, ...]
    base: Polynomial
    epsilon0: Fraction
    steps: tuple[BuildStep, ...]
    f_tilde: Polynomial
    f: PowerSeries
    certificates: tuple[TaskCertificate, ...] = field(default=())

    @property
    def spec(self) -> DenominatorSpec:
        return DenominatorSpec.from_roots(self.roots)

    def partial(self, j: int) -> Polynomial:
        """f_j = Q*T + the first j increments."""
        if not 0 <= j <= len(self.steps):
            raise PreconditionError(f"trace has no partial f_{j}")
        result = self.spec.Q * self.base
        for step in self.steps[:j]:
            result = result + step.increment
        return result

    def as_rational(self) -> RationalFunction:
        return RationalFunction(self.f_tilde, self.spec.Q)


# Scheduling

def round_robin_schedule(task_count: int, rounds: int) -> list[int]:
    """Task index visited at each step; every task comes back once per round."""
    if task_count <= 0:
        return []
    return [k % task_count for k in range(task_count * rounds)]


def checkpoint_degree(mu: Sequence[int], degree: int | None, floor: int = 0) -> int:
    """Least element of mu that is >= deg and >= floor."""
    least = max(degree or 0, floor)
    for p in mu:
        if p >= least:
            return p
    raise ScheduleError(f"mu is exhausted: no element >= {least}")


def checkpoint_degrees(trace: BuildTrace) -> list[int]:
    degrees, floor = [], 0
    for j in range(len(trace.steps) + 1):
        p = checkpoint_degree(trace.mu, trace.partial(j).degree, floor)
        degrees.append(p)
        floor = p + len(trace.roots) + 1
    return degrees


def step_tolerance(
    epsilon0: Fraction, j: int, spec: DenominatorSpec, K: CompactSetSpec, L: DiskSampleSpec
) -> Fraction:
    factor = min(
        Fraction(1),
        distance_lower_bound(spec.roots, K.samples),
        distance_lower_bound(spec.roots, L.samples),
        min_modulus_lower_bound(spec.Q, L.samples),
    )
    return Fraction(epsilon0) / (1 << (j + 1)) * factor


def task_tolerance(task: UniversalTask, spec: DenominatorSpec) -> Fraction:
    """Increment error on K that keeps |f_j/Q - h| within half the task's epsilon."""
    return task.epsilon * min_modulus_lower_bound(spec.Q, task.K.samples) / 2


# Build

def build_universal(
    spec: DenominatorSpec,
    tasks: Sequence[UniversalTask],
    mu: Sequence[int],
    T: Polynomial,
    L: DiskSampleSpec,
    epsilon0,
    rounds: int,
    cap: int | None = None,
) -> BuildTrace:
    epsilon0 = Fraction(epsilon0)
    if not 0 < epsilon0 < 1:
        raise PreconditionError("epsilon0 must lie in (0, 1)")
    if not L.samples:
        raise PreconditionError("the disk needs at least one sample")
    tasks = [replace(task, K=task.K.excluding(spec.roots)) for task in tasks]
    mu = tuple(mu)
    f_j = spec.Q * T
    steps, floor = [], 0
    for j, t in enumerate(round_robin_schedule(len(tasks), rounds)):
        task = tasks[t]
        p = checkpoint_degree(mu, f_j.degree, floor)
        floor = p + spec.q + 1
        epsilon = min(step_tolerance(epsilon0, j, spec, task.K, L), task_tolerance(task, spec))
        h = task.target
        oracle_task = ApproxTask(
            target=RationalFunction(spec.Q * h.numerator - f_j * h.denominator, h.denominator),
            K=task.K,
            L=L,
            epsilon=epsilon,
            valuation_floor=floor,
            point_constraints=tuple(PointConstraint(w, (ZERO, -f_j(w))) for w in spec.roots),
        )
        try:
            result = approximate(oracle_task, cap)
        except EscalationError as error:
            raise EscalationError(f"step {j}, task {t}: {error.detail}", step=j, task=t) from error
        logger.info(
            "step %d task %d: p=%d valuation>=%d deg Q=%d error K=%.3e L=%.3e",
            j, t, p, floor, result.degree, result.error_K, result.error_L,
        )
        steps.append(BuildStep(j, t, result.polynomial, floor, p, epsilon, result.degree, result.perturbation))
        f_j = f_j + result.polynomial
    last = checkpoint_degree(mu, f_j.degree, floor)
    length = max(f_j.degree or 0, last) + spec.q + 2
    f = series_div_poly(PowerSeries.from_polynomial(f_j, length), spec.Q)
    trace = BuildTrace(mu, spec.roots, T, epsilon0, tuple(steps), f_j, f)
    return replace(trace, certificates=tuple(_certify(trace, spec, tasks, L)))


def _certify(
    trace: BuildTrace, spec: DenominatorSpec, tasks: Sequence[UniversalTask], L: DiskSampleSpec
) -> list[TaskCertificate]:
    certificates = []
    limit = trace.as_rational()
    for step in trace.steps:
        checkpoint = verify_checkpoint(trace, spec, step.j + 1)
        task = tasks[step.task]
        error_K = sup_norm_on_samples(checkpoint.approximant - task.target, task.K.samples)
        if error_K > task.epsilon:
            raise VerificationError(
                f"checkpoint {step.j + 1}: task {step.task} error {float(error_K):.3e} "
                f"exceeds its tolerance {float(task.epsilon):.3e}"
            )
        certificates.append(TaskCertificate(
            task=step.task,
            step=step.j + 1,
            p=checkpoint.p,
            error_K=error_K,
            error_L=sup_norm_on_samples(checkpoint.approximant - limit, L.samples),
            denominator=checkpoint.approximant.denominator,
            C_pq=checkpoint.C_pq,
            C_p1q=checkpoint.C_p1q,
            epsilon=task.epsilon,
        ))
    return certificates


# Verification

def verify_checkpoint(trace: BuildTrace, spec: DenominatorSpec, j: int) -> CheckpointCertificate:
    if not 1 <= j <= len(trace.steps):
        raise PreconditionError(f"checkpoint f_{j} is outside 1..{len(trace.steps)}")
    p = checkpoint_degrees(trace)[j]
    if j < len(trace.steps) and trace.steps[j].checkpoint != p:
        raise VerificationError(f"checkpoint {j}: stored p={trace.steps[j].checkpoint}, recomputed p={p}")
    try:
        result = pade_via_jacobi(trace.f, p, spec.q)
    except TruncationError as error:
        raise VerificationError(f"checkpoint {j}: {error.detail}") from error
    expected = RationalFunction(trace.partial(j), spec.Q).reduced()
    if (
        not result.is_normal
        or result.numerator != expected.numerator
        or result.denominator != expected.denominator
        or result.denominator != spec.Q
    ):
        raise VerificationError(f"checkpoint {j}: [f;{p}/{spec.q}] differs from f_{j}/Q ({result.status})")
    for certificate in trace.certificates:
        if certificate.step != j:
            continue
        if certificate.p != p or certificate.denominator != spec.Q:
            raise VerificationError(f"checkpoint {j}: certificate disagrees with [f;{p}/{spec.q}]")
        if certificate.error_K > certificate.epsilon:
            raise VerificationError(f"checkpoint {j}: certified task error exceeds its tolerance")
    return CheckpointCertificate(j, p, result.C_mn, result.C_m1n, result.as_rational())


def verify_trace(trace: BuildTrace) -> list[CheckpointCertificate]:
    spec = trace.spec
    return [verify_checkpoint(trace, spec, j) for j in range(1, len(trace.steps) + 1)]


def mutate_trace(trace: BuildTrace, rng: random.Random) -> tuple[BuildTrace, int]:
    """Perturb one stored coefficient of f inside the protected window."""
    if not trace.steps:
        raise PreconditionError("a trace without steps has no protected window")
    top = checkpoint_degrees(trace)[-1] + len(trace.roots)
    k = rng.randint(0, top)
    delta = Fraction(rng.randint(1, 9), rng.randint(1, 9)) * rng.choice((-1, 1))
    mutated = trace.f.with_coefficient(k, trace.f.coefficient(k) + delta)
    return replace(trace, f=mutated), k


# Linearity on finite spans

@dataclass(frozen=True)
class SpanCertificate:
    result: PadeResult
    shared_denominator: Polynomial
    p0: int
    divides: bool


def span_pade_check(members: Sequence[tuple[PowerSeries, object]], m: int, q: int) -> SpanCertificate:
    if not members:
        raise PreconditionError("span check needs at least one member")
    results = [pade_via_jacobi(series, m, q) for series, _ in members]
    if not all(result.exists for result in results):
        raise PreconditionError(f"some member has no [f;{m}/{q}] approximant")
    Q = results[0].denominator
    if any(result.denominator != Q for result in results):
        raise PreconditionError("members' approximants have different denominators")
    combination, numerator = None, Polynomial()
    for (series, alpha), result in zip(members, results):
        term = series.scale(alpha)
        combination = term if combination is None else combination + term
        numerator = numerator + result.numerator.scale(alpha)
    combined = pade_via_jacobi(combination, m, q)
    expected = RationalFunction(numerator, Q).reduced()
    if (
        not combined.exists
        or combined.numerator != expected.numerator
        or combined.denominator != expected.denominator
    ):
        raise VerificationError(f"[sum alpha_k f_k;{m}/{q}] is not the combination of the member approximants")
    divides = divmod(Q, combined.denominator)[1].is_zero
    return SpanCertificate(combined, Q, combined.denominator.degree, divides)


# Asymptotic poles

@dataclass(frozen=True)
class PredicateResult:
    holds: bool
    p: int | None = None
    root_distance: float | None = None
    max_residual: float | None = None


def asymptotic_pole_predicate(
    f: PowerSeries,
    mu: Sequence[int],
    q: int,
    W: Sequence,
    alpha: float,
    s_inv,
    K: CompactSetSpec,
    h: RationalFunction,
    L: DiskSampleSpec,
    reference: RationalFunction | None = None,
    precision: int | None = None,
    residual_bound: float = RESIDUAL_BOUND,
) -> PredicateResult:
    candidates = [p for p in mu if p + q + 1 <= f.truncation_len]
    if not candidates:
        raise TruncationError(f"truncation {f.truncation_len} decides no [f;p/{q}] with p in mu")
    targets = order_roots_polar([complex(GaussianRational.of(w)) for w in W], alpha)
    limit = reference if reference is not None else RationalFunction(Polynomial(f.coeffs))
    for p in candidates:
        result = pade_via_jacobi(f, p, q)
        if not result.exists or not result.C_mn or result.denominator.degree != q:
            continue
        try:
            roots = poly_roots_numeric(result.denominator, precision, alpha)
        except GuardBandError:
            logger.debug("p=%d: a pole argument falls in the guard band", p)
            continue
        residual = max(root.residual for root in roots)
        if residual >= residual_bound:
            logger.debug("p=%d: root residual %.3e is not below %.1e", p, residual, residual_bound)
            continue
        distance = max(abs(root.root - w) for root, w in zip(roots, targets))
        if distance >= s_inv:
            continue
        approximant = result.as_rational()
        try:
            error_K = sup_norm_on_samples(approximant - h, K.samples)
            error_L = sup_norm_on_samples(approximant - limit, L.samples)
        except PreconditionError:
            continue
        if error_K < s_inv and error_L < s_inv:
            return PredicateResult(True, p, distance, residual)
    return PredicateResult(False)
