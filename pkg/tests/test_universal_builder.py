import random
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from app.approx_oracle import CompactSetSpec, DiskSampleSpec, sup_norm_on_samples
from app.exceptions import EscalationError, PreconditionError, ScheduleError, TruncationError, VerificationError
from app.pade_core import pade_via_jacobi
from app.polynomials import ONE_POLYNOMIAL, Polynomial, PowerSeries, RationalFunction, Z, series_div_poly
from app.universal_builder import (
    DenominatorSpec,
    UniversalTask,
    asymptotic_pole_predicate,
    build_universal,
    checkpoint_degree,
    checkpoint_degrees,
    denominator_hash,
    mutate_trace,
    round_robin_schedule,
    span_pade_check,
    step_tolerance,
    task_tolerance,
    verify_checkpoint,
    verify_trace,
)

from .conftest import UNIT_CIRCLE, circle, geometric

EPSILON0 = Fraction(1, 10)
TASK_EPSILON = Fraction(1, 100)

SPAN_POOL = [0, 1, -1, 2, Fraction(1, 2), Fraction(-1, 3)]
SPAN_COEFFICIENTS = [1, -1, 3, Fraction(1, 2), "i", "1-i"]


def poly(*values) -> Polynomial:
    return Polynomial.of(values)


@pytest.fixture
def build_disk() -> DiskSampleSpec:
    return DiskSampleSpec([0] + circle(0, Fraction(1, 2), UNIT_CIRCLE[:4]), Fraction(1, 2))


@pytest.fixture
def sparse_near_two() -> CompactSetSpec:
    return CompactSetSpec(circle(2, Fraction(1, 4), UNIT_CIRCLE[:8]), Fraction(1, 2))


@pytest.fixture
def sparse_left_arc() -> CompactSetSpec:
    points = [z for z in circle(0, Fraction(5, 4), UNIT_CIRCLE[:8]) if z.re <= 0]
    return CompactSetSpec(points, Fraction(1, 2))


@pytest.fixture
def linear_trace(sparse_near_two, build_disk):
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, TASK_EPSILON)
    return build_universal(spec, [task], range(0, 400), Polynomial(), build_disk, EPSILON0, 3)


def test_denominator_spec():
    spec = DenominatorSpec.from_roots([2, 3])
    assert spec.q == 2
    assert spec.Q == poly(1, Fraction(-5, 6), Fraction(1, 6))
    assert spec.Q(2) == 0 and spec.Q(3) == 0


@pytest.mark.parametrize(
    "case",
    [
        {"name": "no roots", "build": lambda: DenominatorSpec.from_roots([])},
        {"name": "root inside the disk", "build": lambda: DenominatorSpec.from_roots(["1/2"])},
        {"name": "Q disagrees with roots", "build": lambda: DenominatorSpec(poly(1, -1), (2,))},
    ],
    ids=lambda case: case["name"],
)
def test_denominator_spec_preconditions(case):
    with pytest.raises(PreconditionError):
        case["build"]()


def test_round_robin_schedule():
    assert round_robin_schedule(3, 2) == [0, 1, 2, 0, 1, 2]
    assert round_robin_schedule(0, 5) == []


@pytest.mark.parametrize(
    "case",
    [
        {"name": "degree in mu", "mu": [0, 3, 7], "degree": 3, "floor": 0, "expected": 3},
        {"name": "next element", "mu": [0, 3, 7], "degree": 4, "floor": 0, "expected": 7},
        {"name": "floor dominates", "mu": [0, 3, 7], "degree": 1, "floor": 5, "expected": 7},
        {"name": "zero polynomial", "mu": [2, 5], "degree": None, "floor": 0, "expected": 2},
    ],
    ids=lambda case: case["name"],
)
def test_checkpoint_degree(case):
    assert checkpoint_degree(case["mu"], case["degree"], case["floor"]) == case["expected"]


def test_checkpoint_degree_exhausted():
    with pytest.raises(ScheduleError):
        checkpoint_degree([0, 1], 2)


def test_step_tolerance(near_two, small_disk):
    spec = DenominatorSpec.from_roots([1])
    assert step_tolerance(EPSILON0, 0, spec, near_two, small_disk) == Fraction(1, 40)
    assert step_tolerance(EPSILON0, 2, spec, near_two, small_disk) == Fraction(1, 160)


def test_task_tolerance(sparse_near_two):
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, TASK_EPSILON)
    # |1 - z| >= 3/4 on the samples, attained at 7/4
    assert task_tolerance(task, spec) == Fraction(3, 800)


def test_task_needs_analytic_target(near_two):
    with pytest.raises(PreconditionError):
        UniversalTask(RationalFunction(ONE_POLYNOMIAL, poly(Fraction(-9, 4), 1)), near_two, Fraction(1, 10))


def test_linear_build(linear_trace):
    trace = linear_trace
    assert len(trace.steps) == 3
    floors = [step.valuation_floor for step in trace.steps]
    assert floors == sorted(set(floors))
    for step in trace.steps:
        assert step.increment.valuation >= step.valuation_floor
        assert step.checkpoint + 2 == step.valuation_floor
    assert [step.checkpoint for step in trace.steps] == checkpoint_degrees(trace)[:3]
    assert trace.f == series_div_poly(PowerSeries.from_polynomial(trace.f_tilde, trace.f.truncation_len), trace.spec.Q)


def test_linear_build_certificates(linear_trace):
    certificates = linear_trace.certificates
    assert [c.step for c in certificates] == [1, 2, 3]
    for certificate in certificates:
        assert certificate.denominator == poly(1, -1)
        assert certificate.C_pq != 0 and certificate.C_p1q != 0
        assert certificate.error_K <= EPSILON0
    row = certificates[0].row()
    assert row.denominator_hash == denominator_hash(poly(1, -1))
    assert float(row.sampled_error_K) == pytest.approx(float(certificates[0].error_K))


def test_linear_build_meets_task_tolerance(linear_trace, sparse_near_two, build_disk):
    spec = linear_trace.spec
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, TASK_EPSILON)
    for step in linear_trace.steps:
        expected = min(step_tolerance(EPSILON0, step.j, spec, sparse_near_two, build_disk), task_tolerance(task, spec))
        assert step.epsilon == expected == Fraction(3, 800)
    for certificate in linear_trace.certificates:
        assert certificate.epsilon == TASK_EPSILON
        assert certificate.error_K <= TASK_EPSILON


def test_linear_build_stays_close_to_base(linear_trace, build_disk):
    drift = linear_trace.as_rational() - RationalFunction(linear_trace.base)
    assert sup_norm_on_samples(drift, build_disk.samples) <= EPSILON0


def test_tight_task_tolerance(sparse_near_two, build_disk):
    epsilon = Fraction(1, 10 ** 9)
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, epsilon)
    trace = build_universal(spec, [task], range(0, 400), Polynomial(), build_disk, EPSILON0, 1)
    (certificate,) = trace.certificates
    assert certificate.epsilon == epsilon
    assert certificate.error_K <= epsilon
    assert trace.steps[0].epsilon == task_tolerance(task, spec)
    verify_trace(trace)


@pytest.mark.parametrize(
    "case",
    [
        {"name": "error above tolerance", "change": {"error_K": TASK_EPSILON * 2}, "message": "exceeds its tolerance"},
        {"name": "wrong checkpoint degree", "change": {"p": 1}, "message": "certificate disagrees"},
        {"name": "wrong denominator", "change": {"denominator": poly(1, -2)}, "message": "certificate disagrees"},
    ],
    ids=lambda case: case["name"],
)
def test_tampered_certificate_is_caught(linear_trace, case):
    first, *rest = linear_trace.certificates
    tampered = replace(linear_trace, certificates=(replace(first, **case["change"]), *rest))
    with pytest.raises(VerificationError, match=case["message"]):
        verify_trace(tampered)


def test_verify_trace(linear_trace):
    checkpoints = verify_trace(linear_trace)
    assert [c.j for c in checkpoints] == [1, 2, 3]
    for checkpoint in checkpoints:
        expected = RationalFunction(linear_trace.partial(checkpoint.j), linear_trace.spec.Q).reduced()
        assert checkpoint.approximant == expected


def test_checkpoint_zero_is_not_certified(linear_trace):
    with pytest.raises(PreconditionError):
        verify_checkpoint(linear_trace, linear_trace.spec, 0)


def test_every_mutation_is_caught(linear_trace):
    rng = random.Random(7)
    for _ in range(10):
        mutated, k = mutate_trace(linear_trace, rng)
        assert k <= checkpoint_degrees(linear_trace)[-1] + 1
        with pytest.raises(VerificationError):
            verify_trace(mutated)


def test_tampered_checkpoint_is_caught(linear_trace):
    steps = list(linear_trace.steps)
    steps[1] = replace(steps[1], checkpoint=steps[1].checkpoint + 1)
    tampered = replace(linear_trace, steps=tuple(steps))
    with pytest.raises(VerificationError):
        verify_trace(tampered)


def test_quadratic_build(sparse_left_arc, build_disk):
    spec = DenominatorSpec.from_roots([2, 3])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL, Z), sparse_left_arc, Fraction(1, 100))
    trace = build_universal(spec, [task], range(0, 400), ONE_POLYNOMIAL, build_disk, EPSILON0, 2)
    assert trace.partial(0) == spec.Q
    checkpoints = verify_trace(trace)
    assert all(c.approximant.denominator == spec.Q for c in checkpoints)
    assert all(c.error_K <= EPSILON0 for c in trace.certificates)


def test_two_tasks_alternate(sparse_near_two, sparse_left_arc, build_disk):
    spec = DenominatorSpec.from_roots([-3])
    tasks = [
        UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, Fraction(1, 100)),
        UniversalTask(RationalFunction(poly(0, 1)), sparse_left_arc, Fraction(1, 100)),
    ]
    trace = build_universal(spec, tasks, range(0, 400), Polynomial(), build_disk, EPSILON0, 1)
    assert [step.task for step in trace.steps] == [0, 1]
    assert [c.task for c in trace.certificates] == [0, 1]
    verify_trace(trace)


def test_no_tasks_gives_base(build_disk):
    spec = DenominatorSpec.from_roots([2])
    T = poly(1, 2, 3)
    trace = build_universal(spec, [], range(0, 10), T, build_disk, EPSILON0, 3)
    assert trace.steps == ()
    assert trace.certificates == ()
    assert trace.f.coeffs[:3] == T.coeffs
    assert not any(trace.f.coeffs[3:])


def test_escalation_reports_step(sparse_near_two, build_disk):
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, Fraction(1, 100))
    with pytest.raises(EscalationError) as error:
        build_universal(spec, [task], range(0, 400), Polynomial(), build_disk, EPSILON0, 1, cap=0)
    assert (error.value.step, error.value.task) == (0, 0)
    assert error.value.exit_code == 4


def test_exhausted_mu(sparse_near_two, build_disk):
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, Fraction(1, 100))
    with pytest.raises(ScheduleError):
        build_universal(spec, [task], [0, 1], Polynomial(), build_disk, EPSILON0, 2)


@pytest.mark.parametrize("epsilon0", [0, 1, Fraction(3, 2)], ids=["zero", "one", "above"])
def test_epsilon0_range(build_disk, epsilon0):
    with pytest.raises(PreconditionError):
        build_universal(DenominatorSpec.from_roots([2]), [], range(10), ONE_POLYNOMIAL, build_disk, epsilon0, 1)


def rational_series(P: Polynomial, Q: Polynomial, length: int = 8) -> PowerSeries:
    return series_div_poly(PowerSeries.from_polynomial(P, length), Q)


@pytest.mark.parametrize(
    "case",
    [
        {"name": "generic combination", "alphas": (1, 1), "denominator": poly(1, Fraction(-1, 5)), "divides": True},
        {"name": "cancellation", "alphas": (11, -6), "denominator": poly(1), "divides": True},
    ],
    ids=lambda case: case["name"],
)
def test_span_check(case):
    Q = poly(1, Fraction(-1, 5))
    members = [
        (rational_series(poly(1, 1), Q), case["alphas"][0]),
        (rational_series(poly(1, 2), Q), case["alphas"][1]),
    ]
    certificate = span_pade_check(members, 1, 1)
    assert certificate.shared_denominator == Q
    assert certificate.result.denominator == case["denominator"]
    assert certificate.divides is case["divides"]
    assert certificate.p0 == case["denominator"].degree


span_members = st.lists(
    st.tuples(st.sampled_from(SPAN_POOL), st.sampled_from(SPAN_POOL), st.sampled_from(SPAN_COEFFICIENTS)),
    min_size=3,
    max_size=3,
)


@settings(max_examples=100, deadline=None)
@given(span_members)
def test_span_of_three_members(members):
    Q = poly(1, Fraction(-1, 5))
    numerators = [poly(a, b) for a, b, _ in members]
    assume(all(P(5) for P in numerators))
    combined = Polynomial()
    for P, (_, _, alpha) in zip(numerators, members):
        combined = combined + P.scale(alpha)
    assume(not combined.is_zero)
    certificate = span_pade_check([(rational_series(P, Q), alpha) for P, (_, _, alpha) in zip(numerators, members)], 1, 1)
    expected = RationalFunction(combined, Q).reduced()
    assert certificate.shared_denominator == Q
    assert certificate.divides
    assert (certificate.result.numerator, certificate.result.denominator) == (expected.numerator, expected.denominator)


def test_span_check_needs_shared_denominator(geometric_series, exp_series):
    with pytest.raises(PreconditionError):
        span_pade_check([(geometric_series, 1), (exp_series, 1)], 1, 1)
    with pytest.raises(PreconditionError):
        span_pade_check([], 1, 1)


def test_pole_predicate_holds(near_two, small_disk):
    Q = poly(1, Fraction(-1, 5))
    f = rational_series(ONE_POLYNOMIAL, Q, 12)
    result = asymptotic_pole_predicate(
        f, range(0, 5), 1, [5], 0.5, Fraction(1, 100), near_two, RationalFunction(ONE_POLYNOMIAL, Q), small_disk
    )
    assert result.holds
    assert result.p == 0
    assert result.root_distance < 1e-12
    assert result.max_residual < 1e-9


def test_pole_predicate_needs_small_residuals(near_two, small_disk):
    Q = poly(1, Fraction(-1, 5))
    f = rational_series(ONE_POLYNOMIAL, Q, 12)
    result = asymptotic_pole_predicate(
        f, range(0, 5), 1, [5], 0.5, Fraction(1, 100), near_two, RationalFunction(ONE_POLYNOMIAL, Q), small_disk,
        residual_bound=0.0,
    )
    assert not result.holds


def test_pole_predicate_on_built_series(sparse_near_two, build_disk):
    spec = DenominatorSpec.from_roots([1])
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), sparse_near_two, Fraction(1, 10 ** 7))
    trace = build_universal(spec, [task], range(0, 400), Polynomial(), build_disk, EPSILON0, 2)
    degrees = checkpoint_degrees(trace)
    result = asymptotic_pole_predicate(
        trace.f,
        degrees[1:],
        1,
        [1],
        0.5,
        Fraction(1, 10 ** 6),
        sparse_near_two,
        RationalFunction(ONE_POLYNOMIAL),
        build_disk,
        reference=trace.as_rational(),
    )
    assert result.holds
    assert result.p == degrees[1]
    assert result.root_distance < 1e-12
    assert result.max_residual < 1e-9


def test_pole_predicate_fails_far_from_target(near_two, small_disk):
    f = geometric(12)
    result = asymptotic_pole_predicate(
        f, range(0, 5), 1, [5], 0.5, Fraction(1, 100), near_two, RationalFunction(ONE_POLYNOMIAL), small_disk
    )
    assert not result.holds
    assert result.p is None


def test_pole_predicate_needs_terms(near_two, small_disk):
    with pytest.raises(TruncationError):
        asymptotic_pole_predicate(
            geometric(12), [20], 1, [5], 0.5, Fraction(1, 100), near_two, RationalFunction(ONE_POLYNOMIAL), small_disk
        )


def test_built_series_meets_its_checkpoints(linear_trace):
    p = checkpoint_degrees(linear_trace)[1]
    assert pade_via_jacobi(linear_trace.f, p, 1).is_normal
