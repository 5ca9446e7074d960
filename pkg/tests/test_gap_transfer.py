import logging
from fractions import Fraction

import pytest

from app.approx_oracle import CompactSetSpec, DiskSampleSpec
from app.exceptions import PreconditionError, ScheduleError, VerificationError
from app.gap_transfer import (
    GapSchedule,
    GapSeries,
    WeightTable,
    build_gap_series,
    generalized_s_check,
    schedule_for_S,
    schedule_from_weight,
    transfer_to_pade,
    weight_condition_holds,
)
from app.pade_core import pade_via_jacobi
from app.polynomials import ONE_POLYNOMIAL, Polynomial, PowerSeries, RationalFunction
from app.universal_builder import DenominatorSpec, UniversalTask

from .conftest import UNIT_CIRCLE, circle

DIAGONAL = [(k, k) for k in range(1, 7)]


def poly(*values) -> Polynomial:
    return Polynomial.of(values)


def gap_series(coefficients, pairs, checkpoints=()) -> GapSeries:
    return GapSeries(PowerSeries.of(coefficients), GapSchedule(tuple(pairs)), tuple(checkpoints))


@pytest.fixture
def above_origin() -> CompactSetSpec:
    return CompactSetSpec(circle("2*i", Fraction(1, 4), UNIT_CIRCLE[:8]), Fraction(1, 2))


@pytest.fixture
def tiny_disk() -> DiskSampleSpec:
    return DiskSampleSpec([0] + circle(0, Fraction(1, 2), UNIT_CIRCLE[:4]), Fraction(1, 2))


@pytest.fixture
def built(above_origin, tiny_disk):
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), above_origin, Fraction(1, 100))
    schedule = GapSchedule(((2, 8), (40, 160)))
    return build_gap_series(range(0, 200), schedule, [task], poly(1, 1), tiny_disk, Fraction(1, 10), 1)


def test_weight_table():
    weight = WeightTable((0, Fraction(1, 2), 2))
    assert weight(1) == Fraction(1, 2)
    assert weight(3) == Fraction(5, 2)
    assert weight.least_exceeding(Fraction(1, 2)) == 2
    assert weight.least_exceeding(Fraction(5, 2)) == 4
    assert weight.least_exceeding(Fraction(11, 4)) == 4


@pytest.mark.parametrize(
    "values",
    [(), (1, 0)],
    ids=["empty", "decreasing"],
)
def test_weight_table_rejects(values):
    with pytest.raises(ScheduleError):
        WeightTable(values)


@pytest.mark.parametrize(
    "case",
    [
        {"name": "overlapping windows", "pairs": ((2, 8), (5, 10)), "weight": None},
        {"name": "empty window", "pairs": ((3, 3),), "weight": None},
        {"name": "no pairs", "pairs": (), "weight": None},
        {"name": "weight outside window", "pairs": ((1, 3),), "weight": WeightTable((0, 0, 0, 0))},
    ],
    ids=lambda case: case["name"],
)
def test_schedule_rejects(case):
    with pytest.raises(ScheduleError):
        GapSchedule(case["pairs"], case["weight"])


def test_schedule_ratios():
    assert GapSchedule(((2, 8), (40, 160))).ratio_nondecreasing()
    assert not GapSchedule(((2, 8), (40, 80))).ratio_nondecreasing()


def test_gap_series_checks_windows():
    with pytest.raises(ScheduleError):
        gap_series([1, 1, 0, 1, 0], [(1, 4)])
    with pytest.raises(ScheduleError):
        gap_series([1, 1, 0, 0, 0], [(1, 4)], checkpoints=[3])
    gs = gap_series([1, 1, 0, 0, 0], [(1, 4)])
    assert gs.checkpoints == (0,)
    assert gs.partial(0) == poly(1, 1)
    assert gs.anchored(0)


def test_transfer_of_constant():
    gs = gap_series([1, 0, 0, 0, 0, 0, 0], [(0, 5)])
    spec = DenominatorSpec.from_roots([2])
    f, certificates = transfer_to_pade(gs, spec)
    assert pade_via_jacobi(f, 0, 1).denominator == poly(1, Fraction(-1, 2))
    (certificate,) = certificates
    assert certificate.exact_match and certificate.normal
    assert certificate.row().exact_match == "yes"


@pytest.mark.parametrize(
    "case",
    [
        {"name": "root is a zero of the partial sum", "coefficients": [2, -1, 0, 0, 0, 0], "pairs": [(1, 5)]},
        {"name": "gap narrower than q", "coefficients": [1, 1, 0, 0, 0, 0], "pairs": [(1, 2), (3, 5)]},
    ],
    ids=lambda case: case["name"],
)
def test_transfer_preconditions(case):
    gs = gap_series(case["coefficients"], case["pairs"])
    with pytest.raises(PreconditionError):
        transfer_to_pade(gs, DenominatorSpec.from_roots([2, 3]))


def test_transfer_rejects_unknown_checkpoint():
    gs = gap_series([1, 0, 0, 0, 0, 0, 0], [(0, 5)])
    with pytest.raises(PreconditionError):
        transfer_to_pade(gs, DenominatorSpec.from_roots([2]), checkpoints=[1])


def test_built_gap_series(built):
    gs, certificates = built
    assert gs.checkpoints == (1,)
    assert gs.anchored(1)
    assert gs.g.coeffs[:2] == poly(1, 1).coeffs
    assert not any(gs.g.coeffs[41:])
    (certificate,) = certificates
    assert (certificate.task, certificate.step, certificate.p) == (0, 1, 40)
    assert certificate.error_K <= Fraction(1, 100)
    assert certificate.row().p == 40


def test_built_gap_series_transfers(built):
    gs, _ = built
    spec = DenominatorSpec.from_roots([2, 3])
    f, certificates = transfer_to_pade(gs, spec, checkpoints=[0, 1])
    assert f.truncation_len == gs.g.truncation_len
    assert [c.p for c in certificates] == [2, 40]
    assert all(c.exact_match for c in certificates)
    result = pade_via_jacobi(f, 40, 2)
    assert result.numerator == gs.partial(1)
    assert result.denominator == spec.Q


def test_built_gap_series_row_approximants(built):
    gs, _ = built
    assert generalized_s_check(gs, [(40, 3)]) == [(1, 40, 3)]


def test_generalized_check_on_hand_made_series():
    gs = gap_series([1, 1, 0, 0, 1, 0], [(1, 3)])
    assert generalized_s_check(gs, [(1, 2)]) == [(0, 1, 2)]
    assert generalized_s_check(gs, [(7, 2)]) == []
    with pytest.raises(VerificationError):
        generalized_s_check(gs, [(1, 3)])


def test_build_needs_enough_gaps(above_origin, tiny_disk):
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), above_origin, Fraction(1, 100))
    schedule = GapSchedule(((2, 8), (40, 160)))
    with pytest.raises(ScheduleError):
        build_gap_series(range(0, 200), schedule, [task], poly(1), tiny_disk, Fraction(1, 10), 2)


@pytest.mark.parametrize(
    "case",
    [
        {"name": "start outside mu", "mu": [0, 1, 40], "T": poly(1)},
        {"name": "T beyond first start", "mu": range(0, 200), "T": poly(1, 1, 1, 1)},
    ],
    ids=lambda case: case["name"],
)
def test_build_schedule_preconditions(above_origin, tiny_disk, case):
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), above_origin, Fraction(1, 100))
    schedule = GapSchedule(((2, 8), (40, 160)))
    with pytest.raises(ScheduleError):
        build_gap_series(case["mu"], schedule, [task], case["T"], tiny_disk, Fraction(1, 10), 1)


def test_tight_schedule(above_origin, tiny_disk):
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), above_origin, Fraction(1, 100))
    schedule = GapSchedule(((2, 8), (10, 40)))
    with pytest.raises(ScheduleError, match="too tight"):
        build_gap_series(range(0, 50), schedule, [task], Polynomial(), tiny_disk, Fraction(1, 10), 1)


def test_decreasing_ratios_warn(above_origin, tiny_disk, caplog):
    task = UniversalTask(RationalFunction(ONE_POLYNOMIAL), above_origin, Fraction(1, 100))
    schedule = GapSchedule(((2, 8), (40, 80)))
    with caplog.at_level(logging.WARNING, logger="app.gap_transfer"):
        build_gap_series(range(0, 100), schedule, [task], poly(1), tiny_disk, Fraction(1, 10), 1)
    assert "ratios" in caplog.text


def test_schedule_for_diagonal():
    mu, weight = schedule_for_S(DIAGONAL, 6)
    assert mu == (1, 2, 3, 4, 5, 6)
    assert weight(2) == Fraction(3, 4)
    assert weight_condition_holds(DIAGONAL, weight, 6)
    schedule = schedule_from_weight(mu, weight, 5)
    assert schedule.pairs == ((1, 3), (4, 9))
    assert schedule.weight is weight


def test_schedule_for_zero_horizon():
    assert schedule_for_S(DIAGONAL, 0) == ((), None)


def test_schedule_for_inconsistent_horizon():
    with pytest.raises(ScheduleError):
        schedule_for_S(DIAGONAL, 7)


def test_schedule_from_weight_needs_a_start():
    with pytest.raises(ScheduleError):
        schedule_from_weight([0], WeightTable((0, 1)), 3)
