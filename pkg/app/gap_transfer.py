"""
Ostrowski-gap series at finite truncation and their transfer to series with
prescribed Padé denominators.

A gap schedule is a list of windows p_m < k <= q_m in which every coefficient
is an exact zero. Partial sums at the window starts then coincide with the
Padé approximants of g/Q (denominator Q) and of g itself for any denominator
degree that fits inside the window.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from app.approx_oracle import (
    ApproxTask,
    DiskSampleSpec,
    approximate,
    perturbation_coefficient,
    sup_norm_on_samples,
)
from app.exceptions import EscalationError, PreconditionError, ScheduleError, VerificationError
from app.models import GapCertificateRow, TransferCertificateRow
from app.pade_core import pade_via_jacobi
from app.polynomials import ONE_POLYNOMIAL, Polynomial, PowerSeries, poly_gcd, series_div_poly
from app.universal_builder import DenominatorSpec, UniversalTask, denominator_hash, round_robin_schedule
from app.utils import get_escalation_cap

logger = logging.getLogger(__name__)

TAIL_SLOPE = Fraction(1, 2)


@dataclass(frozen=True)
class WeightTable:
    """phi(0), phi(1), ... with slope 1/2 past the last stored value."""
    values: tuple[Fraction, ...]

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise ScheduleError("a weight table needs at least one value")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ScheduleError("the weight table must be nondecreasing")

    def __call__(self, x: int) -> Fraction:
        if x < 0:
            raise PreconditionError("weights are defined on nonnegative integers")
        if x < len(self.values):
            return self.values[x]
        return self.values[-1] + TAIL_SLOPE * (x - len(self.values) + 1)

    def least_exceeding(self, bound: Fraction) -> int:
        """Least x with phi(x) > bound."""
        for x, value in enumerate(self.values):
            if value > bound:
                return x
        top = len(self.values) - 1
        steps = (bound - self.values[-1]) / TAIL_SLOPE
        return top + int(steps) + 1


@dataclass(frozen=True)
class GapSchedule:
    pairs: tuple[tuple[int, int], ...]
    weight: WeightTable | None = None

    def __post_init__(self):
        pairs = tuple((int(p), int(q)) for p, q in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if not pairs:
            raise ScheduleError("a gap schedule needs at least one pair")
        previous_end = -1
        for m, (p, q) in enumerate(pairs):
            if not previous_end < p < q:
                raise ScheduleError(f"pair {m} = ({p}, {q}) breaks p_0 < q_0 < p_1 < q_1 < ...")
            if self.weight is not None and not p < self.weight(q) < q:
                raise ScheduleError(f"pair {m} = ({p}, {q}) violates p < phi(q) < q")
            previous_end = q

    @property
    def starts(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    @property
    def end(self) -> int:
        return self.pairs[-1][1]

    def ratio_nondecreasing(self) -> bool:
        ratios = [(q, p) for p, q in self.pairs if p > 0]
        return all(q1 * p2 <= q2 * p1 for (q1, p1), (q2, p2) in zip(ratios, ratios[1:]))


@dataclass(frozen=True)
class GapSeries:
    g: PowerSeries
    schedule: GapSchedule
    checkpoints: tuple[int, ...] = field(default=())

    def __post_init__(self):
        self.g.require(self.schedule.end + 1, "the gap windows")
        for m, (p, q) in enumerate(self.schedule.pairs):
            for k in range(p + 1, q + 1):
                if self.g.coefficient(k):
                    raise ScheduleError(f"gap {m} holds a nonzero coefficient a_{k}")
        checkpoints = tuple(self.checkpoints) or tuple(range(len(self.schedule.pairs)))
        object.__setattr__(self, "checkpoints", checkpoints)
        for m in checkpoints:
            if not 0 <= m < len(self.schedule.pairs):
                raise ScheduleError(f"checkpoint {m} is not a stored gap")

    def partial(self, m: int) -> Polynomial:
        return self.g.partial_sum(self.schedule.pairs[m][0])

    def anchored(self, m: int) -> bool:
        return bool(self.g.coefficient(self.schedule.pairs[m][0]))


@dataclass(frozen=True)
class GapCertificate:
    task: int
    step: int
    p: int
    error_K: Fraction
    error_L: Fraction

    def row(self) -> GapCertificateRow:
        return GapCertificateRow(
            task=self.task,
            step=self.step,
            p=self.p,
            sampled_error_K=f"{float(self.error_K):.12e}",
            sampled_error_L=f"{float(self.error_L):.12e}",
        )


@dataclass(frozen=True)
class TransferCertificate:
    checkpoint: int
    p: int
    q: int
    exact_match: bool
    normal: bool
    denominator: Polynomial

    def row(self) -> TransferCertificateRow:
        return TransferCertificateRow(
            checkpoint=self.checkpoint,
            p=self.p,
            q=self.q,
            exact_match="yes" if self.exact_match else "no",
            denominator_hash=denominator_hash(self.denominator),
        )


# Build

def build_gap_series(
    mu: Sequence[int],
    schedule: GapSchedule,
    tasks: Sequence[UniversalTask],
    T: Polynomial,
    L: DiskSampleSpec,
    epsilon0,
    rounds: int,
    cap: int | None = None,
) -> tuple[GapSeries, list[GapCertificate]]:
    epsilon0 = Fraction(epsilon0)
    if not 0 < epsilon0 < 1:
        raise PreconditionError("epsilon0 must lie in (0, 1)")
    if not set(schedule.starts) <= set(mu):
        raise ScheduleError("every gap start p_m must belong to mu")
    if not schedule.ratio_nondecreasing():
        logger.warning("gap ratios q_m/p_m decrease somewhere in the schedule")
    first_start = schedule.pairs[0][0]
    if (T.degree or 0) > first_start:
        raise ScheduleError(f"T has degree {T.degree} beyond the first gap start {first_start}")
    order = round_robin_schedule(len(tasks), rounds)
    if len(order) >= len(schedule.pairs):
        raise ScheduleError(f"{len(order)} steps need {len(order) + 1} gaps, the schedule has {len(schedule.pairs)}")
    cap = get_escalation_cap() if cap is None else cap
    g_j, certificates = T, []
    for j, t in enumerate(order):
        task = tasks[t]
        floor = schedule.pairs[j][1] + 1
        anchor = schedule.pairs[j + 1][0]
        room = anchor - floor
        epsilon = min(epsilon0 / (1 << (j + 1)), task.epsilon / 2)
        oracle_task = ApproxTask(
            target=task.target - g_j,
            K=task.K,
            L=L,
            epsilon=epsilon,
            valuation_floor=floor,
        )
        try:
            result = approximate(oracle_task, min(cap, room))
        except EscalationError as error:
            if room < cap:
                raise ScheduleError(
                    f"schedule too tight at block {j}: support [{floor}, {anchor}] for task {t}"
                ) from error
            raise EscalationError(f"step {j}, task {t}: {error.detail}", step=j, task=t) from error
        block = result.polynomial
        if not block.coefficient(anchor):
            c = perturbation_coefficient(epsilon, task.K.samples + L.samples, anchor)
            block = block + Polynomial.monomial(c, anchor)
        g_j = g_j + block
        certificates.append(GapCertificate(
            task=t,
            step=j + 1,
            p=anchor,
            error_K=sup_norm_on_samples(task.target - g_j, task.K.samples),
            error_L=sup_norm_on_samples(g_j - T, L.samples),
        ))
        if certificates[-1].error_K > task.epsilon:
            raise VerificationError(f"block {j}: task {t} error exceeds its tolerance {float(task.epsilon):.3e}")
        logger.info(
            "gap block %d task %d: support [%d, %d] error K=%.3e",
            j, t, floor, anchor, certificates[-1].error_K,
        )
    g = PowerSeries.from_polynomial(g_j, schedule.end + 1)
    series = GapSeries(g, schedule, tuple(range(1, len(order) + 1)))
    for m in range(1, len(order) + 1):
        if not series.anchored(m):
            raise VerificationError(f"checkpoint {m} lost its anchor coefficient")
    return series, certificates


# Transfer

def transfer_to_pade(
    gs: GapSeries, spec: DenominatorSpec, checkpoints: Iterable[int] | None = None, strict: bool = True
) -> tuple[PowerSeries, list[TransferCertificate]]:
    checkpoints = gs.checkpoints if checkpoints is None else tuple(checkpoints)
    for m in checkpoints:
        if not 0 <= m < len(gs.schedule.pairs):
            raise PreconditionError(f"checkpoint {m} is not a stored gap")
        p, end = gs.schedule.pairs[m]
        if end - p <= spec.q:
            raise PreconditionError(f"gap {m} has width {end - p}, not more than q = {spec.q}")
        partial = gs.partial(m)
        for w in spec.roots:
            if not partial(w):
                raise PreconditionError(f"root {w} of Q is a zero of S_{p}(g) at checkpoint {m}")
        if poly_gcd(partial, spec.Q).degree:
            raise PreconditionError(f"S_{p}(g) and Q share a factor at checkpoint {m}")
    f = series_div_poly(gs.g, spec.Q)
    certificates = []
    for m in checkpoints:
        p = gs.schedule.pairs[m][0]
        result = pade_via_jacobi(f, p, spec.q)
        partial = gs.partial(m)
        match = result.exists and result.numerator == partial and result.denominator == spec.Q
        certificates.append(TransferCertificate(
            m, p, spec.q, match, result.is_normal,
            result.denominator if result.exists else Polynomial(),
        ))
    mismatched = [c.checkpoint for c in certificates if not c.exact_match]
    if strict and mismatched:
        raise VerificationError(f"[g/Q;p/q] differs from S_p(g)/Q at checkpoints {mismatched}")
    return f, certificates


# Weights for general degree sequences

def _constrained_ends(S: Sequence[tuple[int, int]], horizon: int) -> list[int]:
    """x_n = p_r + q_r with p_r the least p >= n, for n = 1..horizon."""
    ends = []
    for n in range(1, horizon + 1):
        admissible = [(p, q) for p, q in S if p >= n]
        if not admissible:
            raise ScheduleError(f"horizon {horizon} is inconsistent: no p >= {n} in S")
        p, q = min(admissible)
        ends.append(p + q)
    return ends


def schedule_for_S(S: Sequence[tuple[int, int]], horizon: int) -> tuple[tuple[int, ...], WeightTable | None]:
    """One admissible weight with phi(p_r + q_r) < n for every n <= horizon."""
    if horizon < 0:
        raise ScheduleError("the horizon must be nonnegative")
    if horizon == 0:
        return (), None
    ends = _constrained_ends(S, horizon)
    mu = tuple(sorted({p for p, _ in S if p >= 1}))
    top = max(ends)
    levels = []
    for x in range(top + 1):
        levels.append(next(n for n, end in enumerate(ends, start=1) if end >= x))
    values = []
    for x, level in enumerate(levels):
        run = levels.count(level)
        position = levels[:x].count(level)
        values.append(level - 1 + Fraction(position + 1, run + 1))
    return mu, WeightTable(tuple(values))


def weight_condition_holds(S: Sequence[tuple[int, int]], weight: WeightTable, horizon: int) -> bool:
    return all(weight(end) < n for n, end in enumerate(_constrained_ends(S, horizon), start=1))


def schedule_from_weight(mu: Sequence[int], weight: WeightTable, count: int) -> GapSchedule:
    """Smallest admissible gap ends q_m with phi(q_m) > p_m, starting each gap from mu."""
    pairs, candidates = [], sorted(mu)
    p = next((x for x in candidates if x >= 1), None)
    while p is not None and len(pairs) < count:
        q = max(weight.least_exceeding(Fraction(p)), p + 1)
        pairs.append((p, q))
        p = next((x for x in candidates if x > q), None)
    if not pairs:
        raise ScheduleError("mu holds no admissible gap start")
    return GapSchedule(tuple(pairs), weight)


def generalized_s_check(gs: GapSeries, S: Sequence[tuple[int, int]]) -> list[tuple[int, int, int]]:
    """[g; p/q] = S_p(g) at every checkpoint whose start p has a degree pair (p, q) in S."""
    degrees = dict(S)
    checked = []
    for m in gs.checkpoints:
        p = gs.schedule.pairs[m][0]
        if p not in degrees:
            continue
        q = degrees[p]
        result = pade_via_jacobi(gs.g, p, q)
        partial = gs.partial(m)
        if not result.exists or result.numerator != partial or result.denominator != ONE_POLYNOMIAL:
            raise VerificationError(f"[g;{p}/{q}] differs from S_{p}(g) at checkpoint {m}")
        checked.append((m, p, q))
    return checked
