# Standard library imports
import logging
import random
# Local application imports
from app.approx_oracle import CompactSetSpec, DiskSampleSpec
from app.documents import decode_gap_series, decode_scalars, decode_trace, encode_gap_series, encode_trace
from app.exceptions import ConfigError, VerificationError
from app.gap_transfer import GapSchedule, WeightTable, build_gap_series, transfer_to_pade
from app.models import (
    BuildCertificateRow,
    BuildUniversalConfig,
    Command,
    DiskInputs,
    GapBuildConfig,
    GapCertificateRow,
    GapTransferConfig,
    TaskInputs,
    TransferCertificateRow,
    VerifyConfig,
)
from app.polynomials import Polynomial, RationalFunction
from app.routing import CommandRouter, RunContext, option
from app.scalars import parse_scalar
from app.universal_builder import (
    DenominatorSpec,
    UniversalTask,
    build_universal,
    mutate_trace,
    verify_trace,
)
from app.utils import read_document, write_csv, write_document

logger = logging.getLogger(__name__)

# Router setup
build_router = CommandRouter()

def _real(text: str):
    value = parse_scalar(text)
    if not value.is_real():
        raise ConfigError(f"expected a real rational, got {text}")
    return value.re

def to_task(inputs: TaskInputs) -> UniversalTask:
    return UniversalTask(
        target=RationalFunction(
            Polynomial(decode_scalars(inputs.numerator)),
            Polynomial(decode_scalars(inputs.denominator)),
        ),
        K=CompactSetSpec(decode_scalars(inputs.samples), _real(inputs.margin)),
        epsilon=_real(inputs.epsilon),
    )

def to_disk(inputs: DiskInputs) -> DiskSampleSpec:
    return DiskSampleSpec(decode_scalars(inputs.samples), _real(inputs.radius))

# Prescribed denominators
@build_router.command(Command.BUILD_UNIVERSAL, summary="Build a series with a prescribed Padé denominator")
async def run_build_universal(config: BuildUniversalConfig, context: RunContext) -> int:
    spec = DenominatorSpec.from_roots(decode_scalars(config.denominator_roots))
    tasks = [to_task(task) for task in config.tasks]
    trace = build_universal(
        spec,
        tasks,
        config.mu,
        Polynomial(decode_scalars(config.base)),
        to_disk(config.disk),
        _real(config.epsilon0),
        config.rounds,
        config.escalation_cap,
    )
    body = f"{len(trace.steps)} steps, denominator {spec.Q}, {len(trace.certificates)} checkpoint certificates."
    await write_document(context.resolve(config.trace), encode_trace(trace), body)
    if config.certificates:
        rows = [certificate.row() for certificate in trace.certificates]
        await write_csv(context.resolve(config.certificates), rows, BuildCertificateRow)
    for certificate in trace.certificates:
        row = certificate.row()
        print(f"task {row.task} step {row.step} p={row.p} K={row.sampled_error_K} L={row.sampled_error_L}")
    return 0

@build_router.command(
    Command.VERIFY,
    summary="Re-check every checkpoint of a build trace",
    options=(
        option("--trace", help="Trace document produced by build-universal"),
        option("--mutations", type=int, help="Number of seeded mutation trials"),
    ),
)
async def run_verify(config: VerifyConfig, context: RunContext) -> int:
    metadata, _ = await read_document(context.resolve(config.trace))
    trace = decode_trace(metadata)
    checkpoints = verify_trace(trace)
    for checkpoint in checkpoints:
        print(f"checkpoint {checkpoint.j}: [f;{checkpoint.p}/{len(trace.roots)}] = f_{checkpoint.j}/Q exact")
    rng = random.Random(config.seed or 0)
    for trial in range(config.mutations):
        mutated, k = mutate_trace(trace, rng)
        try:
            verify_trace(mutated)
        except VerificationError as exc:
            logger.info("mutation %d at a_%d detected: %s", trial, k, exc.detail)
            continue
        raise VerificationError(f"mutation {trial} at a_{k} went undetected")
    if config.mutations:
        print(f"{config.mutations} mutations detected")
    return 0

# Gap series
@build_router.command(Command.GAP_BUILD, summary="Build a gap universal series")
async def run_gap_build(config: GapBuildConfig, context: RunContext) -> int:
    weight = WeightTable(tuple(_real(v) for v in config.weight)) if config.weight else None
    schedule = GapSchedule(tuple(config.schedule), weight)
    series, certificates = build_gap_series(
        config.mu,
        schedule,
        [to_task(task) for task in config.tasks],
        Polynomial(decode_scalars(config.base)),
        to_disk(config.disk),
        _real(config.epsilon0),
        config.rounds,
        config.escalation_cap,
    )
    body = f"{len(schedule.pairs)} gaps, checkpoints {list(series.checkpoints)}."
    await write_document(context.resolve(config.document), encode_gap_series(series), body)
    if config.certificates:
        await write_csv(context.resolve(config.certificates), [c.row() for c in certificates], GapCertificateRow)
    for certificate in certificates:
        print(f"task {certificate.task} step {certificate.step} p={certificate.p} K={float(certificate.error_K):.12e}")
    return 0

@build_router.command(Command.GAP_TRANSFER, summary="Transfer a gap series to a Padé universal series")
async def run_gap_transfer(config: GapTransferConfig, context: RunContext) -> int:
    metadata, _ = await read_document(context.resolve(config.gap_series))
    series = decode_gap_series(metadata)
    spec = DenominatorSpec.from_roots(decode_scalars(config.denominator_roots))
    _, certificates = transfer_to_pade(series, spec, config.checkpoints, strict=False)
    if config.certificates:
        await write_csv(context.resolve(config.certificates), [c.row() for c in certificates], TransferCertificateRow)
    for certificate in certificates:
        row = certificate.row()
        print(f"checkpoint {row.checkpoint}: p={row.p} q={row.q} exact_match={row.exact_match}")
    mismatched = [c.checkpoint for c in certificates if not c.exact_match]
    if mismatched:
        raise VerificationError(f"[g/Q;p/q] differs from S_p(g)/Q at checkpoints {mismatched}")
    return 0
