# Local application imports
from app.documents import decode_scalars, encode_series, encode_witness
from app.models import (
    Command,
    PadeConfig,
    PadeRoute,
    PlacementConfig,
    PoleRow,
    PolesAwayConfig,
    SpanCheckConfig,
    TableConfig,
    TableRow,
)
from app.pade_core import PadeResult, pade, pade_table
from app.pole_lab import place_pole, place_zero, pole_scan, poles_outside_disk_witness
from app.polynomials import Polynomial, PowerSeries
from app.routing import CommandRouter, RunContext, option
from app.scalars import format_scalar, parse_scalar
from app.universal_builder import span_pade_check
from app.utils import write_csv, write_document

# Router setup
pade_router = CommandRouter()

def describe(result: PadeResult) -> str:
    lines = [
        f"[S;{result.m}/{result.n}] status: {result.status}",
        f"C_{{{result.m},{result.n}}} = {format_scalar(result.C_mn)}",
        f"C_{{{result.m + 1},{result.n}}} = {format_scalar(result.C_m1n)}",
    ]
    if result.exists:
        lines.append(f"approximant: {result.as_rational()}")
    if result.factor is not None:
        lines.append(f"factor T: {result.factor}")
    return "\n".join(lines)

def table_row(result: PadeResult) -> TableRow:
    return TableRow(
        m=result.m,
        n=result.n,
        status=result.status,
        C_mn=format_scalar(result.C_mn),
        C_m1n=format_scalar(result.C_m1n),
        numerator=str(result.numerator) if result.exists else "",
        denominator=str(result.denominator) if result.exists else "",
    )

# Approximants
@pade_router.command(
    Command.PADE,
    summary="Compute one Padé approximant",
    options=(
        option("--series", help="Series document holding a 'coefficients' list"),
        option("--m", type=int, help="Numerator degree"),
        option("--n", type=int, help="Denominator degree"),
        option("--route", choices=[route.value for route in PadeRoute], help="Computation route"),
    ),
)
async def run_pade(config: PadeConfig, context: RunContext) -> int:
    series = PowerSeries(decode_scalars(config.series))
    result = pade(series, config.m, config.n, config.route)
    print(describe(result))
    if config.poles_csv:
        rows = pole_scan(series, [(config.m, config.n)], config.precision)
        await write_csv(context.resolve(config.poles_csv), rows, PoleRow)
    return 0

@pade_router.command(
    Command.TABLE,
    summary="Compute a Padé table with status flags",
    options=(
        option("--series", help="Series document holding a 'coefficients' list"),
        option("--max-m", type=int, help="Largest numerator degree"),
        option("--max-n", type=int, help="Largest denominator degree"),
        option("--csv", help="CSV output path"),
    ),
)
async def run_table(config: TableConfig, context: RunContext) -> int:
    series = PowerSeries(decode_scalars(config.series))
    table = pade_table(series, config.max_m, config.max_n)
    for n in range(config.max_n + 1):
        cells = [table[m, n].status.value if (m, n) in table else "-" for m in range(config.max_m + 1)]
        print(f"n={n}: " + " ".join(f"{cell:>18}" for cell in cells))
    for result in table.values():
        print(f"({result.m},{result.n}) C={format_scalar(result.C_mn)}"
              + (f" {result.as_rational()}" if result.exists else ""))
    if config.csv:
        await write_csv(context.resolve(config.csv), [table_row(r) for r in table.values()], TableRow)
    return 0

# Placement witnesses
@pade_router.command(Command.PLACE_ZERO, summary="Build a series whose approximant has a prescribed zero")
@pade_router.command(Command.PLACE_POLE, summary="Build a series whose approximant has a prescribed pole")
async def run_placement(config: PlacementConfig, context: RunContext) -> int:
    place = place_pole if config.command == Command.PLACE_POLE else place_zero
    base = Polynomial(decode_scalars(config.base))
    witness = place(base, config.m, config.n, parse_scalar(config.target), parse_scalar(config.c1))
    print(f"c1 = {format_scalar(witness.c1)}")
    print(f"c2 = {format_scalar(witness.c2)}")
    print(f"witness: {Polynomial(witness.witness.coeffs)}")
    if config.document:
        body = f"Placed {witness.kind} at {format_scalar(witness.target)} for [f;{config.m}/{config.n}]."
        await write_document(context.resolve(config.document), encode_witness(witness), body)
    return 0

@pade_router.command(Command.POLES_AWAY, summary="Build a series whose approximant poles lie at mu")
async def run_poles_away(config: PolesAwayConfig, context: RunContext) -> int:
    base = Polynomial(decode_scalars(config.base))
    series = poles_outside_disk_witness(base, config.m, config.n, parse_scalar(config.mu), config.trunc)
    print(describe(pade(series, config.m, config.n)))
    if config.document:
        body = f"Expansion of P/(1-z/mu)^{config.n} with mu = {config.mu}."
        await write_document(context.resolve(config.document), encode_series(series), body)
    if config.poles_csv:
        rows = pole_scan(series, [(config.m, config.n)], config.precision)
        await write_csv(context.resolve(config.poles_csv), rows, PoleRow)
    return 0

# Linearity
@pade_router.command(Command.SPAN_CHECK, summary="Check Padé linearity on a finite span")
async def run_span_check(config: SpanCheckConfig, context: RunContext) -> int:
    members = [
        (PowerSeries(decode_scalars(member.series)), parse_scalar(member.coefficient))
        for member in config.members
    ]
    certificate = span_pade_check(members, config.m, config.q)
    print(describe(certificate.result))
    print(f"shared denominator: {certificate.shared_denominator}")
    print(f"reduced denominator degree p0 = {certificate.p0}, divides Q: {'yes' if certificate.divides else 'no'}")
    return 0
