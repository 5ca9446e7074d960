"""
Metadata codecs for the structured-text artifacts.

Every document carries `schema_version` and `kind`; scalars are written in the
exact `a/b+c/d*i` text form so a decoded document equals what was encoded.
"""
from fractions import Fraction
from functools import wraps
from typing import Iterable

from app.exceptions import ConfigError, PadeLabError
from app.gap_transfer import GapSchedule, GapSeries, WeightTable
from app.pole_lab import PolePlacementWitness
from app.polynomials import Polynomial, PowerSeries
from app.scalars import GaussianRational, format_scalar, parse_scalar
from app.universal_builder import BuildStep, BuildTrace, TaskCertificate

SCHEMA_VERSION = 1


def encode_scalars(values: Iterable[GaussianRational]) -> list[str]:
    return [format_scalar(GaussianRational.of(value)) for value in values]


def decode_scalars(values: Iterable) -> tuple[GaussianRational, ...]:
    return tuple(parse_scalar(str(value)) for value in values)


def _fraction(value) -> Fraction:
    scalar = parse_scalar(str(value))
    if not scalar.is_real():
        raise ConfigError(f"expected a real rational, got {value}")
    return scalar.re


def _expect(metadata: dict, kind: str) -> None:
    if metadata.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {metadata.get('schema_version')!r}")
    if metadata.get("kind") != kind:
        raise ConfigError(f"expected a {kind} document, got {metadata.get('kind')!r}")


def _decoder(kind: str):
    """Report missing fields and unreadable values of a document as a ConfigError."""
    def decorator(decode):
        @wraps(decode)
        def wrapper(metadata: dict):
            try:
                return decode(metadata)
            except PadeLabError:
                raise
            except KeyError as error:
                raise ConfigError(f"{kind} document is missing {error}") from error
            except (TypeError, ValueError, ZeroDivisionError) as error:
                raise ConfigError(f"malformed {kind} document: {error}") from error
        return wrapper
    return decorator


def _header(kind: str) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind}


# Series and polynomials

def encode_series(s: PowerSeries) -> dict:
    return {**_header("power-series"), "truncation_len": s.truncation_len, "coefficients": encode_scalars(s.coeffs)}


@_decoder("power-series")
def decode_series(metadata: dict) -> PowerSeries:
    if "kind" not in metadata and "coefficients" in metadata:
        return PowerSeries(decode_scalars(metadata["coefficients"]))
    _expect(metadata, "power-series")
    series = PowerSeries(decode_scalars(metadata["coefficients"]))
    if series.truncation_len != metadata.get("truncation_len", series.truncation_len):
        raise ConfigError("truncation_len disagrees with the number of coefficients")
    return series


def encode_polynomial(p: Polynomial) -> dict:
    return {**_header("polynomial"), "coefficients": encode_scalars(p.coeffs)}


@_decoder("polynomial")
def decode_polynomial(metadata: dict) -> Polynomial:
    _expect(metadata, "polynomial")
    return Polynomial(decode_scalars(metadata["coefficients"]))


# Placement witnesses

def encode_witness(witness: PolePlacementWitness) -> dict:
    return {
        **_header("placement-witness"),
        "placed": witness.kind,
        "base": encode_scalars(witness.base.coeffs),
        "m": witness.m,
        "n": witness.n,
        "c1": format_scalar(witness.c1),
        "c2": format_scalar(witness.c2),
        "target": format_scalar(witness.target),
        "coefficients": encode_scalars(witness.witness.coeffs),
    }


@_decoder("placement-witness")
def decode_witness(metadata: dict) -> PolePlacementWitness:
    _expect(metadata, "placement-witness")
    return PolePlacementWitness(
        base=Polynomial(decode_scalars(metadata["base"])),
        m=metadata["m"],
        n=metadata["n"],
        c1=parse_scalar(metadata["c1"]),
        c2=parse_scalar(metadata["c2"]),
        witness=PowerSeries(decode_scalars(metadata["coefficients"])),
        target=parse_scalar(metadata["target"]),
        kind=metadata["placed"],
    )


# Build traces

def _encode_step(step: BuildStep) -> dict:
    return {
        "j": step.j,
        "task": step.task,
        "increment": encode_scalars(step.increment.coeffs),
        "valuation_floor": step.valuation_floor,
        "checkpoint": step.checkpoint,
        "epsilon": format_scalar(GaussianRational(step.epsilon)),
        "degree": step.degree,
        "perturbation": format_scalar(GaussianRational(step.perturbation)),
    }


def _decode_step(data: dict) -> BuildStep:
    return BuildStep(
        j=data["j"],
        task=data["task"],
        increment=Polynomial(decode_scalars(data["increment"])),
        valuation_floor=data["valuation_floor"],
        checkpoint=data["checkpoint"],
        epsilon=_fraction(data["epsilon"]),
        degree=data["degree"],
        perturbation=_fraction(data["perturbation"]),
    )


def _encode_certificate(certificate: TaskCertificate) -> dict:
    return {
        "task": certificate.task,
        "step": certificate.step,
        "p": certificate.p,
        "error_K": format_scalar(GaussianRational(certificate.error_K)),
        "error_L": format_scalar(GaussianRational(certificate.error_L)),
        "denominator": encode_scalars(certificate.denominator.coeffs),
        "C_pq": format_scalar(certificate.C_pq),
        "C_p1q": format_scalar(certificate.C_p1q),
        "epsilon": format_scalar(GaussianRational(certificate.epsilon)),
    }


def _decode_certificate(data: dict) -> TaskCertificate:
    return TaskCertificate(
        task=data["task"],
        step=data["step"],
        p=data["p"],
        error_K=_fraction(data["error_K"]),
        error_L=_fraction(data["error_L"]),
        denominator=Polynomial(decode_scalars(data["denominator"])),
        C_pq=parse_scalar(data["C_pq"]),
        C_p1q=parse_scalar(data["C_p1q"]),
        epsilon=_fraction(data["epsilon"]),
    )


def encode_trace(trace: BuildTrace) -> dict:
    return {
        **_header("build-trace"),
        "mu": list(trace.mu),
        "denominator_roots": encode_scalars(trace.roots),
        "base": encode_scalars(trace.base.coeffs),
        "epsilon0": format_scalar(GaussianRational(trace.epsilon0)),
        "steps": [_encode_step(step) for step in trace.steps],
        "f_tilde": encode_scalars(trace.f_tilde.coeffs),
        "f": encode_scalars(trace.f.coeffs),
        "certificates": [_encode_certificate(c) for c in trace.certificates],
    }


@_decoder("build-trace")
def decode_trace(metadata: dict) -> BuildTrace:
    _expect(metadata, "build-trace")
    return BuildTrace(
        mu=tuple(metadata["mu"]),
        roots=decode_scalars(metadata["denominator_roots"]),
        base=Polynomial(decode_scalars(metadata["base"])),
        epsilon0=_fraction(metadata["epsilon0"]),
        steps=tuple(_decode_step(step) for step in metadata["steps"]),
        f_tilde=Polynomial(decode_scalars(metadata["f_tilde"])),
        f=PowerSeries(decode_scalars(metadata["f"])),
        certificates=tuple(_decode_certificate(c) for c in metadata.get("certificates", [])),
    )


# Gap series

def encode_gap_series(gs: GapSeries) -> dict:
    weight = gs.schedule.weight
    return {
        **_header("gap-series"),
        "schedule": [[p, q] for p, q in gs.schedule.pairs],
        "weight": None if weight is None else encode_scalars(GaussianRational(v) for v in weight.values),
        "checkpoints": list(gs.checkpoints),
        "coefficients": encode_scalars(gs.g.coeffs),
    }


@_decoder("gap-series")
def decode_gap_series(metadata: dict) -> GapSeries:
    _expect(metadata, "gap-series")
    weight = metadata.get("weight")
    schedule = GapSchedule(
        tuple((p, q) for p, q in metadata["schedule"]),
        None if weight is None else WeightTable(tuple(_fraction(v) for v in weight)),
    )
    return GapSeries(PowerSeries(decode_scalars(metadata["coefficients"])), schedule, tuple(metadata["checkpoints"]))
