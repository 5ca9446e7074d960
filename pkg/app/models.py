from enum import StrEnum
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, field_validator

from app.scalars import parse_scalar


class PadeStatus(StrEnum):
    NORMAL = "normal"
    EXISTS_NON_NORMAL = "exists-non-normal"
    DEGENERATE_EXISTS = "degenerate-exists"
    NOT_EXISTS = "not-exists"


class Command(StrEnum):
    PADE = "pade"
    TABLE = "table"
    PLACE_POLE = "place-pole"
    PLACE_ZERO = "place-zero"
    POLES_AWAY = "poles-away"
    BUILD_UNIVERSAL = "build-universal"
    GAP_BUILD = "gap-build"
    GAP_TRANSFER = "gap-transfer"
    SPAN_CHECK = "span-check"
    VERIFY = "verify"


class PadeRoute(StrEnum):
    SYSTEM = "system"
    JACOBI = "jacobi"


def _scalar_text(value) -> str:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ValueError(f"expected an exact rational literal, got {value!r}")
    text = str(value)
    parse_scalar(text)
    return text


# Exact literals stay strings until the math modules parse them
Scalar = Annotated[str, BeforeValidator(_scalar_text)]


class LabModel(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


# Shared inputs

class DiskInputs(LabModel):
    samples: list[Scalar] = Field(..., min_length=1, description="Sample points of a closed disk inside the unit disk")
    radius: Scalar = Field(..., description="Radius r < 1 bounding every sample")


class TaskInputs(LabModel):
    numerator: list[Scalar] = Field(..., description="Target numerator coefficients, constant term first")
    denominator: list[Scalar] = Field(["1"], description="Target denominator coefficients, constant term first")
    samples: list[Scalar] = Field(..., min_length=1, description="Sample cloud standing in for the compact set K")
    margin: Scalar = Field(..., description="Declared minimum distance from the excluded points")
    epsilon: Scalar = Field(..., description="Acceptance error for this task's certificates")


class SpanMemberInputs(LabModel):
    series: list[Scalar] = Field(..., min_length=1, description="Series coefficients a_0..a_N")
    coefficient: Scalar = Field(..., description="Coefficient of the member in the linear combination")


class ExperimentConfigBase(LabModel):
    schema_version: Literal[1] = Field(1, description="Configuration schema version")
    seed: Optional[int] = Field(None, description="Seed for randomized drivers")


# Command configurations

class PadeConfig(ExperimentConfigBase):
    command: Literal[Command.PADE] = Field(..., description="Compute one Padé approximant")
    series: list[Scalar] = Field(..., min_length=1, description="Series coefficients a_0..a_N")
    m: int = Field(..., ge=0, description="Numerator degree")
    n: int = Field(..., ge=0, description="Denominator degree")
    route: PadeRoute = Field(PadeRoute.JACOBI, description="Computation route")
    poles_csv: Optional[str] = Field(None, description="Optional pole-scan CSV output path")
    precision: int = Field(256, ge=53, description="Root finder precision in bits")


class TableConfig(ExperimentConfigBase):
    command: Literal[Command.TABLE] = Field(..., description="Compute a Padé table")
    series: list[Scalar] = Field(..., min_length=1, description="Series coefficients a_0..a_N")
    max_m: int = Field(..., ge=0, description="Largest numerator degree")
    max_n: int = Field(..., ge=0, description="Largest denominator degree")
    csv: Optional[str] = Field(None, description="Optional CSV output path")


class PlacementConfig(ExperimentConfigBase):
    command: Literal[Command.PLACE_POLE, Command.PLACE_ZERO] = Field(..., description="Place a pole or a zero")
    base: list[Scalar] = Field(..., min_length=1, description="Base polynomial P of degree m-1")
    m: int = Field(..., ge=1, description="Numerator degree")
    n: int = Field(..., ge=1, description="Denominator degree")
    target: Scalar = Field(..., description="Prescribed pole or zero location")
    c1: Scalar = Field(..., description="Coefficient of z^(m-1+n)")
    document: Optional[str] = Field(None, description="Optional witness document output path")


class PolesAwayConfig(ExperimentConfigBase):
    command: Literal[Command.POLES_AWAY] = Field(..., description="Build a witness with poles outside a disk")
    base: list[Scalar] = Field(..., min_length=1, description="Numerator polynomial P")
    m: int = Field(..., ge=0, description="Numerator degree")
    n: int = Field(..., ge=1, description="Denominator degree")
    mu: Scalar = Field(..., description="Pole location with |mu| > 1")
    trunc: int = Field(..., ge=1, description="Truncation length of the witness")
    precision: int = Field(256, ge=53, description="Root finder precision in bits")
    document: Optional[str] = Field(None, description="Optional series document output path")
    poles_csv: Optional[str] = Field(None, description="Optional pole-scan CSV output path")


class SpanCheckConfig(ExperimentConfigBase):
    command: Literal[Command.SPAN_CHECK] = Field(..., description="Check Padé linearity on a finite span")
    members: list[SpanMemberInputs] = Field(..., min_length=1, description="Members and their coefficients")
    m: int = Field(..., ge=0, description="Numerator degree")
    q: int = Field(..., ge=0, description="Denominator degree")


class BuildUniversalConfig(ExperimentConfigBase):
    command: Literal[Command.BUILD_UNIVERSAL] = Field(..., description="Build a prescribed-denominator universal series")
    denominator_roots: list[Scalar] = Field(..., min_length=1, description="Roots W of the prescribed denominator")
    tasks: list[TaskInputs] = Field([], description="Approximation tasks revisited round-robin")
    mu: list[int] = Field(..., min_length=1, description="Increasing pool of checkpoint degrees")
    base: list[Scalar] = Field([], description="Polynomial T the series stays close to on the disk")
    disk: DiskInputs = Field(..., description="Disk samples L")
    epsilon0: Scalar = Field(..., description="Disk fidelity budget in (0, 1)")
    rounds: int = Field(..., ge=0, description="Number of round-robin passes over the tasks")
    escalation_cap: Optional[int] = Field(None, ge=0, description="Per-step degree cap of the approximation oracle")
    trace: str = Field(..., description="Trace document output path")
    certificates: Optional[str] = Field(None, description="Certificate CSV output path")

    @field_validator("mu")
    @classmethod
    def _increasing(cls, value: list[int]) -> list[int]:
        if any(b <= a for a, b in zip(value, value[1:])) or value[0] < 0:
            raise ValueError("mu must be a strictly increasing sequence of nonnegative integers")
        return value


class GapBuildConfig(ExperimentConfigBase):
    command: Literal[Command.GAP_BUILD] = Field(..., description="Build a gap universal series")
    mu: list[int] = Field(..., min_length=1, description="Increasing pool of checkpoint degrees")
    schedule: list[tuple[int, int]] = Field(..., min_length=1, description="Gap pairs (p_m, q_m)")
    weight: Optional[list[Scalar]] = Field(None, min_length=1, description="Optional weight table phi(0), phi(1), ...")
    tasks: list[TaskInputs] = Field([], description="Approximation tasks revisited round-robin")
    base: list[Scalar] = Field([], description="Polynomial T the series stays close to on the disk")
    disk: DiskInputs = Field(..., description="Disk samples L")
    epsilon0: Scalar = Field(..., description="Disk fidelity budget in (0, 1)")
    rounds: int = Field(..., ge=0, description="Number of round-robin passes over the tasks")
    escalation_cap: Optional[int] = Field(None, ge=0, description="Per-step degree cap of the approximation oracle")
    document: str = Field(..., description="Gap series document output path")
    certificates: Optional[str] = Field(None, description="Certificate CSV output path")


class GapTransferConfig(ExperimentConfigBase):
    command: Literal[Command.GAP_TRANSFER] = Field(..., description="Transfer a gap series to a Padé universal series")
    gap_series: str = Field(..., description="Gap series document produced by gap-build")
    denominator_roots: list[Scalar] = Field(..., min_length=1, description="Roots W of the prescribed denominator")
    checkpoints: Optional[list[int]] = Field(None, description="Checkpoint indices to certify; all stored ones by default")
    certificates: Optional[str] = Field(None, description="Transfer certificate CSV output path")


class VerifyConfig(ExperimentConfigBase):
    command: Literal[Command.VERIFY] = Field(..., description="Re-check every checkpoint of a trace")
    trace: str = Field(..., description="Trace document produced by build-universal")
    mutations: int = Field(0, ge=0, description="Number of seeded mutation trials that must each fail")


ExperimentConfig = Annotated[
    Union[
        PadeConfig,
        TableConfig,
        PlacementConfig,
        PolesAwayConfig,
        SpanCheckConfig,
        BuildUniversalConfig,
        GapBuildConfig,
        GapTransferConfig,
        VerifyConfig,
    ],
    Field(discriminator="command"),
]


# Certificate rows

class PoleRow(LabModel):
    m: int = Field(..., description="Numerator degree")
    n: int = Field(..., description="Denominator degree")
    pole_index: int = Field(..., description="Position in the polar order")
    re: str = Field(..., description="Real part of the pole")
    im: str = Field(..., description="Imaginary part of the pole")
    residual: str = Field(..., description="Certified residual |q(root)|")


class BuildCertificateRow(LabModel):
    task: int = Field(..., description="Task index")
    step: int = Field(..., description="Checkpoint index j of f_j")
    p: int = Field(..., description="Checkpoint numerator degree")
    sampled_error_K: str = Field(..., description="Sampled error of the checkpoint approximant on K")
    sampled_error_L: str = Field(..., description="Sampled distance of the checkpoint approximant to f on L")
    denominator_hash: str = Field(..., description="Hash of the exact reduced denominator")


class GapCertificateRow(LabModel):
    task: int = Field(..., description="Task index")
    step: int = Field(..., description="Checkpoint index m of the gap start")
    p: int = Field(..., description="Gap start p_m")
    sampled_error_K: str = Field(..., description="Sampled error of S_p(g) on K")
    sampled_error_L: str = Field(..., description="Sampled distance of S_p(g) to T on L")


class TransferCertificateRow(LabModel):
    checkpoint: int = Field(..., description="Gap index m")
    p: int = Field(..., description="Checkpoint numerator degree p_m")
    q: int = Field(..., description="Denominator degree")
    exact_match: Literal["yes", "no"] = Field(..., description="Whether [g/Q; p/q] = S_p(g)/Q exactly")
    denominator_hash: str = Field(..., description="Hash of the exact reduced denominator")


class TableRow(LabModel):
    m: int = Field(..., description="Numerator degree")
    n: int = Field(..., description="Denominator degree")
    status: PadeStatus = Field(..., description="Classification of the cell")
    C_mn: str = Field(..., description="Hankel value C_{m,n}")
    C_m1n: str = Field(..., description="Hankel value C_{m+1,n}")
    numerator: str = Field(..., description="Reduced numerator, empty when missing")
    denominator: str = Field(..., description="Reduced denominator, empty when missing")
