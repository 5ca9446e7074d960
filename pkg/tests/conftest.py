import os
import tempfile
from fractions import Fraction

import pytest
import yaml

from app.approx_oracle import CompactSetSpec, DiskSampleSpec
from app.polynomials import PowerSeries
from app.scalars import GaussianRational

ENV_SETTINGS = (
    "PADE_LAB_ESCALATION_CAP",
    "PADE_LAB_ROOT_PRECISION",
    "PADE_LAB_NORM_SLACK_BITS",
    "PADE_LAB_GUARD_BAND",
    "PADE_LAB_LOG_LEVEL",
)

# Rational points on the unit circle from Pythagorean triples
UNIT_CIRCLE = (
    [GaussianRational.of(z) for z in (1, -1)]
    + [GaussianRational(Fraction(0), Fraction(s)) for s in (1, -1)]
    + [
        GaussianRational(Fraction(sa * a, c), Fraction(sb * b, c))
        for a, b, c in ((3, 4, 5), (4, 3, 5), (5, 12, 13), (12, 5, 13))
        for sa in (1, -1)
        for sb in (1, -1)
    ]
    + [
        GaussianRational(Fraction(sa * 8, 17), Fraction(sb * 15, 17))
        for sa in (1, -1)
        for sb in (1, -1)
    ]
)


def circle(center, radius, points=UNIT_CIRCLE) -> list[GaussianRational]:
    center = GaussianRational.of(center)
    return [center + z * GaussianRational.of(radius) for z in points]


def geometric(length: int, ratio=1) -> PowerSeries:
    ratio = GaussianRational.of(ratio)
    return PowerSeries(tuple(ratio ** k for k in range(length)))


@pytest.fixture(autouse=True)
def reset_lab_settings(monkeypatch):
    for name in ENV_SETTINGS:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def artifact_dir():
    """Temporary directory for documents and CSV files."""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield tmp_dir


@pytest.fixture
def geometric_series() -> PowerSeries:
    return geometric(12)


@pytest.fixture
def exp_series() -> PowerSeries:
    factorial, coeffs = 1, []
    for k in range(12):
        if k:
            factorial *= k
        coeffs.append(Fraction(1, factorial))
    return PowerSeries.of(coeffs)


@pytest.fixture
def near_two() -> CompactSetSpec:
    """24 rational samples of the circle |z - 2| = 1/4."""
    return CompactSetSpec(circle(2, Fraction(1, 4)), Fraction(1, 2))


@pytest.fixture
def small_disk() -> DiskSampleSpec:
    samples = [GaussianRational.of(0)] + circle(0, Fraction(1, 2), UNIT_CIRCLE[:8])
    return DiskSampleSpec(samples, Fraction(1, 2))


@pytest.fixture
def left_arc() -> CompactSetSpec:
    """Samples of |z| = 5/4 with Re z <= 0."""
    points = [z for z in circle(0, Fraction(5, 4)) if z.re <= 0]
    return CompactSetSpec(points, Fraction(1, 2))


def write_text(directory: str, name: str, content: str) -> str:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write(content)
    return path


def write_config(directory: str, name: str, data: dict) -> str:
    return write_text(directory, name, yaml.safe_dump(data, sort_keys=False))


DISK = {"samples": ["0", "1/2", "-1/2", "1/2*i", "-1/2*i"], "radius": "1/2"}


@pytest.fixture
def lab_dir(artifact_dir):
    """Experiment configurations sharing one directory with their outputs."""
    geometric_terms = [1] * 6
    exp_terms = ["1", "1", "1/2", "1/6", "1/24", "1/120"]
    write_config(artifact_dir, "pade.yaml", {
        "command": "pade", "series": geometric_terms, "m": 2, "n": 1, "poles_csv": "poles.csv",
    })
    write_config(artifact_dir, "table.yaml", {
        "command": "table", "series": exp_terms, "max_m": 2, "max_n": 2, "csv": "table.csv",
    })
    write_config(artifact_dir, "place_pole.yaml", {
        "command": "place-pole", "base": ["1", "1"], "m": 2, "n": 1, "target": "3", "c1": "1/100",
        "document": "witness.md",
    })
    write_config(artifact_dir, "place_zero.yaml", {
        "command": "place-zero", "base": ["1"], "m": 1, "n": 1, "target": "2", "c1": "1",
    })
    write_config(artifact_dir, "poles_away.yaml", {
        "command": "poles-away", "base": ["1", "1"], "m": 1, "n": 1, "mu": "3+4*i", "trunc": 6,
        "document": "away.md", "poles_csv": "away.csv",
    })
    write_config(artifact_dir, "span.yaml", {
        "command": "span-check", "m": 1, "q": 1,
        "members": [
            {"series": ["1", "6/5", "6/25", "6/125", "6/625", "6/3125"], "coefficient": "11"},
            {"series": ["1", "11/5", "11/25", "11/125", "11/625", "11/3125"], "coefficient": "-6"},
        ],
    })
    write_config(artifact_dir, "build.yaml", {
        "command": "build-universal",
        "denominator_roots": ["1"],
        "tasks": [{
            "numerator": ["1"],
            "samples": ["9/4", "7/4", "2+1/4*i", "2-1/4*i"],
            "margin": "1/2",
            "epsilon": "1/100",
        }],
        "mu": list(range(0, 300)),
        "disk": DISK,
        "epsilon0": "1/10",
        "rounds": 2,
        "trace": "trace.md",
        "certificates": "build.csv",
    })
    write_config(artifact_dir, "gap.yaml", {
        "command": "gap-build",
        "mu": list(range(0, 200)),
        "schedule": [[2, 8], [40, 160]],
        "tasks": [{
            "numerator": ["1"],
            "samples": ["1/4+2*i", "-1/4+2*i", "9/4*i", "7/4*i"],
            "margin": "1/2",
            "epsilon": "1/100",
        }],
        "base": ["1", "1"],
        "disk": DISK,
        "epsilon0": "1/10",
        "rounds": 1,
        "document": "gap.md",
        "certificates": "gap.csv",
    })
    write_config(artifact_dir, "transfer.yaml", {
        "command": "gap-transfer",
        "gap_series": "gap.md",
        "denominator_roots": ["2", "3"],
        "checkpoints": [0, 1],
        "certificates": "transfer.csv",
    })
    write_text(artifact_dir, "exp.yaml", "coefficients: [1, 1, '1/2', '1/6', '1/24', '1/120']\n")
    write_text(artifact_dir, "negative.yaml", "command: pade\nseries: [1, 1, 1]\nm: -1\nn: 1\n")
    write_text(artifact_dir, "broken.yaml", "command: pade\nseries: [1, 2\nm: 1\n")
    write_text(artifact_dir, "float.yaml", "command: pade\nseries: [1, 0.5, 1]\nm: 1\nn: 1\n")
    yield artifact_dir
