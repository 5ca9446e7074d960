import os

import yaml
from pydantic import TypeAdapter, ValidationError

from app.exceptions import ConfigError
from app.models import ExperimentConfig
from app.utils import parse_document, read_file

_config_adapter = TypeAdapter(ExperimentConfig)

def validate_existing_file(path: str) -> str:
    if not os.path.exists(path):
        raise ConfigError(f"Path not found: {path}")
    if os.path.isdir(path):
        raise ConfigError(f"Path is a folder, not a file: {path}")
    return path

def format_errors(exc: ValidationError) -> list[str]:
    errors = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "<root>"
        errors.append(f"{location}: {error['msg']}")
    return errors

def parse_config_text(content: str, source: str = "<config>") -> dict:
    try:
        metadata, _ = parse_document(content)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}:{mark.column + 1}" if mark is not None else source
        raise ConfigError(f"{where}: {getattr(exc, 'problem', None) or exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc
    return metadata

def config_from_mapping(data: dict, source: str = "<config>") -> ExperimentConfig:
    try:
        return _config_adapter.validate_python(data)
    except ValidationError as exc:
        errors = format_errors(exc)
        raise ConfigError(f"{source}: invalid configuration ({len(errors)} errors)", errors) from exc

async def load_mapping(path: str) -> dict:
    return parse_config_text(await read_file(validate_existing_file(path)), path)

async def load_series_coefficients(path: str) -> list:
    data = await load_mapping(path)
    coefficients = data.get("coefficients")
    if not isinstance(coefficients, list):
        raise ConfigError(f"{path}: a series document needs a 'coefficients' list")
    return coefficients
