import csv
import hashlib
import io
import os
from pathlib import Path
from typing import Iterable, Optional

import anyio
import frontmatter
import yaml
from pydantic import BaseModel

# Core Utilities

def get_escalation_cap() -> int:
    return int(os.getenv("PADE_LAB_ESCALATION_CAP", "64"))

def get_root_precision() -> int:
    return int(os.getenv("PADE_LAB_ROOT_PRECISION", "256"))

def get_norm_slack_bits() -> int:
    return int(os.getenv("PADE_LAB_NORM_SLACK_BITS", "40"))

def get_guard_band() -> float:
    return float(os.getenv("PADE_LAB_GUARD_BAND", "1e-9"))

def get_log_level() -> str:
    return os.getenv("PADE_LAB_LOG_LEVEL", "WARNING").upper()

def stable_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

# Read Operations

async def read_file(full_file_path: str) -> str:
    async with await anyio.open_file(full_file_path, 'r', encoding='utf-8') as f:
        return await f.read()

def parse_document(content: str) -> tuple[dict, str]:
    post = frontmatter.loads(content)
    if post.metadata:
        return dict(post.metadata), post.content
    data = yaml.safe_load(content)
    if not isinstance(data, dict):
        raise ValueError("document must hold a mapping of fields")
    return data, ""

async def read_document(full_file_path: str) -> tuple[dict, str]:
    return parse_document(await read_file(full_file_path))

# Write Operations

async def write_content(full_file_path: str, content: str) -> None:
    parent = os.path.dirname(full_file_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    async with await anyio.open_file(full_file_path, 'w', encoding='utf-8', newline='\n') as f:
        await f.write(content)

def dump_document(metadata: dict, body: Optional[str] = None) -> str:
    post = frontmatter.Post(content=body or "", **metadata)
    return frontmatter.dumps(post, sort_keys=True) + "\n"

async def write_document(full_file_path: str, metadata: dict, body: Optional[str] = None) -> None:
    await write_content(full_file_path, dump_document(metadata, body))

def dump_csv(rows: Iterable[BaseModel], fieldnames: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row.model_dump(mode="json"))
    return buffer.getvalue()

async def write_csv(full_file_path: str, rows: Iterable[BaseModel], model: type[BaseModel]) -> None:
    await write_content(full_file_path, dump_csv(rows, list(model.model_fields)))

def resolve_path(path: str, relative_to: Optional[str] = None) -> str:
    if relative_to is None or os.path.isabs(path):
        return path
    return str(Path(relative_to).parent / path)
