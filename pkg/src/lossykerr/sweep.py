"""Deterministic tabular results and their on-disk formats.

A sweep is emitted as a data file (CSV or JSON) whose rows never contain
timestamps, plus a sidecar `.meta.json` carrying the schema version, tool
version, creation time and tolerances. CSV floats are written with 17
significant digits so repeated runs are byte-identical.
"""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

SCHEMA_VERSION = "1"


def parallel_map(fn, items, jobs: int = 1) -> list:
    """Order-preserving map over a fixed-size process pool.

    jobs <= 1 runs in-process; parallel and serial runs therefore yield
    identical result ordering.
    """
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


class SchemaVersionError(ValueError):
    """The file declares a schema version this reader does not understand."""


@dataclass(frozen=True)
class RunConfig:
    """Numerical and output policy shared by the CLI commands."""

    tail_tol: float = 1e-12
    ode_tol: float = 1e-9
    dim_cap: int = 4096
    log_base: str = "2"
    output_format: str = "csv"
    output_path: str | None = None
    parallelism: int = 1

    def __post_init__(self) -> None:
        if not (self.tail_tol > 0 and self.ode_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.dim_cap < 30:
            raise ValueError(f"dim_cap must be >= 30, got {self.dim_cap}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be csv or json, got {self.output_format!r}")
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")
        if self.log_base not in ("2", "e"):
            raise ValueError(f"log_base must be '2' or 'e', got {self.log_base!r}")


@dataclass(frozen=True)
class SweepResult:
    """Tabular record of one parameter sweep.

    Every row carries its full input tuple alongside the outputs, in the
    order named by `columns`; rows are already sorted by the sweep's
    leading axes.
    """

    inputs: dict
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    metadata: dict = field(default_factory=dict)
    schema_version: str = SCHEMA_VERSION


def sweep_metadata(**extra) -> dict:
    """Standard sweep metadata block: tool identity, timestamp, tolerances."""
    from . import __version__

    meta = {
        "tool": "lossykerr",
        "tool_version": __version__,
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    meta.update(extra)
    return meta


def format_float(x) -> str:
    """Fixed 17-significant-digit decimal rendering used in CSV data rows."""
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


def _data_path(prefix: Path, fmt: str) -> Path:
    return prefix.with_name(prefix.name + ("." + fmt))


def _meta_path(prefix: Path) -> Path:
    return prefix.with_name(prefix.name + ".meta.json")


def write_sweep(result: SweepResult, prefix, fmt: str = "csv") -> dict[str, Path]:
    """Write a sweep's data file and metadata sidecar next to `prefix`.

    Returns {"data": path, "meta": path}. The data file holds only the
    schema-stable payload; volatile metadata (timestamp, tool version)
    lives in the sidecar.
    """
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    data_path = _data_path(prefix, fmt)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([format_float(x) for x in row])
        data_path.write_text(buf.getvalue())
    elif fmt == "json":
        doc = {
            "schema_version": result.schema_version,
            "inputs": result.inputs,
            "columns": list(result.columns),
            "rows": [list(r) for r in result.rows],
        }
        data_path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    meta = {
        "schema_version": result.schema_version,
        "data_file": data_path.name,
        "format": fmt,
        "columns": list(result.columns),
        "inputs": result.inputs,
        "metadata": result.metadata,
    }
    meta_path = _meta_path(prefix)
    meta_path.write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    return {"data": data_path, "meta": meta_path}


def _parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def read_sweep(data_path) -> SweepResult:
    """Load a sweep written by write_sweep, rejecting unknown schema versions."""
    data_path = Path(data_path)
    if data_path.suffix == ".json" and not data_path.name.endswith(".meta.json"):
        doc = json.loads(data_path.read_text())
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
        return SweepResult(
            inputs=doc.get("inputs", {}),
            columns=tuple(doc["columns"]),
            rows=tuple(tuple(r) for r in doc["rows"]),
            metadata={},
            schema_version=version,
        )
    if data_path.suffix == ".csv":
        stem = data_path.name[: -len(".csv")]
        meta_path = data_path.with_name(stem + ".meta.json")
        if not meta_path.exists():
            raise FileNotFoundError(f"metadata sidecar {meta_path} not found")
        meta = json.loads(meta_path.read_text())
        version = meta.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionError(
                f"unsupported schema version {version!r} (expected {SCHEMA_VERSION})")
        with data_path.open(newline="") as fh:
            reader = csv.reader(fh)
            columns = tuple(next(reader))
            rows = tuple(tuple(_parse_cell(c) for c in line)
                         for line in reader if line)
        return SweepResult(
            inputs=meta.get("inputs", {}),
            columns=columns,
            rows=rows,
            metadata=meta.get("metadata", {}),
            schema_version=version,
        )
    raise ValueError(f"unrecognized sweep file {data_path}")
