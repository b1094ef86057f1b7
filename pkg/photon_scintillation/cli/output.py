"""
Result tables and run manifests
"""
import csv
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import ConfigDict, Field, TypeAdapter, dataclasses


@dataclasses.dataclass(frozen=True)
class TableSchema:
    """Versioned column layout of a CSV result table"""

    name: str
    version: int
    columns: tuple[str, ...]

    @property
    def identifier(self) -> str:
        return f"{self.name}/{self.version}"


BEAM_SCHEMA = TableSchema(
    name="beam",
    version=1,
    columns=("distance_m", "R2_analytic_m2", "var_x_mc_m2", "stderr", "ratio", "R2_turbulence_m2"),
)
SCINT_SCHEMA = TableSchema(
    name="scint",
    version=1,
    columns=("cn2", "r1_over_r0_sq", "path_m", "sigma2", "stderr", "realizations"),
)
COUNT_SCHEMA = TableSchema(
    name="count",
    version=1,
    columns=("source_kind", "alpha", "mean_n", "nvar_sampled", "nvar_analytic", "shot_term", "scint_term",
             "sigma2_used"),
)


@dataclasses.dataclass(frozen=True, config=ConfigDict(ser_json_inf_nan="strings"))
class RunManifest:
    """Everything needed to reproduce a run, written next to its output"""

    command: str = Field(description="Subcommand that produced the output")
    """Subcommand that produced the output"""

    tool_version: str = Field(description="Version of photon-scintillation")
    """Version of photon-scintillation"""

    master_seed: int = Field(description="Seed all random streams derived from")
    """Seed all random streams derived from"""

    config: dict[str, Any] = Field(description="Resolved experiment in config file layout")
    """Resolved experiment in config file layout"""

    csv_schema: str = Field(description="Identifier of the CSV layout")
    """Identifier of the CSV layout"""

    columns: list[str] = Field(description="CSV columns in order")
    """CSV columns in order"""

    workers: int = Field(description="Worker processes used")
    """Worker processes used"""

    runtime_seconds: float = Field(description="Wall-clock runtime")
    """Wall-clock runtime"""

    warnings: list[str] = Field(default_factory=list, description="Quality warnings of the run")
    """Quality warnings of the run"""

    extras: dict[str, Any] = Field(default_factory=dict, description="Command specific diagnostics")
    """Command specific diagnostics"""


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.12g}"
    return str(value)


def write_csv(file_path: Path, schema: TableSchema, rows: Iterable[Sequence[Any]]) -> Path:
    """
    Write a result table with header row and '\\n' line endings
    :param file_path: Target file
    :param schema: Column layout
    :param rows: Rows with one value per column
    :return: Path of the written file
    """
    with file_path.open("w", newline="") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(schema.columns)
        for row in rows:
            if len(row) != len(schema.columns):
                raise ValueError(f"row {row} does not match schema {schema.identifier}")
            writer.writerow([format_value(value) for value in row])
    return file_path


def manifest_path(out: Path) -> Path:
    return out.with_name(out.name + ".manifest.json")


def write_manifest(out: Path, manifest: RunManifest) -> Path:
    file_path = manifest_path(out)
    file_path.write_bytes(TypeAdapter(RunManifest).dump_json(manifest, indent=2) + b"\n")
    return file_path
