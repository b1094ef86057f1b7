import json
import math
import tempfile
from pathlib import Path

import pytest

from photon_scintillation.cli.output import (BEAM_SCHEMA, COUNT_SCHEMA, RunManifest, TableSchema, format_value,
                                             manifest_path, write_csv, write_manifest)


@pytest.mark.parametrize(["value", "expected"], [
    [0.1, "0.1"],
    [1 / 3, "0.333333333333"],
    [1e-14, "1e-14"],
    [5000.0, "5000"],
    [math.inf, "inf"],
    [-math.inf, "-inf"],
    [math.nan, "nan"],
    [True, "true"],
    [12, "12"],
    ["fock", "fock"],
])
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_schema_identifier():
    assert BEAM_SCHEMA.identifier == "beam/1"
    assert COUNT_SCHEMA.columns[0] == "source_kind"


def test_write_csv():
    out = Path(tempfile.mkdtemp(), "table.csv")
    schema = TableSchema(name="test", version=2, columns=("a", "b"))
    write_csv(out, schema, [(1, 0.5), ("x", math.inf)])
    assert out.read_bytes() == b"a,b\n1,0.5\nx,inf\n"


def test_write_csv_rejects_short_rows():
    out = Path(tempfile.mkdtemp(), "table.csv")
    with pytest.raises(ValueError):
        write_csv(out, BEAM_SCHEMA, [(0.0, 1.0)])


def test_write_manifest():
    out = Path(tempfile.mkdtemp(), "beam.csv")
    manifest = RunManifest(
        command="beam",
        tool_version="1.0.0",
        master_seed=3,
        config={"turbulence": {"L0": "Infinity"}},
        csv_schema=BEAM_SCHEMA.identifier,
        columns=list(BEAM_SCHEMA.columns),
        workers=2,
        runtime_seconds=1.5,
        warnings=["low-frequency truncation"],
        extras={"stderr": math.inf},
    )
    written = write_manifest(out, manifest)
    assert written == manifest_path(out)
    assert written.name == "beam.csv.manifest.json"

    data = json.loads(written.read_text())
    assert data["command"] == "beam"
    assert data["master_seed"] == 3
    assert data["csv_schema"] == "beam/1"
    assert data["warnings"] == ["low-frequency truncation"]
    assert data["extras"] == {"stderr": "Infinity"}
