import csv
import os
import platform
import subprocess
import tempfile
from pathlib import Path

from photon_scintillation.cli.main import main

TESTDATA = Path(os.path.dirname(os.path.abspath(__file__)), "testdata")


def data_file(name: str) -> str:
    return str(TESTDATA / name)


def run_cli(args: list[str]) -> int:
    try:
        main(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1
    return 0


def run_command(command: str, config: str, *args: str) -> Path:
    out = Path(tempfile.mkdtemp(), f"{command}.csv")
    code = run_cli([command, "--config", config, "--out", str(out), *args])
    assert code == 0, f"{command} exited with {code}"
    return out


def read_rows(path: Path) -> list[dict[str, float | str]]:
    with path.open(newline="") as file:
        return [{k: _number(v) for k, v in row.items()} for row in csv.DictReader(file)]


def _number(value: str) -> float | str:
    try:
        return float(value)
    except ValueError:
        return value


def verify_module_entrypoint(args: str = "--version"):
    output = subprocess.check_output(
        f"python{'.exe' if platform.system() == 'Windows' else ''} -m photon_scintillation {args}", shell=True,
        text=True)
    assert output != ""
