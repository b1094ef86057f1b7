import json
import math
from pathlib import Path
from typing import Any

from pydantic import TypeAdapter, ValidationError

from photon_scintillation.api.exceptions import ConfigurationError
from photon_scintillation.api.meta import ExperimentConfig
from photon_scintillation.cli.yaml import load_file

SECTIONS = ("turbulence", "source", "path", "detector", "experiment")
_NON_FINITE = {"Infinity": math.inf, "-Infinity": -math.inf, "NaN": math.nan}


def _restore_non_finite(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _restore_non_finite(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_restore_non_finite(v) for v in value]
    if isinstance(value, str) and value in _NON_FINITE:
        return _NON_FINITE[value]
    return value


def experiment_from_sections(data: dict) -> ExperimentConfig:
    """
    Validate the sectioned representation of an experiment
    :param data: Mapping with the sections turbulence, source, path, detector and experiment
    :return: Validated experiment
    """
    data = {k: v for k, v in data.items() if k[0] != "."}
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigurationError(f"Unknown config sections {unknown}, expected {list(SECTIONS)}")

    experiment = data.pop("experiment", None) or {}
    if not isinstance(experiment, dict):
        raise ConfigurationError("Section experiment must be a mapping")
    overlap = sorted(set(experiment) & set(SECTIONS))
    if overlap:
        raise ConfigurationError(f"Section experiment must not contain {overlap}")

    try:
        return ExperimentConfig(**data, **experiment)
    except ValidationError as e:
        raise ConfigurationError(f"Failed to deserialize experiment config: {str(e)}") from e
    except TypeError as e:
        raise ConfigurationError(f"Failed to deserialize experiment config: {str(e)}") from e


def experiment_to_sections(config: ExperimentConfig) -> dict:
    """
    Snapshot of an experiment in the sectioned config layout, with non-finite floats as strings
    """
    flat = json.loads(TypeAdapter(ExperimentConfig).dump_json(config))
    sections = {name: flat.pop(name) for name in SECTIONS if name != "experiment"}
    sections["experiment"] = flat
    return sections


def load_experiment_config(file_path: Path) -> ExperimentConfig:
    """
    Load an experiment from a YAML config or from the manifest of a previous run
    :param file_path: YAML config or `<out>.manifest.json`
    :return: Validated experiment
    """
    if file_path.suffix == ".json":
        data = json.loads(file_path.read_text())
        data = _restore_non_finite(data.get("config", data)) if isinstance(data, dict) else data
    else:
        data = load_file(file_path)

    if data is None:
        raise ConfigurationError("Config file can not be empty")
    if not isinstance(data, dict):
        raise ConfigurationError("Config file must contain a mapping of sections")

    return experiment_from_sections(data)
