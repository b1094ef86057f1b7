import math
import tempfile
from pathlib import Path

import pytest

from photon_scintillation.api.exceptions import ConfigurationError, DetectorValidityError
from photon_scintillation.api.force_models import FrozenScreens, WhiteNoiseDiffusion
from photon_scintillation.api.meta import (DetectionConfig, ExperimentConfig, FockStatistics, PathConfig,
                                           PoissonStatistics, SourceConfig, TurbulenceSpec)
from photon_scintillation.cli.commands import cmd_beam, cmd_count, cmd_scint
from photon_scintillation.cli.output import BEAM_SCHEMA, COUNT_SCHEMA, SCINT_SCHEMA
from photon_scintillation.screens.dump import read_screen


def _experiment(force=None, cn2: float = 1e-14, **kwargs) -> ExperimentConfig:
    return ExperimentConfig(**{
        "turbulence": TurbulenceSpec(cn2=cn2, l0=5e-3),
        "source": SourceConfig(r0=0.01, wavelength=0.8e-6, photon_stat=FockStatistics(photons=1_000)),
        "path": PathConfig(length=1_000.0, force=force or WhiteNoiseDiffusion(n_steps=10)),
        "detector": DetectionConfig(eta_q=1.0, detector_area=2e-5),
        "realizations": 10,
        "probes_per_realization": 2_000,
        "distances": (0.0, 1_000.0),
        "beam_photons": 2_000,
        **kwargs,
    })


def test_cmd_beam():
    outcome = cmd_beam(_experiment())
    assert outcome.schema == BEAM_SCHEMA
    assert [row[0] for row in outcome.rows] == [0.0, 1_000.0]
    assert outcome.rows[0][1] == pytest.approx(0.01 ** 2 / 2)
    assert outcome.rows[0][5] == 0.0
    assert outcome.rows[1][5] > 0
    assert all(len(row) == len(BEAM_SCHEMA.columns) for row in outcome.rows)
    assert outcome.warnings == []


def test_cmd_beam_without_turbulence_has_no_turbulence_term():
    outcome = cmd_beam(_experiment(cn2=0.0))
    assert [row[5] for row in outcome.rows] == [0.0, 0.0]


def test_cmd_beam_rejects_large_detector():
    with pytest.raises(DetectorValidityError):
        cmd_beam(_experiment(detector=DetectionConfig(eta_q=1.0, detector_area=1e-3)))


def test_cmd_beam_requires_distances():
    with pytest.raises(ConfigurationError):
        cmd_beam(_experiment(distances=()))


def test_cmd_scint_requires_frozen_screens():
    with pytest.raises(ConfigurationError):
        cmd_scint(_experiment())


def test_cmd_scint_without_turbulence():
    dump = Path(tempfile.mkdtemp(), "screens")
    cfg = _experiment(FrozenScreens(n_slabs=1, grid_n=32), cn2_values=(0.0,), coherence_ratios=(1.0,))
    outcome = cmd_scint(cfg, dump_screens=dump)

    assert outcome.schema == SCINT_SCHEMA
    [row] = outcome.rows
    assert row[:3] == (0.0, 1.0, 1_000.0)
    assert row[5] == 10
    assert abs(row[3]) < 4 * row[4]
    assert outcome.extras["low_frequency_truncated"]
    assert outcome.extras["screen_dump"] == str(dump)
    assert read_screen(dump / "slab_0000.tpsc").grid_n == 32
    assert any("wrapped screens" in warning for warning in outcome.warnings)


def test_cmd_count():
    outcome = cmd_count(_experiment())
    assert outcome.schema == COUNT_SCHEMA
    fock, poisson = outcome.rows
    assert fock[0] == "fock"
    assert poisson[0] == "poisson"
    assert fock[1] == poisson[1]
    assert fock[7] == poisson[7]
    assert poisson[4] > fock[4]
    assert fock[5] == pytest.approx((1 - fock[1]) / fock[2], rel=0.5)
    assert math.isfinite(outcome.extras["sigma2_debiased"])
    assert 0 < outcome.extras["alpha_beam_model"] < 1
    assert 0 <= outcome.degenerate_share <= 1
    assert outcome.extras["fock_photons"] == 1_000
    assert not any("Fock row" in warning for warning in outcome.warnings)


def test_cmd_count_labels_rounded_fock_photons():
    source = SourceConfig(r0=0.01, wavelength=0.8e-6, photon_stat=PoissonStatistics(mean_photons=20.5))
    outcome = cmd_count(_experiment(source=source))
    _, poisson = outcome.rows
    assert outcome.extras["fock_photons"] == 20
    assert any("Fock row uses N=20 photons against the Poisson mean 20.5" in warning for warning in outcome.warnings)
    assert poisson[0] == "poisson"
