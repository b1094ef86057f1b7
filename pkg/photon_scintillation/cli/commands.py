"""
Experiment subcommands producing result rows and run diagnostics
"""
import logging
import math
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import Field, dataclasses

from photon_scintillation.api import seeding
from photon_scintillation.api.counting import alpha
from photon_scintillation.api.exceptions import ConfigurationError, DegenerateEstimateError
from photon_scintillation.api.force_models import FrozenScreens
from photon_scintillation.api.meta import ExperimentConfig, FockStatistics, PoissonStatistics
from photon_scintillation.api.montecarlo import (estimate_scintillation_index, grid_point, realization_seed,
                                                 run_beam_spread_experiment, run_ensemble, run_scintillation_sweep,
                                                 simulate_count_statistics)
from photon_scintillation.api.propagation import BeamAnalytic
from photon_scintillation.cli.output import BEAM_SCHEMA, COUNT_SCHEMA, SCINT_SCHEMA, TableSchema
from photon_scintillation.screens.dump import write_stack

logger = logging.getLogger(__name__)


@dataclasses.dataclass
class CommandOutcome:
    """Rows of a result table with the diagnostics of the run"""

    schema: TableSchema
    rows: list[tuple] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)
    extras: dict[str, Any] = Field(default_factory=dict)
    degenerate_share: float = 0.0

    def warn(self, message: str):
        logger.warning(message)
        self.warnings.append(message)


def _check_detector(cfg: ExperimentConfig, distance: float):
    r2 = BeamAnalytic.from_config(cfg.source, cfg.turbulence).at_distance(distance)
    alpha(cfg.detector, r2)


def _check_truncation(cfg: ExperimentConfig, outcome: CommandOutcome):
    force = cfg.force
    if isinstance(force, FrozenScreens) and force.truncated(cfg.turbulence):
        outcome.warn(
            f"low-frequency truncation: screen extent {force.grid_n * force.spacing(cfg.turbulence):.4g} m "
            f"is below the outer scale {cfg.turbulence.L0} m"
        )
        outcome.extras["low_frequency_truncated"] = True


def cmd_beam(cfg: ExperimentConfig, worker_count: int = 1) -> CommandOutcome:
    """
    Beam spread versus distance, sampled and analytic
    :param cfg: Experiment
    :param worker_count: Amount of worker processes
    :return: One row per configured distance
    """
    if not cfg.distances:
        raise ConfigurationError("experiment.distances must not be empty for the beam table")
    _check_detector(cfg, max(cfg.distances))

    outcome = CommandOutcome(schema=BEAM_SCHEMA)
    _check_truncation(cfg, outcome)
    for row in run_beam_spread_experiment(cfg, worker_count=worker_count):
        outcome.rows.append(
            (row.distance, row.r2_analytic, row.variance, row.stderr, row.ratio, row.r2_turbulence)
        )
    return outcome


def cmd_scint(cfg: ExperimentConfig, worker_count: int = 1, dump_screens: Path | None = None) -> CommandOutcome:
    """
    Scintillation index on the grid of structure constants and coherence ratios
    :param cfg: Experiment with frozen screens
    :param worker_count: Amount of worker processes
    :param dump_screens: Folder receiving the screens of realization 0
    :return: One row per grid point
    """
    if not cfg.force.correlated:
        raise ConfigurationError(f"scint requires frozen screens, configured is {cfg.force!r}")
    for cn2 in cfg.sweep_cn2:
        for ratio in cfg.coherence_ratios:
            _check_detector(grid_point(cfg, cn2, ratio), cfg.path.length)

    outcome = CommandOutcome(schema=SCINT_SCHEMA)
    _check_truncation(cfg, outcome)

    if dump_screens is not None:
        seed = realization_seed(cfg.master_seed, 0)
        files = write_stack(dump_screens, cfg.force.stack(cfg.turbulence, cfg.path.length, seed))
        logger.info("Dumped %d screens of realization 0 to %s", len(files), dump_screens)
        outcome.extras["screen_dump"] = str(dump_screens)

    rows = run_scintillation_sweep(cfg, worker_count)
    degenerate = 0
    for row in rows:
        outcome.rows.append((
            row.cn2,
            row.coherence_ratio,
            row.path_length,
            row.estimate.sigma2,
            row.estimate.stderr,
            row.estimate.realizations,
        ))
        degenerate += row.estimate.degenerate
        if row.wrap_count:
            outcome.warn(f"cn2={row.cn2:g}, ratio={row.coherence_ratio:g}: {row.wrap_count} kicks on wrapped screens")

    outcome.degenerate_share = degenerate / (len(rows) * cfg.realizations)
    outcome.extras["wrap_counts"] = [row.wrap_count for row in rows]
    if degenerate:
        outcome.warn(f"{degenerate} realizations with fewer than 10 hits")
    return outcome


def cmd_count(cfg: ExperimentConfig, worker_count: int = 1) -> CommandOutcome:
    """
    Sampled and analytic photocount statistics for a Fock and a Poisson source of equal mean photon number
    :param cfg: Experiment
    :param worker_count: Amount of worker processes
    :return: One row per source kind
    """
    _check_detector(cfg, cfg.path.length)

    outcome = CommandOutcome(schema=COUNT_SCHEMA)
    _check_truncation(cfg, outcome)
    ensemble = run_ensemble(cfg, worker_count)
    probabilities = np.array([r.p_hat for r in ensemble])
    if probabilities.mean() == 0:
        raise DegenerateEstimateError("no probe photon reached the detector in any realization")

    photons = cfg.source.photon_stat.mean_photons
    fock_photons = max(1, round(photons))
    outcome.extras["fock_photons"] = fock_photons
    if fock_photons != photons:
        outcome.warn(f"Fock row uses N={fock_photons} photons against the Poisson mean {photons:g}")
    sources = (FockStatistics(photons=fock_photons), PoissonStatistics(mean_photons=photons))
    for index, photon_stat in enumerate(sources):
        comparison = simulate_count_statistics(
            photon_stat,
            probabilities,
            seeding.stream(cfg.master_seed, seeding.COUNT_STREAM, index),
        )
        outcome.rows.append((
            photon_stat.kind,
            comparison.sampled.alpha,
            comparison.sampled.mean,
            comparison.sampled.normalized_variance,
            comparison.analytic.normalized_variance,
            comparison.analytic.shot_term,
            comparison.analytic.scint_term,
            comparison.sigma2_used,
        ))
        outcome.extras[f"{photon_stat.kind}_stderr"] = comparison.stderr

    estimate = estimate_scintillation_index(ensemble, seed=cfg.master_seed)
    r2 = BeamAnalytic.from_config(cfg.source, cfg.turbulence).at_distance(cfg.path.length)
    outcome.extras.update(
        sigma2_debiased=estimate.sigma2,
        sigma2_stderr=estimate.stderr,
        alpha_beam_model=alpha(cfg.detector, r2),
    )
    outcome.degenerate_share = estimate.degenerate / estimate.realizations
    if estimate.degenerate:
        outcome.warn(f"{estimate.degenerate} realizations with fewer than 10 hits")
    wraps = sum(r.wrap_count for r in ensemble)
    if wraps:
        outcome.warn(f"{wraps} kicks on wrapped screens")
    if not math.isfinite(estimate.stderr):
        outcome.warn("standard error of sigma2 is not finite")
    return outcome
