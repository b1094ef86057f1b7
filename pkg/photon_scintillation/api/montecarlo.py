"""
Monte Carlo ensembles of frozen atmosphere realizations
"""
import concurrent.futures
import dataclasses
import logging
import os
from collections.abc import Callable, Sequence
from typing import TypeVar

import numpy as np

from photon_scintillation.api import seeding
from photon_scintillation.api.counting import analytic_count_stats
from photon_scintillation.api.exceptions import DegenerateEstimateError, DomainError, SimulationException
from photon_scintillation.api.meta import (BeamSpreadRow, CountComparison, CountStats, ExperimentConfig,
                                           FockStatistics, PoissonStatistics, RealizationResult,
                                           ScintillationEstimate, ScintillationRow, SourceKind, SPEED_OF_LIGHT,
                                           TiltMode)
from photon_scintillation.api.propagation import BeamAnalytic
from photon_scintillation.api.source import (coherence_length_for_ratio, sample_initial_photon,
                                             sample_interval_photon_count, sample_tilt)

logger = logging.getLogger(__name__)

BOOTSTRAP_RESAMPLES = 500
MIN_REALIZATIONS_FOR_ERRORS = 30

T = TypeVar("T")


def realization_seed(master_seed: int, index: int) -> int:
    """Seed of one realization, derived from the master seed only"""
    return seeding.derive_seed(master_seed, index)


def _map_ordered(function: Callable[..., T], arguments: Sequence[tuple], worker_count: int = 1) -> list[T]:
    if worker_count == 1 or len(arguments) < 2:
        return [function(*args) for args in arguments]

    with concurrent.futures.ProcessPoolExecutor(max_workers=worker_count) as executor:
        futures = [executor.submit(function, *args) for args in arguments]
        results = []
        for future in futures:
            if future.exception() is not None:
                raise SimulationException(
                    "Unexpected error has occurred in a worker. Ensure the experiment is configured correctly"
                ) from future.exception()
            results.append(future.result())
        return results


def _detector_mask(cfg: ExperimentConfig, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    cx, cy = cfg.detector.detector_center
    return (x - cx) ** 2 + (y - cy) ** 2 <= cfg.detector.radius ** 2


def _trace(cfg: ExperimentConfig, seed: int, rng: np.random.Generator, photons: int):
    if cfg.tilt_mode is TiltMode.PER_PULSE:
        tilt = sample_tilt(cfg.source.lambda_c, rng, size=photons)
    else:
        tilt = sample_tilt(cfg.source.lambda_c, rng)
    state = sample_initial_photon(cfg.source, tilt, rng, size=photons)
    return cfg.force.propagate(state, cfg.path.length, cfg.turbulence, seed, rng)


def estimate_detection_probability(realization: int, cfg: ExperimentConfig) -> RealizationResult:
    """
    Trace the probe photons of one realization through its frozen atmosphere
    :param realization: Realization index
    :param cfg: Experiment
    :return: Detection probability estimate of the realization
    """
    seed = realization_seed(cfg.master_seed, realization)
    probes = cfg.probes_per_realization
    result = _trace(cfg, seed, seeding.stream(seed, seeding.PHOTON_STREAM), probes)

    hits = int(np.count_nonzero(_detector_mask(cfg, result.state.x, result.state.y)))
    outcome = RealizationResult(
        index=realization,
        p_hat=cfg.detector.eta_q * hits / probes,
        hits=hits,
        probes=probes,
        eta_q=cfg.detector.eta_q,
        wrap_count=result.wrap_count,
    )
    if outcome.degenerate:
        logger.debug("Realization %d is degenerate with %d hits", realization, hits)
    return outcome


def run_ensemble(cfg: ExperimentConfig, worker_count: int = 1) -> list[RealizationResult]:
    """
    Estimate the detection probability for every realization of an experiment.

    Realizations run in parallel, results are returned in realization order.

    :param cfg: Experiment
    :param worker_count: Amount of worker processes, 0 for one per CPU
    :return: Results ordered by realization index
    """
    worker_count = worker_count or os.cpu_count()
    return _map_ordered(
        estimate_detection_probability,
        [(index, cfg) for index in range(cfg.realizations)],
        worker_count,
    )


def _normalized_variance(p: np.ndarray, noise: np.ndarray) -> np.ndarray:
    mean = p.mean(axis=-1)
    variance = p.var(axis=-1, ddof=1) - noise.mean(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return variance / mean ** 2


def estimate_scintillation_index(
        ensemble: Sequence[RealizationResult],
        seed: int = 0,
        resamples: int = BOOTSTRAP_RESAMPLES,
) -> ScintillationEstimate:
    """
    Scintillation index as the normalized variance of the detection probability over realizations.

    The binomial noise of every estimate, p (eta_q - p) / (probes - 1), is subtracted before normalizing.

    :param ensemble: Realization results
    :param seed: Seed of the bootstrap stream
    :param resamples: Bootstrap resamples of the standard error
    :return: Debiased scintillation index with bootstrap standard error
    """
    if len(ensemble) < 2:
        raise DomainError("at least two realizations are required")
    if len(ensemble) < MIN_REALIZATIONS_FOR_ERRORS:
        logger.warning("Standard error from %d realizations is unreliable", len(ensemble))

    p = np.array([r.p_hat for r in ensemble])
    noise = np.array([r.p_hat * (r.eta_q - r.p_hat) / (r.probes - 1) for r in ensemble])
    mean = float(p.mean())
    if mean == 0:
        raise DegenerateEstimateError("mean detection probability is zero")

    sigma2 = float(_normalized_variance(p, noise))
    rng = seeding.stream(seed, seeding.BOOTSTRAP_STREAM)
    picks = rng.integers(0, len(p), (resamples, len(p)))
    replicas = _normalized_variance(p[picks], noise[picks])

    return ScintillationEstimate(
        sigma2=sigma2,
        stderr=float(np.nanstd(replicas, ddof=1)),
        mean_p=mean,
        realizations=len(p),
        degenerate=sum(1 for r in ensemble if r.degenerate),
    )


def synthetic_probability_ensemble(alpha: float, sigma2: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """
    Detection probabilities with mean alpha and normalized variance sigma^2 drawn from a gamma law
    :param alpha: Mean detection probability
    :param sigma2: Normalized variance
    :param size: Number of intervals
    :param rng: Random stream
    :return: Probabilities clipped to [0, 1]
    """
    if not 0 <= alpha <= 1 or sigma2 < 0:
        raise DomainError(f"invalid alpha={alpha} or sigma2={sigma2}")
    if sigma2 == 0:
        return np.full(size, alpha)
    return np.clip(alpha * rng.gamma(1 / sigma2, sigma2, size), 0.0, 1.0)


def _sampled_stats(counts: np.ndarray, alpha: float, kind: SourceKind) -> CountStats:
    mean = float(counts.mean())
    variance = float(counts.var(ddof=1))
    normalized = variance / mean ** 2
    shot = (1 - alpha) / mean if kind is SourceKind.FOCK else 1 / mean
    return CountStats(
        mean=mean,
        variance=variance,
        normalized_variance=normalized,
        alpha=alpha,
        shot_term=shot,
        scint_term=normalized - shot,
        source_kind=kind,
    )


def simulate_count_statistics(
        photon_stat: FockStatistics | PoissonStatistics,
        probabilities: Sequence[float],
        rng: np.random.Generator,
        resamples: int = 200,
) -> CountComparison:
    """
    Sample photocounts of counting intervals whose pulses share one detection probability.

    Every interval draws its photon number N from the source statistics and counts n ~ Binomial(N, p).

    :param photon_stat: Photon statistics of the source
    :param probabilities: Per-photon detection probability of every interval
    :param rng: Random stream
    :param resamples: Bootstrap resamples of the standard error
    :return: Sampled statistics next to the analytic prediction for the sampled alpha and sigma^2
    """
    p = np.asarray(probabilities, dtype=float)
    if p.size < 2:
        raise DomainError("at least two intervals are required")

    photons = sample_interval_photon_count(photon_stat, rng, size=p.size)
    counts = rng.binomial(photons, p)
    if counts.sum() == 0:
        raise DegenerateEstimateError("no photon was counted in any interval")

    alpha = float(p.mean())
    sigma2 = float(p.var(ddof=1)) / alpha ** 2
    kind = SourceKind.FOCK if isinstance(photon_stat, FockStatistics) else SourceKind.POISSON

    picks = rng.integers(0, counts.size, (resamples, counts.size))
    replicas = counts[picks]
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = replicas.var(axis=1, ddof=1) / replicas.mean(axis=1) ** 2

    return CountComparison(
        sampled=_sampled_stats(counts, alpha, kind),
        analytic=analytic_count_stats(alpha, photon_stat, sigma2),
        sigma2_used=sigma2,
        stderr=float(np.nanstd(normalized, ddof=1)),
        intervals=int(counts.size),
    )


def retrace_interval_counts(cfg: ExperimentConfig, realization: int, intervals: int = 1) -> np.ndarray:
    """
    Count photons of whole counting intervals by tracing every pulse through the realization's screens.

    Cross-checks the shared-probability sampling of `simulate_count_statistics` on small cases.

    :param cfg: Experiment
    :param realization: Realization whose frozen atmosphere is crossed
    :param intervals: Counting intervals in this realization
    :return: Counts of every interval
    """
    seed = realization_seed(cfg.master_seed, realization)
    rng = seeding.stream(seed, seeding.RETRACE_STREAM)
    counts = np.zeros(intervals, dtype=np.int64)
    for interval in range(intervals):
        photons = int(sample_interval_photon_count(cfg.source, rng))
        if photons == 0:
            continue
        result = _trace(cfg, seed, rng, photons)
        hits = _detector_mask(cfg, result.state.x, result.state.y)
        counts[interval] = int(np.count_nonzero(hits & (rng.random(photons) < cfg.detector.eta_q)))
    return counts


def _beam_spread_chunk(cfg: ExperimentConfig, distance: float, seed: int, photons: int) -> tuple[int, float]:
    rng = seeding.stream(seed, seeding.PHOTON_STREAM)
    tilt = sample_tilt(cfg.source.lambda_c, rng, size=photons)
    state = sample_initial_photon(cfg.source, tilt, rng, size=photons)
    if distance > 0:
        state = cfg.force.propagate(state, distance, cfg.turbulence, seed, rng).state
    return photons, float(np.sum(state.x ** 2) + np.sum(state.y ** 2))


def run_beam_spread_experiment(
        cfg: ExperimentConfig,
        distances: Sequence[float] | None = None,
        photons: int | None = None,
        worker_count: int = 1,
) -> list[BeamSpreadRow]:
    """
    Sample the per-axis beam variance at several distances and pair it with the analytic beam radius.

    Photons of one distance are split over the realizations, photons of one realization share its screens.

    :param cfg: Experiment
    :param distances: Distances, m. Defaults to the configured distances
    :param photons: Photons per distance. Defaults to the configured beam photons
    :param worker_count: Amount of worker processes, 0 for one per CPU
    :return: One row per distance
    """
    distances = cfg.distances if distances is None else tuple(distances)
    photons = cfg.beam_photons if photons is None else photons
    worker_count = worker_count or os.cpu_count()
    chunks = np.full(cfg.realizations, photons // cfg.realizations)
    chunks[: photons % cfg.realizations] += 1

    arguments = [
        (cfg, distance, seeding.derive_seed(cfg.master_seed, seeding.BEAM_STREAM, d_index, r_index), int(size))
        for d_index, distance in enumerate(distances)
        for r_index, size in enumerate(chunks)
        if size > 0
    ]
    results = iter(_map_ordered(_beam_spread_chunk, arguments, worker_count))

    beam = BeamAnalytic.from_config(cfg.source, cfg.turbulence)
    rows = []
    for distance in distances:
        chunk_results = [next(results) for size in chunks if size > 0]
        counts = np.array([n for n, _ in chunk_results], dtype=float)
        sums = np.array([s for _, s in chunk_results])
        variance = float(sums.sum() / (2 * counts.sum()))
        per_chunk = sums / (2 * counts)
        stderr = float(np.std(per_chunk, ddof=1) / np.sqrt(len(per_chunk))) if len(per_chunk) > 1 else float("nan")
        rows.append(BeamSpreadRow(
            distance=float(distance),
            r2_analytic=beam.at_distance(distance),
            r2_turbulence=beam.turbulence_term(distance / SPEED_OF_LIGHT),
            variance=variance,
            stderr=stderr,
        ))
    return rows


def run_scintillation_sweep(cfg: ExperimentConfig, worker_count: int = 1) -> list[ScintillationRow]:
    """
    Estimate the scintillation index on the grid of structure constants and coherence ratios.

    Every grid point reuses the master seed, so all points share their screen seeds.

    :param cfg: Experiment with a correlated force model
    :param worker_count: Amount of worker processes, 0 for one per CPU
    :return: Rows ordered by structure constant, then by coherence ratio as configured
    """
    rows = []
    for cn2 in cfg.sweep_cn2:
        for ratio in cfg.coherence_ratios:
            point = grid_point(cfg, cn2, ratio)
            ensemble = run_ensemble(point, worker_count)
            rows.append(ScintillationRow(
                cn2=cn2,
                coherence_ratio=ratio,
                path_length=cfg.path.length,
                estimate=estimate_scintillation_index(ensemble, seed=cfg.master_seed),
                wrap_count=sum(r.wrap_count for r in ensemble),
            ))
    return rows


def grid_point(cfg: ExperimentConfig, cn2: float, coherence_ratio: float) -> ExperimentConfig:
    """Experiment for one structure constant and (r1/r0)^2"""
    return dataclasses.replace(
        cfg,
        turbulence=dataclasses.replace(cfg.turbulence, cn2=cn2),
        source=dataclasses.replace(
            cfg.source,
            lambda_c=coherence_length_for_ratio(cfg.source.r0, coherence_ratio),
        ),
    )
