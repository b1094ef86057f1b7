"""
Single-photon pulse source: aperture mode, transmitter phase screen and phase-space sampling
"""
import math

import numpy as np

from photon_scintillation.api.exceptions import DomainError
from photon_scintillation.api.meta import FockStatistics, PhotonState, PoissonStatistics, SourceConfig


def reduced_radius_sq(r0: float, lambda_c: float) -> float:
    """
    Partial-coherence radius squared r1^2 = r0^2 / (1 + 2 r0^2 / lambda_c^2)
    :param r0: Aperture radius, m
    :param lambda_c: Coherence length, m, infinite for a coherent source
    :return: r1^2, m^2
    """
    if r0 <= 0 or lambda_c <= 0:
        raise DomainError("aperture radius and coherence length must be positive")
    if math.isinf(lambda_c):
        return r0 ** 2
    return r0 ** 2 / (1 + 2 * r0 ** 2 / lambda_c ** 2)


def coherence_length_for_ratio(r0: float, ratio: float) -> float:
    """
    Coherence length giving (r1/r0)^2 = ratio
    :param r0: Aperture radius, m
    :param ratio: Target (r1/r0)^2 in (0, 1]
    :return: Coherence length, m, infinite for ratio 1
    """
    if r0 <= 0 or not 0 < ratio <= 1:
        raise DomainError(f"no coherence length for r0={r0}, ratio={ratio}")
    if ratio == 1:
        return math.inf
    return r0 * math.sqrt(2 * ratio / (1 - ratio))


def sample_tilt(lambda_c: float, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """
    Draw phase-screen tilts with per-component variance 2 / lambda_c^2
    :param lambda_c: Coherence length, m
    :param rng: Random stream
    :param size: Number of tilts, None for a single tilt
    :return: Array of shape (2,) or (size, 2), m^-1
    """
    if lambda_c <= 0:
        raise DomainError("coherence length must be positive")
    shape = (2,) if size is None else (size, 2)
    if math.isinf(lambda_c):
        return np.zeros(shape)
    return rng.normal(0.0, math.sqrt(2) / lambda_c, shape)


def sample_initial_photon(
        cfg: SourceConfig,
        tilt: np.ndarray,
        rng: np.random.Generator,
        size: int = 1,
) -> PhotonState:
    """
    Sample photons at the transmitter.

    Positions have per-axis variance r0^2/4, momenta a Gaussian with per-axis variance 1/r0^2 plus the tilt.
    With tilts drawn from `sample_tilt` the momentum variance over pulses is 1/r1^2.

    :param cfg: Source
    :param tilt: Tilt of shape (2,) shared by all photons or (size, 2), m^-1
    :param rng: Random stream
    :param size: Number of photons
    :return: Photon state at z0, t0
    """
    tilt = np.broadcast_to(np.asarray(tilt, dtype=float), (size, 2))
    position = rng.normal(0.0, cfg.r0 / 2, (2, size))
    momentum = rng.normal(0.0, 1 / cfg.r0, (2, size))
    return PhotonState(
        x=position[0],
        y=position[1],
        qx=momentum[0] + tilt[:, 0],
        qy=momentum[1] + tilt[:, 1],
        z=np.full(size, cfg.z0),
        t=np.full(size, cfg.t0),
        qz=cfg.q0,
    ).check_paraxial()


def mode_amplitude(cfg: SourceConfig, x, y, z):
    """
    Normalized Gaussian pulse mode at the transmitter, m^(-3/2)
    """
    r_sq = np.asarray(x) ** 2 + np.asarray(y) ** 2
    peak = (2 / math.pi) ** 0.75 / math.sqrt(cfg.r0 ** 2 * cfg.rz)
    return peak * np.exp(-r_sq / cfg.r0 ** 2 - (np.asarray(z) - cfg.z0) ** 2 / cfg.rz ** 2)


def sample_interval_photon_count(
        cfg: SourceConfig | FockStatistics | PoissonStatistics,
        rng: np.random.Generator,
        size: int | None = None,
) -> int | np.ndarray:
    """
    Draw the number of photons emitted in counting intervals
    :param cfg: Source or its photon statistics
    :param rng: Random stream
    :param size: Number of intervals, None for a single interval
    :return: Photon numbers
    """
    stat = cfg.photon_stat if isinstance(cfg, SourceConfig) else cfg
    if isinstance(stat, FockStatistics):
        return stat.photons if size is None else np.full(size, stat.photons, dtype=np.int64)
    counts = rng.poisson(stat.mean_photons, size)
    return int(counts) if size is None else counts
