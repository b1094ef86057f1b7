"""
Analytic photocount statistics for Fock and Poisson sources
"""
import math

from pydantic import dataclasses

from photon_scintillation.api.exceptions import DetectorValidityError, DomainError
from photon_scintillation.api.meta import (CountStats, DetectionConfig, FockStatistics, PoissonStatistics,
                                           SourceKind)

SMALL_DETECTOR_FRACTION = 0.05


@dataclasses.dataclass(frozen=True)
class NoiseTerms:
    """Normalized count variance split into its quantum and scintillation parts"""

    shot_term: float
    scint_term: float

    @property
    def total(self) -> float:
        return self.shot_term + self.scint_term


def alpha(det: DetectionConfig, r2: float) -> float:
    """
    Fraction of generated photons detected by a small detector
    :param det: Detector
    :param r2: Beam radius squared at the detector, m^2
    :return: eta_q * area / (pi R^2), scaled by exp(-r^2/R^2) for an off-axis detector
    """
    if r2 <= 0:
        raise DomainError("beam radius must be positive")
    fraction = det.detector_area / (math.pi * r2)
    if fraction > SMALL_DETECTOR_FRACTION:
        raise DetectorValidityError(
            fraction,
            f"detector covers {fraction:.3g} of the beam area, at most {SMALL_DETECTOR_FRACTION} is supported"
        )
    offset_sq = det.detector_center[0] ** 2 + det.detector_center[1] ** 2
    return det.eta_q * fraction * math.exp(-offset_sq / r2)


def mean_counts(alpha: float, photons: float) -> float:
    """Mean counts per interval for N (Fock) or mean N (Poisson) photons"""
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha={alpha} outside [0, 1]")
    return alpha * photons


def normalized_variance_fock(alpha: float, photons: int, sigma2: float) -> NoiseTerms:
    """
    Normalized count variance of a Fock source: (1 - alpha) / (alpha N) + sigma^2 (1 - 1/N)
    """
    if not 0 < alpha <= 1:
        raise DomainError(f"alpha={alpha} outside (0, 1], the mean count is zero")
    if photons < 1 or sigma2 < 0:
        raise DomainError(f"invalid photons={photons} or sigma2={sigma2}")
    return NoiseTerms(shot_term=(1 - alpha) / (alpha * photons), scint_term=sigma2 * (1 - 1 / photons))


def normalized_variance_poisson(mean_n: float, sigma2: float) -> NoiseTerms:
    """
    Normalized count variance of a Poisson source: 1 / <n> + sigma^2
    """
    if mean_n <= 0:
        raise DomainError(f"mean count {mean_n} must be positive")
    if sigma2 < 0:
        raise DomainError(f"sigma2={sigma2} must not be negative")
    return NoiseTerms(shot_term=1 / mean_n, scint_term=sigma2)


def second_factorial_moment(alpha: float, photon_stat: FockStatistics | PoissonStatistics, sigma2: float) -> float:
    """<n(n-1)> of the counts"""
    if isinstance(photon_stat, FockStatistics):
        n = photon_stat.photons
        return alpha ** 2 * n * (n - 1) * (1 + sigma2)
    return alpha ** 2 * photon_stat.mean_photons ** 2 * (1 + sigma2)


def analytic_count_stats(alpha: float, photon_stat: FockStatistics | PoissonStatistics, sigma2: float) -> CountStats:
    """
    Complete count statistics predicted for a detected fraction and scintillation index
    :param alpha: Detected fraction of generated photons
    :param photon_stat: Photon statistics of the source
    :param sigma2: Scintillation index
    :return: Count statistics with the noise decomposition
    """
    mean = mean_counts(alpha, photon_stat.mean_photons)
    if isinstance(photon_stat, FockStatistics):
        terms = normalized_variance_fock(alpha, photon_stat.photons, sigma2)
        kind = SourceKind.FOCK
    else:
        terms = normalized_variance_poisson(mean, sigma2)
        kind = SourceKind.POISSON

    return CountStats(
        mean=mean,
        variance=mean + second_factorial_moment(alpha, photon_stat, sigma2) - mean ** 2,
        normalized_variance=terms.total,
        alpha=alpha,
        shot_term=terms.shot_term,
        scint_term=terms.scint_term,
        source_kind=kind,
    )


def poisson_excess_noise(alpha: float, photons: int, sigma2: float) -> float:
    """Excess of the Poisson over the Fock normalized variance at equal mean count: alpha/<n> + sigma^2/N"""
    return alpha / mean_counts(alpha, photons) + sigma2 / photons
