"""
Oracle checks run by `photon-scintillation validate`.

Every check compares a measured value to an independent expectation and passes
when the deviation stays within its tolerance times the tolerance scale.
"""
import logging
import math
from collections.abc import Callable
from dataclasses import replace

import numpy as np
from pydantic import dataclasses
from scipy import constants, integrate

from photon_scintillation.api import seeding
from photon_scintillation.api.counting import alpha, mean_counts, normalized_variance_fock, \
    normalized_variance_poisson, poisson_excess_noise, second_factorial_moment
from photon_scintillation.api.force_models import FrozenScreens, WhiteNoiseDiffusion
from photon_scintillation.api.meta import (DetectionConfig, ExperimentConfig, FockStatistics, PathConfig,
                                           PoissonStatistics, SourceConfig, TurbulenceModel, TurbulenceSpec)
from photon_scintillation.api.montecarlo import (estimate_scintillation_index, run_beam_spread_experiment,
                                                 run_ensemble, simulate_count_statistics,
                                                 synthetic_probability_ensemble)
from photon_scintillation.api.propagation import BeamAnalytic, beam_radius_squared, mean_intensity, \
    propagate_diffusive
from photon_scintillation.api.source import (mode_amplitude, reduced_radius_sq, sample_initial_photon,
                                             sample_interval_photon_count, sample_tilt)
from photon_scintillation.api.turbulence import (PhaseScreen, SynthesizedScreenStack, discrete_screen_variance,
                                                 force_diffusion_coefficient, screen_kick, spectrum_psi,
                                                 structure_function, synthesize_screen, turbulence_T)

logger = logging.getLogger(__name__)

WAVELENGTH = 0.8e-6
R0 = 0.01
STANDARD_TURBULENCE = TurbulenceSpec(cn2=1e-14, l0=5e-3)


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """Outcome of one oracle check"""

    name: str
    measured: float
    expected: float
    deviation: float
    tolerance: float
    passed: bool

    def report_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: measured={self.measured:.6g} expected={self.expected:.6g} "
                f"deviation={self.deviation:.3g} tolerance={self.tolerance:.3g}")


class OracleSuite:
    """
    Collects check results, scaling every tolerance by `tolerance_scale`
    """

    def __init__(self, seed: int = 0, worker_count: int = 1, tolerance_scale: float = 1.0):
        self.seed = seed
        self.worker_count = worker_count
        self.tolerance_scale = tolerance_scale
        self.results: list[CheckResult] = []

    def rng(self, index: int) -> np.random.Generator:
        return seeding.stream(self.seed, 1000 + index)

    def derive(self, *key: int) -> int:
        return seeding.derive_seed(self.seed, 2000, *key)

    def _record(self, name: str, measured: float, expected: float, deviation: float, tolerance: float):
        tolerance = tolerance * self.tolerance_scale
        result = CheckResult(
            name=name,
            measured=float(measured),
            expected=float(expected),
            deviation=float(deviation),
            tolerance=float(tolerance),
            passed=bool(deviation <= tolerance),
        )
        logger.debug(result.report_line())
        self.results.append(result)

    def relative(self, name: str, measured: float, expected: float, tolerance: float):
        self._record(name, measured, expected, abs(measured - expected) / abs(expected), tolerance)

    def absolute(self, name: str, measured: float, expected: float, tolerance: float):
        self._record(name, measured, expected, abs(measured - expected), tolerance)

    def within_errors(self, name: str, measured: float, expected: float, stderr: float, errors: float = 3.0):
        self._record(name, measured, expected, abs(measured - expected), errors * stderr)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)


def _source(lambda_c: float = math.inf) -> SourceConfig:
    return SourceConfig(r0=R0, wavelength=WAVELENGTH, photon_stat=FockStatistics(photons=100), lambda_c=lambda_c)


def check_turbulence(suite: OracleSuite):
    von_karman = TurbulenceSpec(cn2=1e-14, l0=5e-3, L0=10.0)
    suite.relative("spectrum_psi von Karman at g=1", spectrum_psi(von_karman, 1.0), 3.24e-16, 0.01)
    suite.relative("turbulence_T", turbulence_T(STANDARD_TURBULENCE), 3.26e-14, 0.01)
    q0 = 2 * math.pi / WAVELENGTH
    suite.relative("force_diffusion_coefficient", force_diffusion_coefficient(3.26e-14, q0), 1.81e9, 0.01)

    h = 1e-3
    small = TurbulenceSpec(cn2=1e-13, l0=2 * h, L0=4 * h)
    samples = [synthesize_screen(small, 64, h, 10.0, suite.derive(1, i)) for i in range(300)]
    variance = float(np.mean([np.mean(s ** 2) for s in samples]))
    suite.relative("screen variance vs spectral sum", variance, discrete_screen_variance(small, 64, h, 10.0), 0.05)

    inertial = TurbulenceSpec(cn2=1e-13, l0=2 * h, model=TurbulenceModel.TATARSKII)
    stack = SynthesizedScreenStack(inertial, 16, 10.0, 512, h, suite.derive(2))
    lags = np.array([8, 12, 16, 24, 32])
    functions = np.mean([structure_function(screen.with_tilt_ramp(), lags) for screen in stack], axis=0)
    slope = float(np.polyfit(np.log(lags), np.log(functions), 1)[0])
    suite.absolute("structure function exponent", slope, 5 / 3, 0.15)

    screen = PhaseScreen(field=samples[0], spacing=h)
    rng = suite.rng(0)
    positions = rng.uniform(-32 * h, 32 * h, (2, 10_000))
    kicks, _ = screen_kick(screen, positions[0], positions[1], q0)
    suite.within_errors("screen kick mean", kicks.mean(), 0.0, kicks.std(ddof=1) / math.sqrt(kicks.size))


def check_source(suite: OracleSuite):
    lambda_c = 0.02
    tilts = sample_tilt(lambda_c, suite.rng(1), size=400_000)
    suite.relative("tilt variance", tilts[:, 0].var(), 2 / lambda_c ** 2, 0.02)
    suite.relative("tilt characteristic function at lambda_c", np.cos(tilts[:, 0] * lambda_c).mean(), math.exp(-1),
                   0.01)

    cfg = _source(lambda_c)
    rng = suite.rng(2)
    state = sample_initial_photon(cfg, sample_tilt(lambda_c, rng, size=100_000), rng, size=100_000)
    suite.relative("initial position variance", state.x.var(), R0 ** 2 / 4, 0.02)
    suite.relative("initial momentum variance", state.qx.var(), 1 / reduced_radius_sq(R0, lambda_c), 0.02)

    def density(u, v, w):
        return (mode_amplitude(cfg, u * R0, v * R0, cfg.z0 + w * cfg.rz) ** 2) * R0 ** 2 * cfg.rz

    norm, _ = integrate.tplquad(density, -6, 6, -6, 6, -6, 6, epsabs=1e-10)
    suite.absolute("mode normalization", norm, 1.0, 1e-6)

    counts = sample_interval_photon_count(PoissonStatistics(mean_photons=10), suite.rng(3), size=10_000)
    suite.relative("Poisson photon number mean", counts.mean(), 10.0, 0.05)
    suite.relative("Poisson photon number variance", counts.var(ddof=1), 10.0, 0.05)


def check_propagation(suite: OracleSuite):
    q0 = 2 * math.pi / WAVELENGTH
    t_z = 10_000 / constants.c
    T = turbulence_T(STANDARD_TURBULENCE)
    suite.relative("R^2 diffraction only at 10 km", beam_radius_squared(t_z, R0, R0, q0, 0.0), 0.0325, 0.01)
    suite.relative("R^2 with turbulence at 10 km", beam_radius_squared(t_z, R0, R0, q0, T), 0.163, 0.01)

    beam = BeamAnalytic.from_config(_source(), STANDARD_TURBULENCE)
    r2 = beam.at_distance(10_000)
    width = beam.rz / constants.c
    fluence, _ = integrate.quad(
        lambda t: mean_intensity(beam, 0.0, 0.0, 10_000, t),
        t_z - 8 * width, t_z + 8 * width, points=[t_z], epsabs=0,
    )
    suite.relative("pulse fluence on axis", fluence, constants.hbar * beam.omega0 / (math.pi * r2), 1e-3)

    d_f = force_diffusion_coefficient(T, q0)
    rng = suite.rng(4)
    source = _source()
    start = sample_initial_photon(source, np.zeros(2), rng, size=100_000)
    end = propagate_diffusive(start, 10_000, d_f, rng)
    variance = (end.x.var() + end.y.var()) / 2
    suite.relative("diffusive per-axis variance at 10 km", variance, r2 / 2, 0.02)
    gain = (end.qx.var() + end.qy.var()) / 2 - 1 / R0 ** 2
    suite.relative("diffusive momentum variance gain", gain, 2 * d_f * 10_000 / constants.c, 0.02)


def _experiment(force, cn2: float, length: float, realizations: int, probes: int, seed: int, **detector):
    return ExperimentConfig(
        turbulence=TurbulenceSpec(cn2=cn2, l0=5e-3),
        source=_source(),
        path=PathConfig(length=length, force=force),
        detector=DetectionConfig(**{"eta_q": 1.0, "detector_area": math.pi * 0.01 ** 2, **detector}),
        realizations=realizations,
        probes_per_realization=probes,
        master_seed=seed,
        beam_photons=100_000,
    )


def check_montecarlo(suite: OracleSuite):
    diffusion = _experiment(WhiteNoiseDiffusion(), 1e-14, 10_000, 50, 1_000, suite.seed)
    beam = run_beam_spread_experiment(diffusion, distances=(0.0, 10_000.0), worker_count=suite.worker_count)
    suite.within_errors("beam spread at distance 0", beam[0].variance, R0 ** 2 / 4, beam[0].stderr)
    suite.relative("diffusive beam spread at 10 km", beam[1].variance, beam[1].r2_analytic / 2, 0.02)

    # beam wander is shared by all photons of a realization
    screens = _experiment(FrozenScreens(n_slabs=16), 1e-14, 5_000, 400, 1_000, suite.seed)
    frozen = run_beam_spread_experiment(screens, distances=(5_000.0,), worker_count=suite.worker_count)
    suite.relative("frozen screen beam spread at 5 km", frozen[0].variance, frozen[0].r2_analytic / 2, 0.05)

    coherent = _experiment(WhiteNoiseDiffusion(), 0.0, 10_000, 20, 1_000, suite.seed)
    partial = replace(coherent, source=_source(lambda_c=0.01))
    measured = [run_beam_spread_experiment(c, distances=(10_000.0,), worker_count=suite.worker_count)[0].variance
                for c in (partial, coherent)]
    suite.relative("coherence variance ratio at cn2=0", measured[0] / measured[1],
                   R0 ** 2 / reduced_radius_sq(R0, 0.01), 0.03)

    vacuum = _experiment(FrozenScreens(n_slabs=1, grid_n=64), 0.0, 1_000, 40, 20_000, suite.seed)
    ensemble = run_ensemble(vacuum, suite.worker_count)
    hits = np.array([r.hits for r in ensemble])
    r2 = BeamAnalytic.from_config(vacuum.source, vacuum.turbulence).at_distance(1_000)
    mass = 1 - math.exp(-vacuum.detector.detector_area / (math.pi * r2))
    p = hits.sum() / (vacuum.probes_per_realization * len(ensemble))
    suite.within_errors("detection probability without turbulence", p, mass,
                        math.sqrt(mass * (1 - mass) / (vacuum.probes_per_realization * len(ensemble))))
    estimate = estimate_scintillation_index(ensemble, seed=suite.seed)
    suite.within_errors("scintillation index without turbulence", estimate.sigma2, 0.0, estimate.stderr)

    white = _experiment(WhiteNoiseDiffusion(n_steps=20), 1e-14, 1_000, 40, 20_000, suite.seed)
    estimate = estimate_scintillation_index(run_ensemble(white, suite.worker_count), seed=suite.seed)
    suite.within_errors("scintillation index of white-noise force", estimate.sigma2, 0.0, estimate.stderr)


def check_counting(suite: OracleSuite):
    cases = [(0.1, 100, 0.5), (0.02, 10, 0.0), (0.5, 3, 1.2), (1.0, 1, 0.3)]
    for a, n, sigma2 in cases:
        fock = normalized_variance_fock(a, n, sigma2).total
        poisson = normalized_variance_poisson(a * n, sigma2).total
        suite.relative(f"Poisson excess noise alpha={a} N={n} sigma2={sigma2}", poisson - fock,
                       poisson_excess_noise(a, n, sigma2), 1e-12)

    detector = DetectionConfig(eta_q=0.5, detector_area=math.pi * 0.05 ** 2)
    suite.relative("alpha at R^2=0.163", alpha(detector, 0.163), 7.67e-3, 1e-3)
    suite.relative("mean counts at R^2=0.163 for N=10^4", mean_counts(alpha(detector, 0.163), 10_000), 76.7, 1e-3)

    rng = suite.rng(5)
    probabilities = synthetic_probability_ensemble(0.1, 0.5, 10_000, rng)
    fock = simulate_count_statistics(FockStatistics(photons=100), probabilities, rng)
    suite.within_errors("Fock mixture normalized variance", fock.sampled.normalized_variance, 0.585, fock.stderr)
    poisson = simulate_count_statistics(PoissonStatistics(mean_photons=100), probabilities, rng)
    suite.within_errors("Poisson mixture normalized variance", poisson.sampled.normalized_variance, 0.6,
                        poisson.stderr)

    constant = simulate_count_statistics(FockStatistics(photons=100), np.full(10_000, 0.1), rng)
    suite.within_errors("Fock binomial normalized variance", constant.sampled.normalized_variance, 0.9 / 10,
                        constant.stderr)

    for photon_stat in (FockStatistics(photons=100), PoissonStatistics(mean_photons=100)):
        counts = rng.binomial(sample_interval_photon_count(photon_stat, rng, size=probabilities.size), probabilities)
        pairs = counts * (counts - 1.0)
        sigma2 = probabilities.var() / probabilities.mean() ** 2
        suite.within_errors(f"second factorial moment {type(photon_stat).__name__}", float(pairs.mean()),
                            second_factorial_moment(float(probabilities.mean()), photon_stat, sigma2),
                            float(pairs.std(ddof=1)) / math.sqrt(pairs.size), errors=4.0)

    p = probabilities
    total_variance = 100 * np.mean(p * (1 - p)) + 100 ** 2 * p.var(ddof=1)
    suite.within_errors("law of total variance", fock.sampled.variance, total_variance,
                        fock.stderr * fock.sampled.mean ** 2)


CHECKS: list[Callable[[OracleSuite], None]] = [
    check_turbulence,
    check_source,
    check_propagation,
    check_counting,
    check_montecarlo,
]


def run_validation(seed: int = 0, worker_count: int = 1, tolerance_scale: float = 1.0) -> OracleSuite:
    """
    Run all oracle checks
    :param seed: Seed of all random draws
    :param worker_count: Amount of worker processes for the ensemble checks
    :param tolerance_scale: Factor applied to every tolerance
    :return: Suite holding all results
    """
    suite = OracleSuite(seed=seed, worker_count=worker_count, tolerance_scale=tolerance_scale)
    for check in CHECKS:
        logger.info("Running %s", check.__name__)
        check(suite)
    return suite
