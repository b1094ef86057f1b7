"""
API surface for using the package with python code
"""

import photon_scintillation.api.force_models
from photon_scintillation.api.counting import (alpha, analytic_count_stats, mean_counts, normalized_variance_fock,
                                               normalized_variance_poisson, poisson_excess_noise,
                                               second_factorial_moment)
from photon_scintillation.api.exceptions import (ConfigurationError, DegenerateEstimateError, DetectorValidityError,
                                                 DomainError, OutOfGridError, SimulationException)
from photon_scintillation.api.force_models import FrozenScreens, WhiteNoiseDiffusion
from photon_scintillation.api.meta import (CountStats,
                                           DetectionConfig,
                                           ExperimentConfig,
                                           FockStatistics,
                                           ForceModel,
                                           PathConfig,
                                           PhotonState,
                                           PoissonStatistics,
                                           RealizationResult,
                                           SourceConfig,
                                           TiltMode,
                                           TurbulenceModel,
                                           TurbulenceSpec)
from photon_scintillation.api.montecarlo import (estimate_detection_probability, estimate_scintillation_index,
                                                 retrace_interval_counts, run_beam_spread_experiment, run_ensemble,
                                                 run_scintillation_sweep, simulate_count_statistics,
                                                 synthetic_probability_ensemble)
from photon_scintillation.api.propagation import (BeamAnalytic, beam_radius_squared, mean_intensity,
                                                  propagate_ballistic, propagate_diffusive, propagate_screens)
from photon_scintillation.api.source import (coherence_length_for_ratio, mode_amplitude, reduced_radius_sq,
                                             sample_initial_photon, sample_interval_photon_count, sample_tilt)
from photon_scintillation.api.turbulence import (PhaseScreen, ScreenStack, SynthesizedScreenStack,
                                                 force_diffusion_coefficient, screen_kick, spectrum_psi,
                                                 structure_function, synthesize_screen, turbulence_T)
