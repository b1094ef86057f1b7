"""
Photon propagation along the path and the analytic beam model
"""
import logging
import math

import numpy as np
from pydantic import Field, dataclasses
from scipy import constants

from photon_scintillation.api.exceptions import ConfigurationError, DomainError
from photon_scintillation.api.meta import PhotonState, PropagationResult, SourceConfig, TurbulenceSpec
from photon_scintillation.api.turbulence import ScreenStack, screen_kick, turbulence_T

logger = logging.getLogger(__name__)


def beam_radius_squared(t_z: float, r0: float, r1: float, q0: float, T: float) -> float:
    """
    Mean beam radius squared after propagating for t_z
    :param t_z: Propagation time, s
    :param r0: Aperture radius, m
    :param r1: Partial-coherence radius, m
    :param q0: Carrier wave number, m^-1
    :param T: Turbulence parameter, m^-1
    :return: R^2, m^2
    """
    if t_z < 0:
        raise DomainError("propagation time must not be negative")
    distance = constants.c * t_z
    diffraction = (2 * distance / (q0 * r0 * r1)) ** 2
    turbulence = 8 * distance ** 3 * T / r0 ** 2
    return r0 ** 2 / 2 * (1 + diffraction + turbulence)


@dataclasses.dataclass(frozen=True)
class BeamAnalytic:
    """Mean intensity of a pulse propagating through turbulence"""

    r0: float = Field(gt=0)
    """Aperture radius, m"""

    r1: float = Field(gt=0)
    """Partial-coherence radius, m"""

    q0: float = Field(gt=0)
    """Carrier wave number, m^-1"""

    T: float = Field(ge=0)
    """Turbulence parameter, m^-1"""

    rz: float = Field(gt=0)
    """Pulse length, unaffected by turbulence, m"""

    z0: float = 0.0
    t0: float = 0.0

    @classmethod
    def from_config(cls, source: SourceConfig, turbulence: TurbulenceSpec) -> "BeamAnalytic":
        return cls(
            r0=source.r0,
            r1=math.sqrt(source.r1_sq),
            q0=source.q0,
            T=turbulence_T(turbulence),
            rz=source.rz,
            z0=source.z0,
            t0=source.t0,
        )

    @property
    def omega0(self) -> float:
        return constants.c * self.q0

    def radius_squared(self, t_z: float) -> float:
        return beam_radius_squared(t_z, self.r0, self.r1, self.q0, self.T)

    def turbulence_term(self, t_z: float) -> float:
        """Part of R^2 caused by turbulence, m^2"""
        return 4 * (constants.c * t_z) ** 3 * self.T

    def z_eff(self, z, t):
        """Longitudinal distance to the pulse center, m"""
        return np.asarray(z) - self.z0 - constants.c * (np.asarray(t) - self.t0)

    def at_distance(self, distance: float) -> float:
        """R^2 after the pulse center travelled `distance`"""
        return self.radius_squared(distance / constants.c)


def mean_intensity(beam: BeamAnalytic, x, y, z, t, photons: float = 1):
    """
    Mean intensity of a pulse carrying `photons` photons, W m^-2
    """
    r2 = beam.radius_squared(t - beam.t0)
    prefactor = photons * math.sqrt(2 / math.pi) * constants.c * constants.hbar * beam.omega0 / (
            math.pi * r2 * beam.rz)
    r_sq = np.asarray(x) ** 2 + np.asarray(y) ** 2
    return prefactor * np.exp(-r_sq / r2 - 2 * beam.z_eff(z, t) ** 2 / beam.rz ** 2)


def propagate_ballistic(state: PhotonState, dz: float) -> PhotonState:
    """
    Straight flight over dz with paraxial transverse velocity c q / q0
    :param state: Photons
    :param dz: Longitudinal distance, m
    :return: Moved photons, momentum unchanged
    """
    if dz < 0:
        raise DomainError("flight distance must not be negative")
    slope = dz / state.qz
    return PhotonState(
        x=state.x + state.qx * slope,
        y=state.y + state.qy * slope,
        qx=state.qx,
        qy=state.qy,
        z=state.z + dz,
        t=state.t + dz / constants.c,
        qz=state.qz,
    )


def _kick(state: PhotonState, dqx: np.ndarray, dqy: np.ndarray) -> PhotonState:
    return PhotonState(
        x=state.x,
        y=state.y,
        qx=state.qx + dqx,
        qy=state.qy + dqy,
        z=state.z,
        t=state.t,
        qz=state.qz,
    )


def propagate_diffusive(
        state: PhotonState,
        length: float,
        d_f: float,
        rng: np.random.Generator,
        n_steps: int = 100,
) -> PhotonState:
    """
    Propagate under a white-noise force.

    Every step drifts half a step, takes a Gaussian kick of per-axis variance 2 d_f dt and drifts the other half.

    :param state: Photons
    :param length: Path length, m
    :param d_f: Momentum diffusion coefficient, m^-2 s^-1
    :param rng: Random stream for the kicks
    :param n_steps: Number of steps, at least 10
    :return: Photons at the end of the path
    """
    if n_steps < 10:
        raise DomainError(f"n_steps={n_steps} does not resolve the turbulence term, use at least 10")
    if d_f < 0:
        raise DomainError("diffusion coefficient must not be negative")
    if d_f == 0:
        return propagate_ballistic(state, length)

    dz = length / n_steps
    sigma = math.sqrt(2 * d_f * dz / constants.c)
    for _ in range(n_steps):
        state = propagate_ballistic(state, dz / 2)
        kicks = rng.normal(0.0, sigma, (2, state.size))
        state = propagate_ballistic(_kick(state, kicks[0], kicks[1]), dz / 2)
    return state.check_paraxial()


def propagate_screens(
        state: PhotonState,
        stack: ScreenStack,
        length: float | None = None,
        wrap: bool = True,
) -> PropagationResult:
    """
    Propagate through a frozen atmosphere realization.

    Every slab flies half its thickness, applies the screen kick and flies the other half.
    An empty stack is a ballistic flight over `length`.

    :param state: Photons
    :param stack: Screens of the realization
    :param length: Path length, m, must match the slabs when given
    :param wrap: Allow photons outside the screen grid
    :return: Photons at the end of the path and the number of wrapped kicks
    """
    if len(stack) == 0:
        return PropagationResult(state=propagate_ballistic(state, length or 0.0))
    if length is not None and not math.isclose(stack.length, length, rel_tol=1e-9):
        raise ConfigurationError(f"slabs cover {stack.length} m of a {length} m path")

    half = stack.slab_thickness / 2
    wraps = 0
    for screen in stack:
        state = propagate_ballistic(state, half)
        wraps += int(np.count_nonzero(screen.outside(state.x, state.y)))
        dqx, dqy = screen_kick(screen, state.x, state.y, state.qz, wrap=wrap)
        state = propagate_ballistic(_kick(state, dqx, dqy), half)

    if wraps:
        logger.debug("%d kicks evaluated on wrapped screens", wraps)
    return PropagationResult(state=state.check_paraxial(), wrap_count=wraps)
