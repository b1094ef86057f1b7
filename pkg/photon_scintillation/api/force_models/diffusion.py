import numpy as np

from photon_scintillation.api.exceptions import DomainError
from photon_scintillation.api.meta import ForceModel, PhotonState, PropagationResult, TurbulenceSpec
from photon_scintillation.api.propagation import propagate_diffusive
from photon_scintillation.api.turbulence import force_diffusion_coefficient, turbulence_T


class WhiteNoiseDiffusion(ForceModel):
    """
    White-noise force: every photon takes independent Gaussian momentum kicks.

    Reproduces the mean beam spread of the turbulence but no intensity correlations.
    """

    name = "white_noise_diffusion"

    def __init__(self, d_f: float | None = None, n_steps: int = 100):
        """
        Create a white-noise force
        :param d_f: Momentum diffusion coefficient, m^-2 s^-1. Derived from the turbulence when not set
        :param n_steps: Integration steps along the path
        """
        if d_f is not None and d_f < 0:
            raise DomainError(f"d_f={d_f} must not be negative")
        if n_steps < 10:
            raise DomainError(f"n_steps={n_steps} must be at least 10")
        self.d_f = None if d_f is None else float(d_f)
        self.n_steps = int(n_steps)

    def resolve(self, turbulence: TurbulenceSpec, q0: float) -> "WhiteNoiseDiffusion":
        if self.d_f is not None:
            return self
        return WhiteNoiseDiffusion(force_diffusion_coefficient(turbulence_T(turbulence), q0), self.n_steps)

    def propagate(
            self,
            state: PhotonState,
            length: float,
            turbulence: TurbulenceSpec,
            realization_seed: int,
            rng: np.random.Generator,
    ) -> PropagationResult:
        force = self.resolve(turbulence, state.qz)
        return PropagationResult(state=propagate_diffusive(state, length, force.d_f, rng, force.n_steps))

    def describe(self):
        return {"model": self.name, "d_f": self.d_f, "n_steps": self.n_steps}
