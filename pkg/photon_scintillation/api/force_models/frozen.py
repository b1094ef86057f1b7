import logging
import math

import numpy as np

from photon_scintillation.api.exceptions import ConfigurationError, DomainError
from photon_scintillation.api.meta import ForceModel, PhotonState, PropagationResult, TurbulenceSpec
from photon_scintillation.api.propagation import propagate_screens
from photon_scintillation.api.turbulence import SynthesizedScreenStack, low_frequency_truncated

logger = logging.getLogger(__name__)

MAX_DEFAULT_SLABS = 64


class FrozenScreens(ForceModel):
    """
    Frozen atmosphere: the path is cut into slabs, each represented by one synthesized screen.

    All photons of a realization cross the same screens, which correlates their trajectories.
    """

    name = "frozen_screens"
    correlated = True

    def __init__(
            self,
            n_slabs: int | None = None,
            grid_n: int = 512,
            grid_spacing: float | None = None,
            wrap: bool = True,
            large_scale_tilt: bool = True,
    ):
        """
        Create a frozen screen force
        :param n_slabs: Number of slabs. Defaults to slabs of max(L0, L/64)
        :param grid_n: Screen samples per axis, power of two
        :param grid_spacing: Screen sample distance, m. Defaults to l0/16
        :param wrap: Continue screens periodically outside the grid instead of failing
        :param large_scale_tilt: Restore gradient variance the periodic grid can not carry
        """
        if n_slabs is not None and n_slabs < 1:
            raise DomainError(f"n_slabs={n_slabs} must be at least 1")
        if grid_n < 2 or grid_n & (grid_n - 1):
            raise DomainError(f"grid_n={grid_n} is not a power of two")
        if grid_spacing is not None and grid_spacing <= 0:
            raise DomainError(f"grid_spacing={grid_spacing} must be positive")
        self.n_slabs = None if n_slabs is None else int(n_slabs)
        self.grid_n = int(grid_n)
        self.grid_spacing = None if grid_spacing is None else float(grid_spacing)
        self.wrap = bool(wrap)
        self.large_scale_tilt = bool(large_scale_tilt)

    def spacing(self, turbulence: TurbulenceSpec) -> float:
        return self.grid_spacing if self.grid_spacing is not None else turbulence.l0 / 16

    def slab_layout(self, turbulence: TurbulenceSpec, length: float) -> tuple[int, float]:
        """
        Split the path into slabs
        :param turbulence: Turbulence along the path
        :param length: Path length, m
        :return: Number of slabs and their thickness
        """
        if length <= 0:
            raise DomainError("path length must be positive")
        outer = turbulence.L0 if math.isfinite(turbulence.L0) else 0.0

        if self.n_slabs is None:
            n_slabs = max(1, math.floor(length / max(outer, length / MAX_DEFAULT_SLABS) * (1 + 1e-12)))
            if length < outer:
                logger.warning("Path of %g m is shorter than the outer scale %g m, using a single slab", length, outer)
            return n_slabs, length / n_slabs

        thickness = length / self.n_slabs
        if thickness < outer:
            raise ConfigurationError(
                f"slab thickness {thickness} m is below the outer scale {outer} m, slabs would be correlated"
            )
        return self.n_slabs, thickness

    def truncated(self, turbulence: TurbulenceSpec) -> bool:
        return low_frequency_truncated(turbulence, self.grid_n, self.spacing(turbulence))

    def stack(self, turbulence: TurbulenceSpec, length: float, realization_seed: int) -> SynthesizedScreenStack:
        n_slabs, thickness = self.slab_layout(turbulence, length)
        return SynthesizedScreenStack(
            turbulence,
            n_slabs=n_slabs,
            slab_thickness=thickness,
            grid_n=self.grid_n,
            grid_spacing=self.spacing(turbulence),
            realization_seed=realization_seed,
            large_scale_tilt=self.large_scale_tilt,
        )

    def propagate(
            self,
            state: PhotonState,
            length: float,
            turbulence: TurbulenceSpec,
            realization_seed: int,
            rng: np.random.Generator,
    ) -> PropagationResult:
        return propagate_screens(state, self.stack(turbulence, length, realization_seed), length, wrap=self.wrap)

    def describe(self):
        return {
            "model": self.name,
            "n_slabs": self.n_slabs,
            "grid_n": self.grid_n,
            "grid_spacing": self.grid_spacing,
            "wrap": self.wrap,
            "large_scale_tilt": self.large_scale_tilt,
        }
