"""
Refractive-index turbulence: spectrum, bulk parameters and frozen screens with their ray kicks
"""
import functools
import logging
import math
from collections.abc import Iterator, Sequence

import numpy as np
from pydantic import dataclasses
from scipy import constants, integrate

from photon_scintillation.api import seeding
from photon_scintillation.api.exceptions import ConfigurationError, DomainError, OutOfGridError
from photon_scintillation.api.meta import _ARRAY_CONFIG, TurbulenceSpec

logger = logging.getLogger(__name__)

SPECTRUM_PREFACTOR = 0.033
TURBULENCE_T_PREFACTOR = 0.558


def spectrum_psi(spec: TurbulenceSpec, g: float | np.ndarray) -> float | np.ndarray:
    """
    Spectral density of refractive-index fluctuations
    :param spec: Turbulence parameters
    :param g: Spatial frequency magnitude, m^-1
    :return: Spectral density, m^3
    """
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise DomainError("spatial frequency must not be negative")

    outer = spec.inverse_outer_scale_sq
    if outer == 0.0 and np.any(g == 0):
        raise DomainError(f"{spec.model.value} spectrum is singular at g=0")

    psi = SPECTRUM_PREFACTOR * spec.cn2 * np.exp(-(g * spec.l0 / (2 * math.pi)) ** 2) / (g ** 2 + outer) ** (11 / 6)
    return float(psi) if psi.ndim == 0 else psi


def turbulence_T(spec: TurbulenceSpec) -> float:
    """
    Turbulence parameter of the beam radius law, m^-1
    """
    if spec.l0 <= 0:
        raise DomainError("inner scale must be positive")
    return TURBULENCE_T_PREFACTOR * spec.cn2 * spec.l0 ** (-1 / 3)


def force_diffusion_coefficient(T: float, q0: float) -> float:
    """
    Momentum diffusion coefficient of a white-noise force reproducing the turbulence term of the beam radius
    :param T: Turbulence parameter, m^-1
    :param q0: Carrier wave number, m^-1
    :return: d_f, m^-2 s^-1
    """
    if T < 0:
        raise DomainError("turbulence parameter must not be negative")
    if q0 <= 0:
        raise DomainError("wave number must be positive")
    return 3 * constants.c * q0 ** 2 * T


def screen_spectrum(spec: TurbulenceSpec, g: float | np.ndarray, slab_thickness: float) -> float | np.ndarray:
    """Two dimensional spectral density of the integrated index fluctuation of one slab, m^4"""
    return 2 * math.pi * slab_thickness * spectrum_psi(spec, g)


def check_grid(spec: TurbulenceSpec, grid_n: int, grid_spacing: float) -> None:
    if grid_n < 2 or grid_n & (grid_n - 1):
        raise ConfigurationError(f"grid_n={grid_n} is not a power of two")
    if grid_spacing <= 0 or grid_spacing > spec.l0 / 2 * (1 + 1e-12):
        raise ConfigurationError(f"grid spacing {grid_spacing} m does not resolve the inner scale {spec.l0} m")


def low_frequency_truncated(spec: TurbulenceSpec, grid_n: int, grid_spacing: float) -> bool:
    """True if the grid extent is smaller than the outer scale"""
    return grid_n * grid_spacing < spec.L0


def _grid_wave_numbers(grid_n: int, grid_spacing: float) -> tuple[np.ndarray, np.ndarray]:
    g = 2 * math.pi * np.fft.fftfreq(grid_n, d=grid_spacing)
    return np.meshgrid(g, g)


def _grid_screen_spectrum(spec, grid_n, grid_spacing, slab_thickness) -> tuple[np.ndarray, np.ndarray, float]:
    gx, gy = _grid_wave_numbers(grid_n, grid_spacing)
    g = np.hypot(gx, gy)
    phi = np.zeros_like(g)
    nonzero = g > 0
    phi[nonzero] = screen_spectrum(spec, g[nonzero], slab_thickness)
    return gx, phi, 2 * math.pi / (grid_n * grid_spacing)


def discrete_screen_variance(spec: TurbulenceSpec, grid_n: int, grid_spacing: float, slab_thickness: float) -> float:
    """Variance of a synthesized screen: the spectral sum over the grid, m^2"""
    _, phi, dg = _grid_screen_spectrum(spec, grid_n, grid_spacing, slab_thickness)
    return float(phi.sum() * dg ** 2)


def synthesize_screen(
        spec: TurbulenceSpec,
        grid_n: int,
        grid_spacing: float,
        slab_thickness: float,
        stream_seed: int,
) -> np.ndarray:
    """
    Synthesize the integrated index fluctuation of one slab on a periodic grid.

    Complex white noise is shaped with the square root of the slab spectrum and
    transformed back, the real part is returned. The mean (g=0) component is zero.

    :param spec: Turbulence parameters
    :param grid_n: Samples per axis, power of two
    :param grid_spacing: Sample distance, at most l0/2, m
    :param slab_thickness: Thickness of the slab the screen integrates, m
    :param stream_seed: Seed of the random stream
    :return: Field indexed [y, x], m
    """
    check_grid(spec, grid_n, grid_spacing)
    if low_frequency_truncated(spec, grid_n, grid_spacing):
        logger.debug("Grid extent %g m below outer scale %g m", grid_n * grid_spacing, spec.L0)

    _, phi, dg = _grid_screen_spectrum(spec, grid_n, grid_spacing, slab_thickness)
    noise = seeding.stream(stream_seed).standard_normal((2, grid_n, grid_n))
    coefficients = (noise[0] + 1j * noise[1]) * np.sqrt(phi) * dg
    return np.fft.ifft2(coefficients).real * grid_n ** 2


@functools.lru_cache(maxsize=64)
def large_scale_tilt_variance(
        spec: TurbulenceSpec,
        grid_n: int,
        grid_spacing: float,
        slab_thickness: float,
) -> float:
    """
    Per-axis variance of the screen gradient that the periodic grid can not carry.

    Difference of the continuum integral of g_x^2 Phi_S and its sum over the grid frequencies, m^0.
    """
    if spec.cn2 == 0:
        return 0.0

    def weighted(g):
        # g^(11/3) psi(g) stays finite at 0 and carries the g^(-2/3) weight of the quadrature
        return g ** (11 / 3) * spectrum_psi(spec, g) if g > 0 else _psi_limit(spec)

    cutoff = 2 * math.pi / spec.l0
    head, _ = integrate.quad(weighted, 0, cutoff, weight="alg", wvar=(-2 / 3, 0.0), limit=200)
    tail, _ = integrate.quad(lambda g: g ** 3 * spectrum_psi(spec, g), cutoff, np.inf, limit=200)
    continuum = math.pi * 2 * math.pi * slab_thickness * (head + tail)

    gx, phi, dg = _grid_screen_spectrum(spec, grid_n, grid_spacing, slab_thickness)
    grid = float((gx ** 2 * phi).sum() * dg ** 2)
    return max(continuum - grid, 0.0)


def _psi_limit(spec: TurbulenceSpec) -> float:
    if spec.inverse_outer_scale_sq == 0.0:
        return SPECTRUM_PREFACTOR * spec.cn2
    return 0.0


def structure_function(field: np.ndarray, lags: Sequence[int], axis: int = 1) -> np.ndarray:
    """
    Structure function of a screen along one axis, without wrapping
    :param field: Screen indexed [y, x]
    :param lags: Lags in grid samples
    :param axis: 1 for lags along x, 0 along y
    :return: Mean squared increment for every lag
    """
    n = field.shape[axis]
    values = []
    for lag in lags:
        if not 0 < lag < n:
            raise DomainError(f"lag {lag} outside of (0, {n})")
        head = np.take(field, np.arange(lag, n), axis=axis)
        tail = np.take(field, np.arange(0, n - lag), axis=axis)
        values.append(np.mean((head - tail) ** 2))
    return np.asarray(values)


@dataclasses.dataclass(frozen=True, config=_ARRAY_CONFIG)
class PhaseScreen:
    """
    Integrated index fluctuation of one slab on a periodic grid centered on the optical axis.

    Node (iy, ix) sits at ((ix - n/2) h, (iy - n/2) h).
    """

    field: np.ndarray
    """Screen values indexed [y, x], m"""

    spacing: float
    """Grid spacing h, m"""

    tilt: tuple[float, float] = (0.0, 0.0)
    """Uniform gradient added on top of the field"""

    @property
    def grid_n(self) -> int:
        return self.field.shape[0]

    @property
    def extent(self) -> float:
        return self.grid_n * self.spacing

    @functools.cached_property
    def gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """Central-difference gradient (dS/dx, dS/dy) on the periodic grid"""
        f = self.field
        dx = (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * self.spacing)
        dy = (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * self.spacing)
        return dx, dy

    @functools.cached_property
    def bounded_gradient(self) -> tuple[np.ndarray, np.ndarray]:
        """Gradient (dS/dx, dS/dy) with second-order one-sided differences at the borders"""
        dy, dx = np.gradient(self.field, self.spacing, edge_order=2)
        return dx, dy

    def coordinates(self) -> np.ndarray:
        """Node coordinates along either axis, m"""
        return (np.arange(self.grid_n) - self.grid_n / 2) * self.spacing

    def with_tilt_ramp(self) -> np.ndarray:
        """Field including the uniform tilt as a linear ramp"""
        x = self.coordinates()
        return self.field + self.tilt[0] * x[np.newaxis, :] + self.tilt[1] * x[:, np.newaxis]

    def outside(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Mask of positions outside of the grid extent"""
        half = self.extent / 2
        return (np.abs(x) >= half) | (np.abs(y) >= half)


def _bilinear(values: np.ndarray, fx: np.ndarray, fy: np.ndarray, wrap: bool = True) -> np.ndarray:
    n = values.shape[0]
    ix = np.floor(fx)
    iy = np.floor(fy)
    if not wrap:
        # the last cell extrapolates the border cell linearly
        ix = np.clip(ix, 0, n - 2)
        iy = np.clip(iy, 0, n - 2)
    wx = fx - ix
    wy = fy - iy
    ix0 = ix.astype(np.int64) % n
    iy0 = iy.astype(np.int64) % n
    ix1 = (ix0 + 1) % n
    iy1 = (iy0 + 1) % n
    return (values[iy0, ix0] * (1 - wx) * (1 - wy)
            + values[iy0, ix1] * wx * (1 - wy)
            + values[iy1, ix0] * (1 - wx) * wy
            + values[iy1, ix1] * wx * wy)


def screen_kick(
        screen: PhaseScreen,
        x: np.ndarray,
        y: np.ndarray,
        q0: float,
        wrap: bool = True,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Momentum kick q0 * grad S at the given transverse positions.

    Positions outside the grid extent see the periodic continuation of the screen.
    With `wrap` disabled they are rejected and the gradient near the borders is taken
    from one-sided differences instead of across the periodic seam.

    :param screen: Screen of the slab
    :param x: Transverse positions, m
    :param y: Transverse positions, m
    :param q0: Carrier wave number, m^-1
    :param wrap: Allow positions outside of the grid extent
    :return: Momentum change (dqx, dqy), m^-1
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if not wrap:
        outside = int(np.count_nonzero(screen.outside(x, y)))
        if outside:
            raise OutOfGridError(outside, f"{outside} photons left the screen grid of extent {screen.extent} m")

    fx = x / screen.spacing + screen.grid_n / 2
    fy = y / screen.spacing + screen.grid_n / 2
    dx, dy = screen.gradient if wrap else screen.bounded_gradient
    return (
        q0 * (_bilinear(dx, fx, fy, wrap) + screen.tilt[0]),
        q0 * (_bilinear(dy, fx, fy, wrap) + screen.tilt[1]),
    )


class ScreenStack(Sequence[PhaseScreen]):
    """
    Frozen atmosphere realization: one screen per slab, ordered from transmitter to receiver
    """

    def __init__(self, slab_thickness: float, screens: Sequence[PhaseScreen] = ()):
        """
        Create a stack from explicit screens
        :param slab_thickness: Thickness of every slab, m
        :param screens: Screens in path order
        """
        if slab_thickness <= 0:
            raise DomainError("slab thickness must be positive")
        self.slab_thickness = slab_thickness
        self._screens = list(screens)

    def __len__(self) -> int:
        return len(self._screens)

    def __getitem__(self, index):
        return self._screens[index]

    def __iter__(self) -> Iterator[PhaseScreen]:
        for index in range(len(self)):
            yield self[index]

    @property
    def screens(self) -> list[PhaseScreen]:
        return [screen for screen in self]

    @property
    def length(self) -> float:
        """Path length covered by the slabs, m"""
        return len(self) * self.slab_thickness


class SynthesizedScreenStack(ScreenStack):
    """
    Screens synthesized on first access from the realization seed, slab i uses stream (realization_seed, i)
    """

    def __init__(
            self,
            spec: TurbulenceSpec,
            n_slabs: int,
            slab_thickness: float,
            grid_n: int,
            grid_spacing: float,
            realization_seed: int,
            large_scale_tilt: bool = True,
    ):
        """
        Create a lazily synthesized stack
        :param spec: Turbulence parameters
        :param n_slabs: Number of slabs
        :param slab_thickness: Thickness of every slab, m
        :param grid_n: Samples per axis, power of two
        :param grid_spacing: Sample distance, m
        :param realization_seed: Seed of the realization
        :param large_scale_tilt: Add the gradient variance the grid can not carry as a uniform tilt per slab
        """
        super().__init__(slab_thickness)
        check_grid(spec, grid_n, grid_spacing)
        self.spec = spec
        self.n_slabs = n_slabs
        self.grid_n = grid_n
        self.grid_spacing = grid_spacing
        self.realization_seed = realization_seed
        self.large_scale_tilt = large_scale_tilt

    @property
    def truncated(self) -> bool:
        return low_frequency_truncated(self.spec, self.grid_n, self.grid_spacing)

    def __len__(self) -> int:
        return self.n_slabs

    def __getitem__(self, index):
        if isinstance(index, slice):
            return [self[i] for i in range(*index.indices(len(self)))]
        if not -self.n_slabs <= index < self.n_slabs:
            raise IndexError(index)
        return self._synthesize(index % self.n_slabs)

    def _synthesize(self, index: int) -> PhaseScreen:
        seed = seeding.derive_seed(self.realization_seed, seeding.SCREEN_STREAM, index)
        field = synthesize_screen(self.spec, self.grid_n, self.grid_spacing, self.slab_thickness, seed)

        tilt = (0.0, 0.0)
        if self.large_scale_tilt:
            variance = large_scale_tilt_variance(self.spec, self.grid_n, self.grid_spacing, self.slab_thickness)
            tx, ty = seeding.stream(seed, seeding.SCREEN_STREAM).normal(0.0, math.sqrt(variance), 2)
            tilt = (float(tx), float(ty))

        return PhaseScreen(field=field, spacing=self.grid_spacing, tilt=tilt)
