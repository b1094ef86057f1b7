"""
Meta data around experiments: turbulence, source, path, detector and the records produced by a run
"""
import enum
import functools
import math
from abc import ABC, abstractmethod
from collections.abc import Mapping
from typing import Annotated, Any, Callable, ClassVar, Literal

import numpy as np
from pydantic import ConfigDict, Field, GetJsonSchemaHandler, dataclasses, model_validator
from pydantic.json_schema import JsonSchemaValue
from pydantic_core import core_schema
from scipy import constants

from photon_scintillation.api.exceptions import DomainError

SPEED_OF_LIGHT = constants.c
"""Speed of light in vacuum, m/s"""

_CONFIG = ConfigDict(extra="forbid", ser_json_inf_nan="strings")
_ARRAY_CONFIG = ConfigDict(arbitrary_types_allowed=True)


class TurbulenceModel(str, enum.Enum):
    """Spectrum of refractive-index fluctuations"""

    VON_KARMAN = "von_karman"
    TATARSKII = "tatarskii"
    """von Karman spectrum without the outer scale term"""


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class TurbulenceSpec:
    """Strength and scales of the refractive-index turbulence"""

    cn2: float = Field(ge=0, description="Index structure constant, m^(-2/3)")
    """Index structure constant, m^(-2/3)"""

    l0: float = Field(gt=0, description="Inner scale, m")
    """Inner scale, m"""

    L0: float = Field(default=math.inf, gt=0, description="Outer scale, m, may be infinite")
    """Outer scale, m, may be infinite"""

    model: TurbulenceModel = Field(default=TurbulenceModel.VON_KARMAN, description="Spectrum model")
    """Spectrum model"""

    @model_validator(mode="after")
    def _check_scales(self) -> "TurbulenceSpec":
        if math.isfinite(self.L0) and self.L0 <= self.l0:
            raise ValueError(f"outer scale L0={self.L0} must exceed inner scale l0={self.l0}")
        return self

    @property
    def inverse_outer_scale_sq(self) -> float:
        """L0^(-2), zero for Tatarskii or an infinite outer scale"""
        if self.model is TurbulenceModel.TATARSKII or not math.isfinite(self.L0):
            return 0.0
        return self.L0 ** -2


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class FockStatistics:
    """Exactly `photons` photons per counting interval"""

    photons: int = Field(ge=1, description="Photons per counting interval")
    """Photons per counting interval"""

    kind: Literal["fock"] = "fock"

    @property
    def mean_photons(self) -> float:
        return float(self.photons)


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class PoissonStatistics:
    """Poisson distributed photon number per counting interval"""

    mean_photons: float = Field(ge=0, description="Mean photons per counting interval")
    """Mean photons per counting interval"""

    kind: Literal["poisson"] = "poisson"


PhotonStatistics = Annotated[FockStatistics | PoissonStatistics, Field(discriminator="kind")]


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class SourceConfig:
    """
    Single-photon pulse source: Gaussian aperture mode, transmitter phase screen and photon-number statistics
    """

    r0: float = Field(gt=0, description="Aperture radius, m")
    """Aperture radius, m"""

    wavelength: float = Field(gt=0, description="Carrier wavelength, m")
    """Carrier wavelength, m"""

    photon_stat: PhotonStatistics = Field(description="Photon-number statistics per counting interval")
    """Photon-number statistics per counting interval"""

    rz: float = Field(default=SPEED_OF_LIGHT * 1e-9, gt=0, description="Pulse length, m")
    """Pulse length, m. Defaults to a 1 ns pulse"""

    z0: float = Field(default=0.0, description="Initial pulse-center position, m")
    """Initial pulse-center position, m"""

    lambda_c: float = Field(default=math.inf, gt=0, description="Coherence length of the transmitter screen, m")
    """Coherence length of the transmitter screen, m. Infinite for a fully coherent source"""

    pulses_per_interval: int = Field(default=10_000, ge=1, description="Pulses per counting interval")
    """Pulses per counting interval"""

    t_p: float = Field(default=1e-2, gt=0, description="Counting interval, s")
    """Counting interval, s"""

    t0: float = Field(default=0.0, description="Emission time of the pulse center, s")
    """Emission time of the pulse center, s"""

    @model_validator(mode="after")
    def _check_pulse_train(self) -> "SourceConfig":
        if self.r0 < 10 * self.wavelength:
            raise ValueError(f"aperture radius {self.r0} m is not paraxial for wavelength {self.wavelength} m")
        separation = SPEED_OF_LIGHT * self.t_p / self.pulses_per_interval
        if self.rz >= separation:
            raise ValueError(f"pulse length {self.rz} m overlaps the pulse separation {separation} m")
        return self

    @functools.cached_property
    def q0(self) -> float:
        """Carrier wave number 2 pi / wavelength, m^-1"""
        return 2 * math.pi / self.wavelength

    @functools.cached_property
    def omega0(self) -> float:
        """Carrier angular frequency, s^-1"""
        return SPEED_OF_LIGHT * self.q0

    @functools.cached_property
    def r1_sq(self) -> float:
        """Partial-coherence radius squared, m^2"""
        from photon_scintillation.api.source import reduced_radius_sq
        return reduced_radius_sq(self.r0, self.lambda_c)


@dataclasses.dataclass(frozen=True, config=_ARRAY_CONFIG)
class PhotonState:
    """
    Phase-space samples of an ensemble of photons.

    All arrays share one shape, the longitudinal momentum is pinned at `qz`.
    """

    x: np.ndarray
    """Transverse position, m"""

    y: np.ndarray
    """Transverse position, m"""

    qx: np.ndarray
    """Transverse momentum, m^-1"""

    qy: np.ndarray
    """Transverse momentum, m^-1"""

    z: np.ndarray
    """Longitudinal position, m"""

    t: np.ndarray
    """Time, s"""

    qz: float
    """Carrier wave number q0, m^-1"""

    def check_paraxial(self) -> "PhotonState":
        """
        Ensure all transverse momenta stay below a tenth of the carrier wave number
        :return: The state itself
        """
        if self.size and float(np.max(np.hypot(self.qx, self.qy))) >= 0.1 * self.qz:
            raise DomainError(f"transverse momentum exceeds the paraxial limit for q0={self.qz}")
        return self

    @property
    def size(self) -> int:
        return int(self.x.size)


@dataclasses.dataclass(frozen=True, config=_ARRAY_CONFIG)
class PropagationResult:
    """Photons at the end of a path"""

    state: PhotonState
    """Propagated photons"""

    wrap_count: int = 0
    """Kicks evaluated at positions outside the screen grid"""


class ForceModel(ABC):
    """
    Random force acting on photon trajectories along the path
    """

    name: ClassVar[str] = ""
    """Name used in serialized configs"""

    correlated: ClassVar[bool] = False
    """True if all photons of one realization feel the same refractive-index configuration"""

    _registry: ClassVar[dict[str, type["ForceModel"]]] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.name:
            ForceModel._registry[cls.name] = cls

    def resolve(self, turbulence: TurbulenceSpec, q0: float) -> "ForceModel":
        """
        Fill parameters derived from the turbulence
        :param turbulence: Turbulence the force is created by
        :param q0: Carrier wave number, m^-1
        :return: Force model with all parameters set
        """
        return self

    @abstractmethod
    def propagate(
            self,
            state: PhotonState,
            length: float,
            turbulence: TurbulenceSpec,
            realization_seed: int,
            rng: np.random.Generator,
    ) -> "PropagationResult":
        """
        Propagate photons over the path
        :param state: Photons at the transmitter
        :param length: Path length, m
        :param turbulence: Turbulence along the path
        :param realization_seed: Seed of the refractive-index configuration
        :param rng: Stream for per-photon randomness
        :return: Photons at the receiver plane
        """

    @abstractmethod
    def describe(self) -> dict[str, Any]:
        """
        Describe the force model as a plain mapping, accepted again by `validate`
        :return: Mapping with the model name and all parameters
        """

    def __eq__(self, other):
        return type(self) is type(other) and self.describe() == other.describe()

    def __hash__(self):
        return hash((type(self), tuple(self.describe().items())))

    def __repr__(self):
        arguments = ", ".join(f"{k}={v!r}" for k, v in self.describe().items() if k != "model")
        return f"{type(self).__name__}({arguments})"

    @classmethod
    def __get_pydantic_json_schema__(
            cls, core_schema: core_schema.JsonSchema, handler: GetJsonSchemaHandler
    ) -> JsonSchemaValue:
        json_schema = {}
        json_schema.update(type="object", required=["model"], properties={"model": {"enum": sorted(cls._registry)}})
        return json_schema

    @classmethod
    def validate(
            cls, __input_value: Any, _: core_schema.ValidationInfo
    ) -> "ForceModel":
        if isinstance(__input_value, cls):
            return __input_value
        if isinstance(__input_value, Mapping):
            import photon_scintillation.api.force_models  # noqa: F401 registers implementations

            arguments = dict(__input_value)
            name = arguments.pop("model", None)
            if name not in cls._registry:
                raise ValueError(f"Unknown force model {name!r}, expected one of {sorted(cls._registry)}")
            return cls._registry[name](**arguments)
        raise ValueError(f"Expected ForceModel, received: {type(__input_value)}")

    @classmethod
    def __get_pydantic_core_schema__(
            cls,
            source: type[Any],
            handler: Callable[[Any], core_schema.CoreSchema]
    ) -> core_schema.CoreSchema:
        return core_schema.with_info_plain_validator_function(
            cls.validate,
            serialization=core_schema.plain_serializer_function_ser_schema(lambda model: model.describe()),
        )


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class PathConfig:
    """Propagation path from transmitter to receiver"""

    length: float = Field(gt=0, description="Path length, m")
    """Path length, m"""

    force: ForceModel = Field(description="Random force along the path")
    """Random force along the path"""


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class DetectionConfig:
    """Photon detector at the receiver plane"""

    eta_q: float = Field(ge=0, le=1, description="Quantum efficiency")
    """Quantum efficiency"""

    detector_area: float = Field(gt=0, description="Detector area, m^2")
    """Detector area, m^2"""

    detector_center: tuple[float, float] = Field(default=(0.0, 0.0), description="Transverse detector position, m")
    """Transverse detector position, m"""

    @property
    def radius(self) -> float:
        """Radius of the circular aperture with the configured area, m"""
        return math.sqrt(self.detector_area / math.pi)


class TiltMode(str, enum.Enum):
    """How often the transmitter phase screen draws a new tilt"""

    PER_PULSE = "per_pulse"
    PER_INTERVAL = "per_interval"


class SourceKind(str, enum.Enum):
    FOCK = "fock"
    POISSON = "poisson"


@dataclasses.dataclass(frozen=True, config=_CONFIG)
class ExperimentConfig:
    """
    Complete description of a simulation run
    """

    turbulence: TurbulenceSpec = Field(description="Turbulence along the path")
    """Turbulence along the path"""

    source: SourceConfig = Field(description="Photon source")
    """Photon source"""

    path: PathConfig = Field(description="Propagation path")
    """Propagation path"""

    detector: DetectionConfig = Field(description="Detector at the receiver")
    """Detector at the receiver"""

    realizations: int = Field(default=200, ge=2, description="Frozen atmosphere realizations")
    """Frozen atmosphere realizations, one per counting interval"""

    probes_per_realization: int = Field(default=10_000, ge=100, description="Probe photons per realization")
    """Probe photons traced per realization to estimate the detection probability"""

    master_seed: int = Field(default=0, ge=0, lt=2 ** 64, description="Seed all random streams derive from")
    """Seed all random streams derive from"""

    tilt_mode: TiltMode = Field(default=TiltMode.PER_PULSE, description="Transmitter tilt cadence")
    """Transmitter tilt cadence"""

    distances: tuple[float, ...] = Field(
        default=(0.0, 1_000.0, 5_000.0, 10_000.0),
        description="Distances of the beam-spread table, m"
    )
    """Distances of the beam-spread table, m"""

    beam_photons: int = Field(default=100_000, ge=100, description="Photons per distance in the beam-spread table")
    """Photons per distance in the beam-spread table"""

    cn2_values: tuple[float, ...] = Field(default=(), description="Structure constants of the scintillation sweep")
    """Structure constants of the scintillation sweep, empty to use the turbulence section only"""

    coherence_ratios: tuple[float, ...] = Field(
        default=(1.0, 0.5),
        description="Values of (r1/r0)^2 of the scintillation sweep"
    )
    """Values of (r1/r0)^2 of the scintillation sweep"""

    degenerate_threshold: float = Field(
        default=0.1,
        ge=0,
        le=1,
        description="Largest tolerated share of degenerate realizations"
    )
    """Largest tolerated share of degenerate realizations"""

    @model_validator(mode="after")
    def _check_sweeps(self) -> "ExperimentConfig":
        if any(d < 0 for d in self.distances):
            raise ValueError("distances must not be negative")
        if any(c < 0 for c in self.cn2_values):
            raise ValueError("cn2_values must not be negative")
        if any(not 0 < r <= 1 for r in self.coherence_ratios):
            raise ValueError("coherence_ratios must be within (0, 1]")
        return self

    @functools.cached_property
    def force(self) -> ForceModel:
        """Force model with turbulence derived parameters resolved"""
        return self.path.force.resolve(self.turbulence, self.source.q0)

    @property
    def sweep_cn2(self) -> tuple[float, ...]:
        return self.cn2_values or (self.turbulence.cn2,)


@dataclasses.dataclass(frozen=True)
class RealizationResult:
    """Detection outcome of one frozen atmosphere realization"""

    index: int
    """Realization index"""

    p_hat: float
    """Estimated per-photon detection probability"""

    hits: int
    """Probe photons landing inside the detector aperture"""

    probes: int
    """Probe photons traced"""

    eta_q: float
    """Quantum efficiency the estimate was scaled with"""

    wrap_count: int = 0
    """Photon kicks evaluated on a periodically wrapped screen"""

    @property
    def degenerate(self) -> bool:
        """Too few hits for a reliable variance"""
        return self.hits < 10


@dataclasses.dataclass(frozen=True)
class ScintillationEstimate:
    """Scintillation index estimated from an ensemble of realizations"""

    sigma2: float
    """Debiased normalized variance of the detection probability"""

    stderr: float
    """Bootstrap standard error over realizations"""

    mean_p: float
    """Mean detection probability"""

    realizations: int
    """Realizations in the ensemble"""

    degenerate: int
    """Realizations with too few hits"""


@dataclasses.dataclass(frozen=True)
class CountStats:
    """Photocount statistics with quantum and scintillation decomposition"""

    mean: float
    """Mean counts per interval"""

    variance: float
    """Variance of counts per interval"""

    normalized_variance: float
    """variance / mean^2"""

    alpha: float
    """Detected fraction of generated photons"""

    shot_term: float
    """Quantum part of the normalized variance"""

    scint_term: float
    """Turbulence part of the normalized variance"""

    source_kind: SourceKind
    """Photon statistics of the source"""


@dataclasses.dataclass(frozen=True)
class CountComparison:
    """Sampled photocount statistics next to the analytic prediction for the same alpha and sigma^2"""

    sampled: CountStats
    """Statistics of the sampled counts"""

    analytic: CountStats
    """Prediction for the sampled alpha and sigma2_used"""

    sigma2_used: float
    """Normalized variance of the detection probabilities the counts were drawn from"""

    stderr: float
    """Bootstrap standard error of the sampled normalized variance"""

    intervals: int
    """Sampled counting intervals"""


@dataclasses.dataclass(frozen=True)
class BeamSpreadRow:
    """Sampled beam spread at one distance paired with the analytic beam radius"""

    distance: float
    """Propagation distance, m"""

    r2_analytic: float
    """Analytic R^2, m^2"""

    r2_turbulence: float
    """Turbulence term of the analytic R^2, m^2"""

    variance: float
    """Sampled per-axis position variance, m^2"""

    stderr: float
    """Standard error of the sampled variance over realizations, m^2"""

    @property
    def ratio(self) -> float:
        """Sampled variance over the analytic per-axis variance R^2/2"""
        return self.variance / (self.r2_analytic / 2)


@dataclasses.dataclass(frozen=True)
class ScintillationRow:
    """One grid point of a scintillation sweep"""

    cn2: float
    """Index structure constant, m^(-2/3)"""

    coherence_ratio: float
    """(r1/r0)^2 of the source"""

    path_length: float
    """Path length, m"""

    estimate: ScintillationEstimate
    """Scintillation estimate of the grid point"""

    wrap_count: int
    """Screen wraps summed over realizations"""
