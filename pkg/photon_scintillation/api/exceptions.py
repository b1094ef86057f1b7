"""
Exceptions that can be thrown while configuring or running simulations
"""


class SimulationException(Exception):
    pass


class DomainError(SimulationException, ValueError):
    """Is raised when a physical argument is outside the domain of a formula"""
    pass


class ConfigurationError(SimulationException):
    """Is raised when a configuration is inconsistent or can not be resolved"""
    pass


class DetectorValidityError(ConfigurationError):
    """Is raised when the detector is not small compared to the beam"""

    def __init__(self, area_fraction: float, *args):
        super().__init__(*args)
        self.area_fraction = area_fraction


class OutOfGridError(SimulationException):
    """Is raised when photons leave a screen grid that does not wrap"""

    def __init__(self, outside: int, *args):
        super().__init__(*args)
        self.outside = outside


class DegenerateEstimateError(SimulationException):
    """Is raised when an estimate can not be normalized because the mean detection probability is zero"""
    pass
