"""Exception hierarchy shared by all modules."""


class CauchyBoundError(Exception):
    """Base class for every error raised by this package."""


class DegreeTooLow(CauchyBoundError):
    pass


class DivisionBySingularSeries(CauchyBoundError):
    pass


class LogOfVanishingSeries(CauchyBoundError):
    pass


class NotConformal(CauchyBoundError):
    pass


class NotInjective(CauchyBoundError):
    pass


class BoundaryNotAnalytic(CauchyBoundError):
    pass


class InversionDiverged(CauchyBoundError):
    pass


class SizeError(CauchyBoundError):
    pass


class NearBoundary(CauchyBoundError):
    def __init__(self, z, distance, delta_min):
        self.z = z
        self.distance = distance
        self.delta_min = delta_min
        super().__init__(
            f"point {z!r} is {distance:.3g} from the boundary (minimum {delta_min:.3g})")


class KernelSingular(CauchyBoundError):
    pass


class RadiiError(CauchyBoundError):
    pass


class ConfigError(CauchyBoundError):
    pass
