"""Exception types raised across the package."""


class PlanarPairError(Exception):
    """Base class for all package errors."""


class DomainError(PlanarPairError, ValueError):
    """Argument outside the domain of an operation."""


class PoleError(DomainError):
    """Argument sits on (or numerically next to) a pole."""


class PatchDomainError(DomainError):
    """Point lies outside the gauge patch it was evaluated on."""


class PoleSingularityError(DomainError):
    """Gauge potential requested too close to its Dirac-string pole."""


class OpenLoopError(DomainError):
    pass


class PoleCrossingError(DomainError):
    pass


class ZeroPropagationError(DomainError):
    """Centre-of-mass momentum vanishes, so its direction is undefined."""


class GridTooSmallError(DomainError):
    pass


class ParityError(DomainError):
    """Helicity and total spin have different parity."""


class ForwardSingularityError(DomainError):
    """Amplitude requested inside the excluded forward/backward window."""


class NonConvergenceError(PlanarPairError, ArithmeticError):
    pass


class NonEscapeError(PlanarPairError, ArithmeticError):
    """Trajectory did not return to the start radius within the step budget."""


class OriginError(DomainError):
    pass


class ConfigParseError(PlanarPairError):
    """Malformed sweep configuration; message carries the line or field."""
