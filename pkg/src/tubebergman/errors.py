"""Exception and warning types shared across the package."""


class TubeError(Exception):
    """Base class for all errors raised by tubebergman."""


class DomainError(TubeError, ValueError):
    """A point or parameter lies outside the region where an operation is defined."""


class PoleError(DomainError):
    """Evaluation too close to a pole of a rational map."""


class BranchError(DomainError):
    """A non-integer power was requested where Re(rho) <= 0."""


class ContourEscapesDomain(TubeError):
    """No admissible Cauchy contour radius keeps the polydisc inside the tube."""


class NonFinite(TubeError, FloatingPointError):
    """A function produced inf or nan at a quadrature or contour node."""


class StepTooSmall(TubeError):
    """Finite-difference step would leave the domain near the boundary."""


class ConfigError(TubeError, ValueError):
    """Invalid suite or command-line configuration."""


class DivergenceWarning(RuntimeWarning):
    """Monte-Carlo running means disagree under sample doubling."""
