"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """Inconsistent or invalid billiard configuration."""


class GeometryError(ArithmeticError):
    """A geometric construction degenerated numerically."""


class IntegrationError(RuntimeError):
    """The ODE integrator could not reach the requested tolerance."""
