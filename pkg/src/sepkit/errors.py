"""Exception types shared across the package."""


class SepkitError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(SepkitError):
    """Invalid configuration file or parameter set."""


class NumericalError(SepkitError):
    """Base class for failures inside the numerical pipeline."""


class IntegrationError(NumericalError):
    """ODE integration failed (step underflow or non-finite state)."""


class ClassificationSetupError(NumericalError):
    """Attractor set unusable for classification (e.g. overlapping capture balls)."""


class UnsupportedConfigurationError(NumericalError):
    """The model's stable attractors do not form the two-basin setting."""


class CoveringError(NumericalError):
    """A subdomain of the covering contains no interpolation nodes."""


class FitError(NumericalError):
    """A local interpolation system is singular or too ill-conditioned."""


class OutOfDomainError(NumericalError):
    """Evaluation point lies outside every subdomain of the covering."""


class StageDependencyError(SepkitError):
    """A pipeline stage is missing the output files of an upstream stage."""
