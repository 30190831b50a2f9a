"""Exception types shared across the package."""

from __future__ import annotations


class MirrorwaveError(Exception):
    """Base class for all package errors."""


class InvalidInputError(MirrorwaveError, ValueError):
    """A parameter is outside its admissible range."""


class SingularPropagatorError(MirrorwaveError, ArithmeticError):
    """A propagator has a vanishing diagonal entry and cannot be converted."""


class ResonanceError(MirrorwaveError, ArithmeticError):
    """A multiple-scattering denominator vanishes."""


class IntegrationError(MirrorwaveError, ArithmeticError):
    """The propagator ODE could not be integrated over a realization."""

    def __init__(self, message: str, realization: int | None = None):
        super().__init__(message)
        self.realization = realization


class QuadratureError(MirrorwaveError, ArithmeticError):
    """An integral failed to converge to the requested accuracy."""


class PrecisionError(MirrorwaveError, ArithmeticError):
    """Cancellation destroyed the result; retry in extended precision."""


class SeriesError(MirrorwaveError, ArithmeticError):
    """A series did not reach its tolerance within the allowed number of terms."""


class ExcludedConfigurationError(MirrorwaveError, ValueError):
    """The geometry sits exactly on an excluded configuration."""
