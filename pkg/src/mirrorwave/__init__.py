"""Mean transmission through random media that are mirror-symmetric about a thin barrier."""

from __future__ import annotations

from .analytic import (
    SeriesControl,
    constant_C,
    mean_intensity_independent,
    mean_intensity_symmetric,
    transmission_moment,
)
from .errors import (
    ExcludedConfigurationError,
    IntegrationError,
    InvalidInputError,
    MirrorwaveError,
    PrecisionError,
    QuadratureError,
    ResonanceError,
    SeriesError,
    SingularPropagatorError,
)
from .scatter_core import BarrierAsymptotic, BarrierSpec, Propagator2, Regime, Scattering2

__all__ = [
    "BarrierAsymptotic",
    "BarrierSpec",
    "ExcludedConfigurationError",
    "IntegrationError",
    "InvalidInputError",
    "MirrorwaveError",
    "PrecisionError",
    "Propagator2",
    "QuadratureError",
    "Regime",
    "ResonanceError",
    "Scattering2",
    "SeriesControl",
    "SeriesError",
    "SingularPropagatorError",
    "constant_C",
    "mean_intensity_independent",
    "mean_intensity_symmetric",
    "transmission_moment",
]
