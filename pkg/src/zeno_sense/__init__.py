"""Parameter estimation with a two-level probe under coherent or stroboscopically
projected evolution, with closed forms checked against a density-matrix oracle."""

from .bloch import PolarizationVector, PrecessionFrequency, MeasurementSchedule
from .qfi import QfiEvaluation
from .specfun import lambert_w0, phi, xi

__version__ = "0.1.0"

__all__ = [
    "PolarizationVector",
    "PrecessionFrequency",
    "MeasurementSchedule",
    "QfiEvaluation",
    "lambert_w0",
    "phi",
    "xi",
]
