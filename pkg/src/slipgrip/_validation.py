import math

from .exceptions import SimulationFault


def check_finite(**values):
    """Raise SimulationFault naming the first non-finite keyword value."""
    for name, value in values.items():
        if not math.isfinite(value):
            raise SimulationFault(f"{name} must be finite, got {value!r}")


def check_positive(**values):
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be strictly positive, got {value!r}")
