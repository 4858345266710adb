"""Exception types shared across the package."""


class SimulationFault(ValueError):
    """Raised when a simulation or controller step receives invalid input."""


class InsufficientDataError(ValueError):
    """Raised when an estimator has too few usable samples to fit."""


class ConfigError(ValueError):
    """Invalid scenario configuration.

    ``path`` names the offending field, e.g. ``command[2].mode``.
    """

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
