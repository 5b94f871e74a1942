"""Exception hierarchy shared by all modules."""


class FloqlieError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(FloqlieError, ValueError):
    """An argument is outside its documented domain."""


class CapacityError(FloqlieError):
    """A size limit (dimension cap, recursion depth) would be exceeded."""


class ResonanceError(FloqlieError, ArithmeticError):
    """A retained denominator is (numerically) resonant."""


class StrongCouplingError(FloqlieError, ArithmeticError):
    """A small-rotation angle does not exist for the given coupling."""


class IntegratorError(FloqlieError, RuntimeError):
    """The propagator violated its unitarity contract."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class LeakageError(FloqlieError, RuntimeError):
    """Population reached the top levels of a truncated bosonic factor."""

    def __init__(self, message, leakage=None, time=None):
        super().__init__(message)
        self.leakage = leakage
        self.time = time


class ConfigurationError(FloqlieError, ValueError):
    """A run or scan configuration is inconsistent."""


class NoOscillationError(FloqlieError, ValueError):
    """A trajectory carries no resolvable oscillation."""
