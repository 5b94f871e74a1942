"""Resonance structure of periodically modulated quantum systems.

Submodules
----------
liealg
    Truncated representations of su(2), su(1,1) and h(1) and their tensor
    products.
coeffs
    Effective couplings and frequency shifts (recursions, Bessel series).
models
    Time-dependent Hamiltonians in the form ``h_static + cos(nu t) h_mod`` and
    closed-form effective predictions.
dynamics
    Fourth-order Magnus propagation with unitarity and truncation guards.
resonance
    Frequency scans, Rabi-frequency extraction and comparisons.
estimators
    scikit-learn style wrappers (imported on demand).
cli
    Command-line interface.
"""

from . import coeffs, dynamics, liealg, models, resonance
from .exceptions import (CapacityError, ConfigurationError, FloqlieError, IntegratorError,
                         LeakageError, NoOscillationError, ParameterError, ResonanceError,
                         StrongCouplingError)

__version__ = "0.1.0"

__all__ = [
    "liealg",
    "coeffs",
    "models",
    "dynamics",
    "resonance",
    "FloqlieError",
    "ParameterError",
    "CapacityError",
    "ResonanceError",
    "StrongCouplingError",
    "IntegratorError",
    "LeakageError",
    "ConfigurationError",
    "NoOscillationError",
]
