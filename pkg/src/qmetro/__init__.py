"""Precision limits for optical phase interferometry.

Exact Fock-space tools, quantum Fisher information, Bayesian covariant
costs, decoherence bounds, Gaussian benchmarks and a particle-picture oracle.
"""

from . import (bayes, bounds, channels, classical_est, errorprop, errors,
               fock_core, gaussian, particle_oracle, qfi)

__version__ = "0.1.0"

__all__ = ["bayes", "bounds", "channels", "classical_est", "errorprop", "errors",
           "fock_core", "gaussian", "particle_oracle", "qfi"]
