"""Numerical laboratory for primes with a missing digit.

Submodules
----------
digitset   restricted-digit sets, counts, density constants
fourier    the normalized exponential sum over the set and its moments
markov     transition matrices of local suprema and their Perron root
buchstab   Buchstab's function and the sieve-loss integrals
primes     sieves, primality, and prime statistics inside the set
"""
from .digitset import DigitSystem, count, enumerate_members, kappa_constants, membership
from .errors import BudgetExhausted, ConvergenceError, ResourceError, UnsupportedConfiguration

__version__ = "0.1.0"

__all__ = [
    "DigitSystem",
    "count",
    "enumerate_members",
    "kappa_constants",
    "membership",
    "BudgetExhausted",
    "ConvergenceError",
    "ResourceError",
    "UnsupportedConfiguration",
]
