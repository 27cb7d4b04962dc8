"""Random Dirichlet series over the primes and random multiplicative functions."""

from ._backend import BACKEND, get_kernels
from .dirichlet import (PathQuery, SeriesQuery, VarianceBreakdown, g_hybrid, lil_normalizer,
                        lil_sequence, partial_series, path_sample, prime_walk,
                        truncated_covariance, truncated_variance)
from .multiplicative import (DecompositionReport, FactorSignError, euler_product,
                             log_decomposition, remainder_bound, remainder_R, remainder_R_star,
                             sieve_multiplicative, smooth_expansion_sum)
from .noise import NoiseModel, SeedSpec
from .primes import PrimeTable, ResourceLimitError, prime_count, sieve_primes

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "get_kernels", "PathQuery", "SeriesQuery", "VarianceBreakdown", "g_hybrid",
    "lil_normalizer", "lil_sequence", "partial_series", "path_sample", "prime_walk",
    "truncated_covariance", "truncated_variance", "DecompositionReport", "FactorSignError",
    "euler_product", "log_decomposition", "remainder_bound", "remainder_R", "remainder_R_star",
    "sieve_multiplicative", "smooth_expansion_sum", "NoiseModel", "SeedSpec", "PrimeTable",
    "ResourceLimitError", "prime_count", "sieve_primes",
]
