"""Bivariate standard normal CDF by Taylor expansion on the diagonal."""

from .diagonal import diagonal_bounds, phi2_diagonal
from .reduction import Correlation, DomainError, phi2
from .univariate import cdf, density

__all__ = [
    "Correlation",
    "DomainError",
    "cdf",
    "density",
    "diagonal_bounds",
    "phi2",
    "phi2_diagonal",
]
