"""Independent extended-accuracy reference for the bivariate normal CDF."""

from .core import (
    AccuracyError,
    QuadratureSpec,
    doubling_estimate,
    oracle,
    oracle_batch,
    oracle_dd,
    phi2_plackett,
    phi2_tetrachoric,
    plackett_batch,
    plackett_fixed,
    tetrachoric_batch,
)
from .dd import CompensatedValue
from .normal import cdf_dd

__all__ = [
    "AccuracyError",
    "CompensatedValue",
    "QuadratureSpec",
    "cdf_dd",
    "doubling_estimate",
    "oracle",
    "oracle_batch",
    "oracle_dd",
    "phi2_plackett",
    "phi2_tetrachoric",
    "plackett_batch",
    "plackett_fixed",
    "tetrachoric_batch",
]
