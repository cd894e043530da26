"""Neyman's smooth test and novelty detection."""

from cpow_innovation.nst.chi_square import chi_square_cdf, chi_square_quantile
from cpow_innovation.nst.legendre import MAX_ORDER, legendre_kernel, legendre_matrix
from cpow_innovation.nst.novelty import NoveltyResult, detect_novelty
from cpow_innovation.nst.smooth_test import (
    Hypothesis,
    NstConfig,
    NstResult,
    ks_uniform_distance,
    nst_statistic,
    nst_test,
)

__all__ = [
    "Hypothesis",
    "MAX_ORDER",
    "NoveltyResult",
    "NstConfig",
    "NstResult",
    "chi_square_cdf",
    "chi_square_quantile",
    "detect_novelty",
    "ks_uniform_distance",
    "legendre_kernel",
    "legendre_matrix",
    "nst_statistic",
    "nst_test",
]
