"""Spectral-norm distance bounds to matrix polynomials with a prescribed
multiple eigenvalue, and the perturbations that attain them."""

__version__ = "0.1.0"

from .analysis import Analysis, analyze
from .corrector import correct, diagnose
from .matpoly import MatrixPolynomial, WeightSet, is_weakly_normal, phi
from .pencil import GammaSearchOptions, build_F, maximize_gamma, sample_curve, sigma_pair
from .perturbation import perturb, precheck_hypotheses, verify_multiple

__all__ = [
    "Analysis",
    "GammaSearchOptions",
    "MatrixPolynomial",
    "WeightSet",
    "analyze",
    "build_F",
    "correct",
    "diagnose",
    "is_weakly_normal",
    "maximize_gamma",
    "perturb",
    "phi",
    "precheck_hypotheses",
    "sample_curve",
    "sigma_pair",
    "verify_multiple",
]
