"""Exact-form solutions of  f'(f - L f) = phi (f - a)(f - b)  among
exponential polynomials, with numerical cross-checks."""
from .errors import InvalidInput, NumericalFailure
from .expsum import ExpSum, ExpTerm
from .ode import OdeSpec, VerifyReport, infer_phi, residual, verify
from .classify import SolutionCandidate, classify, characteristic_roots
from .oracle import Rect, ZeroReport, check_multiplicity, count_zeros, sample_residual

__all__ = [
    "InvalidInput", "NumericalFailure", "ExpSum", "ExpTerm", "OdeSpec", "VerifyReport",
    "infer_phi", "residual", "verify", "SolutionCandidate", "classify",
    "characteristic_roots", "Rect", "ZeroReport", "check_multiplicity", "count_zeros",
    "sample_residual",
]
