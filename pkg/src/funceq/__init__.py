"""Complete coefficient asymptotics for Phi(z) = P(z) + Phi(Q(z))."""
from .boundary import LogTResult, ln_T
from .conjugacy import SchroderData, build_schroder, inverse_Q, poincare_eval, psi_eval
from .expansion import ExpansionTable, K_eval, asymptotic_coeff, build_expansion
from .oracle import CoefficientTable, exact_coefficients
from .polynomial import Polynomial
from .problem import ProblemSpec, two_three_tree_spec, validate_spec
from .spectrum import FourierSpectrum, compute_spectrum

__all__ = [
    "CoefficientTable",
    "ExpansionTable",
    "FourierSpectrum",
    "K_eval",
    "LogTResult",
    "Polynomial",
    "ProblemSpec",
    "SchroderData",
    "asymptotic_coeff",
    "build_expansion",
    "build_schroder",
    "compute_spectrum",
    "exact_coefficients",
    "inverse_Q",
    "ln_T",
    "poincare_eval",
    "psi_eval",
    "two_three_tree_spec",
    "validate_spec",
]
