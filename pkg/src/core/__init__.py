"""Coefficients, the Weyl algebra and the Psi basis"""

from .coeff import Scalar, div_exact
from .errors import AlgebraError
from .psi import SYMBOLIC, BasisLabel, ParamPoint, PsiElement, rho, rho_star, xi
from .weil import WElement, generator

__all__ = [
    "Scalar",
    "div_exact",
    "AlgebraError",
    "SYMBOLIC",
    "BasisLabel",
    "ParamPoint",
    "PsiElement",
    "rho",
    "rho_star",
    "xi",
    "WElement",
    "generator",
]
