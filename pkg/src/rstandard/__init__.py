"""Exact p-adic toolkit for standard groups over Zp[[t1..tm]].

Formal group laws, their Lazard Lie lattices, verified faithful linear
representations, and certificates that a finite set of points is
separated by a homomorphism into GL_n(Zp).
"""
from .errors import RStandardError
from .fgl import (FormalGroupLaw, StandardPoint, additive_law, gcomm, ginv, gmul, gpow, heisenberg_law,
                  multiplicative_law, twisted_multiplicative_law, validate_law, zp_point)
from .series import MultiSeries, RingDescriptor, RingElement, evaluate
from .zp import PadicMatrix, PadicScalar

__version__ = "0.1.0"

__all__ = [
    "RStandardError", "FormalGroupLaw", "StandardPoint", "additive_law", "gcomm", "ginv", "gmul",
    "gpow", "heisenberg_law", "multiplicative_law", "twisted_multiplicative_law", "validate_law",
    "zp_point", "MultiSeries", "RingDescriptor", "RingElement", "evaluate", "PadicMatrix",
    "PadicScalar",
]
