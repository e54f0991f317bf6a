"""Exact computations in twisted de Rham complexes ``(Omega, d + df ^)``.

Modules: ``rings`` (coefficient rings and homomorphisms), ``poly`` and
``forms`` (polynomials and differential forms), ``perturb`` (normalized
Gaussian integrals), ``milnor`` (Jacobian-ring reduction with witnesses),
``families`` (Gauss-Manin and Picard-Fuchs), ``constraints`` (elimination of
constraints by auxiliary variables), ``dwork`` (p-adic Frobenius).
"""

__version__ = "0.1.0"

from .errors import TwDeRhamError  # noqa: E402
from .rings import (  # noqa: E402
    Integers,
    Modular,
    PiAdic,
    Rationals,
    RationalFunctions,
    RingHom,
    TruncatedSeries,
    parse_ring,
)
from .poly import Poly  # noqa: E402
from .forms import Form, TwistedComplex, twisted_d  # noqa: E402
from .parse import parse_form, parse_poly  # noqa: E402

__all__ = [
    "TwDeRhamError",
    "Integers",
    "Modular",
    "PiAdic",
    "Rationals",
    "RationalFunctions",
    "RingHom",
    "TruncatedSeries",
    "parse_ring",
    "Poly",
    "Form",
    "TwistedComplex",
    "twisted_d",
    "parse_form",
    "parse_poly",
]
