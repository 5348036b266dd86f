"""Exact double Hurwitz numbers, pruning, and topological recursion checks
on the rational curve x = z exp(-s P(z)), y = P(z)."""

from .cutjoin import DHTable, ResourceLimitError
from .curve import CurveSpec, SpectralCurve, a_mu_coefficient, invert_x_exact
from .oracle import FactorizationOracle
from .pruning import PruningKernel, PruningTransform
from .quantum import WaveFunction, apply_quantum_curve, semiclassical_check
from .series import ComplexRing, Poly, RationalRing, Series, SeriesRing
from .toprec import CorrelationForm, RecursionEngine
from .weightpoly import WeightPolynomial, WeightPolyRing

__version__ = "0.1.0"

__all__ = [
    "DHTable", "ResourceLimitError", "CurveSpec", "SpectralCurve",
    "a_mu_coefficient", "invert_x_exact", "FactorizationOracle",
    "PruningKernel", "PruningTransform", "WaveFunction",
    "apply_quantum_curve", "semiclassical_check", "ComplexRing", "Poly",
    "RationalRing", "Series", "SeriesRing", "CorrelationForm",
    "RecursionEngine", "WeightPolynomial", "WeightPolyRing", "__version__",
]
