"""
Eisenstein-Kronecker-Lerch series on a lattice in C: the completed and normalized
series K*_a, theta functions attached to the lattice, numerical checks of the
limit formulas and their p-adic analogue on CM models.
"""
from .common import EKError
from .lattice import Lattice, new_lattice, parse_lattice
from .numeric import DEFAULT_CONFIG, PrecisionConfig
from .eklerch import EKQuery, EKResult, kstar, kstar_regularized
from .weierstrass import build_context, cached_context, sigma, theta, wp
from .report import VerificationReport

__version__ = "0.1.0"
