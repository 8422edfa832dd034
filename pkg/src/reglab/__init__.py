"""Mahler measures of x + 1/x + y + 1/y + k and the regulator identities
relating them: quadrature, elliptic-curve divisors, Bloch's elliptic
dilogarithm and the L-function check at k = 1."""

from .curve import WeierstrassCurve, curve_from_h, curve_from_k, named_points
from .divisor import DiamondClass, Divisor, diamond, divisor_of
from .mahler import CurveParam, QuadratureConfig, mahler_measure
from .periods import elliptic_dilog_class, elliptic_log, period_lattice
from .specfun import bloch_wigner, li2

__version__ = "0.1.0"
