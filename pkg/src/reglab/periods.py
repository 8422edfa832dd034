"""Period lattice, elliptic logarithm and Bloch's elliptic dilogarithm.

Conventions for ``E: Y^2 = X^3 + aX^2 + X``:

* the invariant differential is ``dX / (2Y)``, so ``X = wp(z) - a/3`` and
  ``Y = wp'(z) / 2`` for the Weierstrass function of the period lattice;
* ``u = exp(2 pi i z / omega1)``, ``q = exp(2 pi i tau)``, ``tau = omega2/omega1``;
* ``D_E(u) = sum_n D(q^n u)`` with ``D`` the Bloch-Wigner function.

``D_E`` depends on which primitive period is called ``omega1``; it is *not*
invariant under ``tau -> -1/tau``.  For curves defined over the reals the
default normalisation takes ``omega1`` to be the positive primitive real
period, which is the normalisation in which regulator values of real
curves are expressed.  ``normalization="reduced"`` gives the classical
fundamental-domain basis instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import elliprf

from .curve import O, OffCurveError, Point, SingularCurveError, WeierstrassCurve, close
from .divisor import DiamondClass, MixedCurveError
from .specfun import bloch_wigner_array

__all__ = [
    "Lattice",
    "TorusCoord",
    "period_lattice",
    "weierstrass_p",
    "parametrize",
    "elliptic_log",
    "elliptic_dilog_point",
    "elliptic_dilog_class",
    "reduce_mod_lattice",
]

TWO_PI_I = 2j * math.pi


@dataclass(frozen=True)
class Lattice:
    omega1: complex
    omega2: complex
    curve: WeierstrassCurve
    normalization: str = "real"

    @property
    def tau(self) -> complex:
        return self.omega2 / self.omega1

    @property
    def q(self) -> complex:
        return cmath.exp(TWO_PI_I * self.tau)

    def coords(self, z: complex) -> tuple[float, float]:
        """Real coordinates ``(s, t)`` with ``z = s*omega1 + t*omega2``."""
        m = np.array(
            [[self.omega1.real, self.omega2.real], [self.omega1.imag, self.omega2.imag]]
        )
        s, t = np.linalg.solve(m, [z.real, z.imag])
        return float(s), float(t)


@dataclass(frozen=True)
class TorusCoord:
    z: complex
    u: complex


# --------------------------------------------------------------------------
# periods


_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)


def _graded_nodes(depth: int = 44) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre on panels of ``[0, pi/2]`` refined geometrically at both ends."""
    half = math.pi / 4
    cuts = [half * 2.0**-j for j in range(depth)] + [0.0]
    left = sorted(set(cuts))
    edges = left + [math.pi / 2 - c for c in reversed(left[:-1])]
    a = np.array(edges[:-1])
    b = np.array(edges[1:])
    mid, rad = (a + b) / 2, (b - a) / 2
    t = (mid[:, None] + rad[:, None] * _GL_X[None, :]).ravel()
    w = (rad[:, None] * _GL_W[None, :]).ravel()
    return t, w


_SEG_T, _SEG_W = _graded_nodes()


def _segment_period(ei: complex, ej: complex, ek: complex) -> complex:
    """``int_{ei}^{ej} dX / Y`` along the straight segment (one sheet).

    ``X = ei + (ej - ei) sin^2(t)`` turns the endpoint singularities into
    ``-2i / sqrt(X - ek)`` on ``[0, pi/2]``.  That is smooth, but nearly
    singular at an end when ``ek`` sits close to ``ei`` or ``ej``; the
    graded panels absorb this at any scale.
    """
    wi, wj = ei - ek, ej - ek
    rot = wi / abs(wi) + wj / abs(wj)
    rot /= abs(rot)
    X = ei + (ej - ei) * np.sin(_SEG_T) ** 2
    # the segment avoids ek, so sqrt((X - ek)/rot) stays on one branch
    s = np.sqrt((X - ek) / rot) * cmath.sqrt(rot)
    return complex(np.sum(_SEG_W * (-2j) / s))


def _lagrange_reduce(w1: complex, w2: complex) -> tuple[complex, complex]:
    if abs(w1) > abs(w2):
        w1, w2 = w2, w1
    while True:
        mu = round((w2 * w1.conjugate()).real / abs(w1) ** 2)
        w2 = w2 - mu * w1
        if abs(w2) >= abs(w1):
            return w1, w2
        w1, w2 = w2, w1


def _orient(w1: complex, w2: complex) -> tuple[complex, complex]:
    if (w2 / w1).imag < 0:
        w2 = -w2
    return w1, w2


def _t_shift(w1: complex, w2: complex) -> tuple[complex, complex]:
    # Re tau in [-1/2, 1/2)
    return w1, w2 - math.floor((w2 / w1).real + 0.5 + 1e-12) * w1


def _reduce_fundamental(w1: complex, w2: complex) -> tuple[complex, complex]:
    w1, w2 = _orient(w1, w2)
    for _ in range(100):
        w1, w2 = _t_shift(w1, w2)
        tau = w2 / w1
        if abs(tau) >= 1 - 1e-15:
            break
        w1, w2 = w2, -w1
    return w1, w2


def _real_basis(w1: complex, w2: complex) -> tuple[complex, complex]:
    best = None
    for m in range(-4, 5):
        for n in range(-4, 5):
            if (m, n) == (0, 0) or math.gcd(m, n) != 1:
                continue
            v = m * w1 + n * w2
            if abs(v.imag) <= 1e-9 * abs(v) and (best is None or abs(v) < abs(best[0]) - 1e-12):
                best = (v, m, n)
    if best is None:
        raise ArithmeticError("no real period found for a real curve")
    v, m, n = best
    # complete (m, n) to a unimodular matrix
    g, x, y = _egcd(m, n)
    # m*x + n*y = 1  ->  second row (-y, x)
    other = -y * w1 + x * w2
    omega1 = complex(abs(v.real), 0.0)
    sign = 1 if v.real > 0 else -1
    omega2 = sign * other
    return _t_shift(*_orient(omega1, omega2))


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (abs(a), (1 if a > 0 else -1), 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def is_real_curve(E: WeierstrassCurve) -> bool:
    return abs(E.a.imag) <= 1e-14 * (1 + abs(E.a))


def period_lattice(
    E: WeierstrassCurve, normalization: str = "auto", roots=None
) -> Lattice:
    """Period lattice of ``dX/(2Y)`` on ``E``.

    ``normalization``: ``"real"`` (positive primitive real period first;
    real curves only), ``"reduced"`` (tau in the standard fundamental
    domain) or ``"auto"`` (real when ``E`` is real).  ``roots`` may fix the
    labelling of the cubic's roots; the result does not depend on it.
    """
    if normalization not in ("auto", "real", "reduced"):
        raise ValueError(f"unknown normalization {normalization!r}")
    roots = E.roots() if roots is None else [complex(r) for r in roots]
    if len(roots) != 3 or max(abs(E.rhs(r)) for r in roots) > 1e-8 * (1 + abs(E.a)) ** 3:
        raise ValueError("roots do not belong to this curve")
    if min(abs(roots[i] - roots[j]) for i in range(3) for j in range(i + 1, 3)) == 0:
        raise SingularCurveError("repeated root")
    # share the vertex with the widest angle so neither segment meets the third root
    def angle(j):
        i, l = [x for x in range(3) if x != j]
        u, v = roots[i] - roots[j], roots[l] - roots[j]
        return abs(cmath.phase(u / v))

    j = max(range(3), key=angle)
    i, l = [x for x in range(3) if x != j]
    wa = _segment_period(roots[i], roots[j], roots[l])
    wb = _segment_period(roots[j], roots[l], roots[i])
    w1, w2 = _lagrange_reduce(wa, wb)
    if normalization == "auto":
        normalization = "real" if is_real_curve(E) else "reduced"
    if normalization == "real":
        if not is_real_curve(E):
            raise ValueError("real normalization needs a curve defined over R")
        w1, w2 = _real_basis(w1, w2)
    else:
        w1, w2 = _reduce_fundamental(w1, w2)
    return Lattice(complex(w1), complex(w2), E, normalization)


# --------------------------------------------------------------------------
# Weierstrass parametrisation


def reduce_mod_lattice(L: Lattice, z: complex) -> complex:
    """Representative of ``z`` with coordinates in ``[-1/2, 1/2)^2``."""
    s, t = L.coords(complex(z))
    s -= math.floor(s + 0.5)
    t -= math.floor(t + 0.5)
    return s * L.omega1 + t * L.omega2


def _nterms(q: complex, cutoff: float) -> int:
    aq = abs(q)
    return max(2, int(math.ceil(math.log(cutoff) / math.log(aq) + 0.5)) + 1)


def weierstrass_p(L: Lattice, z: complex, cutoff: float = 1e-18) -> tuple[complex, complex]:
    """``(wp(z), wp'(z))`` from the q-expansion."""
    z = reduce_mod_lattice(L, z)
    c = TWO_PI_I / L.omega1
    u = cmath.exp(c * z)
    q = L.q
    n = np.arange(1, _nterms(q, cutoff) + 1)
    qn = q**n
    a, b = qn * u, qn / u
    p = 1 / 12 + u / (1 - u) ** 2
    p += np.sum(a / (1 - a) ** 2 + b / (1 - b) ** 2 - 2 * qn / (1 - qn) ** 2)

    def f(x):
        return x * (1 + x) / (1 - x) ** 3

    dp = f(u) + np.sum(f(a) - f(b))
    return complex(c * c * p), complex(c**3 * dp)


def parametrize(L: Lattice, z: complex) -> Point:
    """Point of ``E`` with elliptic logarithm ``z``."""
    z = reduce_mod_lattice(L, z)
    if abs(z) <= 1e-14 * abs(L.omega1):
        return O
    p, dp = weierstrass_p(L, z)
    return Point(p - L.curve.a / 3, dp / 2)


def _carlson_log(E: WeierstrassCurve, X0: complex) -> complex:
    roots = E.roots()
    best = None
    for j in range(16):
        d = cmath.exp(2j * math.pi * j / 16)
        margin = min(
            (math.pi - abs(cmath.phase((X0 - e) / d)))
            for e in roots
            if abs(X0 - e) > 1e-14 * (1 + abs(e))
        ) if any(abs(X0 - e) > 1e-14 * (1 + abs(e)) for e in roots) else math.pi
        if best is None or margin > best[0]:
            best = (margin, d)
    d = best[1]
    args = [(X0 - e) / d for e in roots]
    return complex(elliprf(*args)) / cmath.sqrt(d)


def elliptic_log(E: WeierstrassCurve, L: Lattice, S: Point) -> TorusCoord:
    """``z`` with ``parametrize(L, z) == S``, reduced mod the lattice."""
    if not close(E.a, L.curve.a, 1e-12):
        raise MixedCurveError("lattice belongs to another curve")
    if S.is_infinity:
        return TorusCoord(0j, 1 + 0j)
    E.check(S)
    if E.is_two_torsion(S):
        # wp' vanishes here, so match against the half periods instead
        halves = (L.omega1 / 2, L.omega2 / 2, (L.omega1 + L.omega2) / 2)
        z = min(halves, key=lambda w: abs(parametrize(L, w).X - S.X))
        z = reduce_mod_lattice(L, z)
        return TorusCoord(z, cmath.exp(TWO_PI_I * z / L.omega1))
    z0 = _carlson_log(E, S.X)
    x0 = S.X + E.a / 3

    def miss(z):
        T = parametrize(L, z)
        if T.is_infinity:
            return math.inf
        return abs(T.X - S.X) + abs(T.Y - S.Y)

    z = min((z0, -z0), key=miss)
    for _ in range(4):
        p, dp = weierstrass_p(L, z)
        if abs(dp) <= 1e-8 * (1 + abs(p)) ** 1.5:
            break
        step = (p - x0) / dp
        z = z - step
        if abs(step) <= 1e-17 * abs(L.omega1):
            break
    T = parametrize(L, z)
    scale = 1 + abs(S.X)
    if T.is_infinity or abs(T.X - S.X) > 1e-9 * scale or abs(T.Y - S.Y) > 1e-7 * (1 + abs(S.Y)):
        raise OffCurveError(f"elliptic logarithm did not reproduce {S}")
    z = reduce_mod_lattice(L, z)
    return TorusCoord(z, cmath.exp(TWO_PI_I * z / L.omega1))


# --------------------------------------------------------------------------
# elliptic dilogarithm


def elliptic_dilog_point(L: Lattice, t: TorusCoord | complex, cutoff: float = 1e-18) -> float:
    """``D_E(u) = D(u) + sum_{n>=1} (D(q^n u) - D(q^n / u))``.

    Terms stop once ``|q|^(n - 1/2)`` drops below ``cutoff``.
    """
    z = t.z if isinstance(t, TorusCoord) else complex(t)
    z = reduce_mod_lattice(L, z)
    u = cmath.exp(TWO_PI_I * z / L.omega1)
    q = L.q
    n = np.arange(1, _nterms(q, cutoff) + 1)
    qn = q**n
    args = np.concatenate(([u], qn * u, qn / u))
    vals = bloch_wigner_array(args)
    m = n.size
    return math.fsum([vals[0], *vals[1 : m + 1], *(-vals[m + 1 :])])


def elliptic_dilog_class(L: Lattice, c: DiamondClass, cutoff: float = 1e-18) -> float:
    """Linear extension of ``D_E`` to ``Z[E(C)]^-``."""
    if not close(c.curve.a, L.curve.a, 1e-12) or not close(c.curve.k, L.curve.k, 1e-12):
        raise MixedCurveError("class and lattice live on different curves")
    E = L.curve
    return math.fsum(
        coeff * elliptic_dilog_point(L, elliptic_log(E, L, S), cutoff) for S, coeff in c.terms
    )
