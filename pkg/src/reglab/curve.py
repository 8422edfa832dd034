"""The Weierstrass model ``Y^2 = X(X^2 + (k^2/4 - 2) X + 1)`` of ``E_k``.

Coordinates are complex floats; point equality is tolerance based (relative
``1e-8``).  Functions on the curve are stored as ``a(X) + b(X) * Y`` with
numpy polynomial coefficient arrays (lowest degree first).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

__all__ = [
    "SingularCurveError",
    "OffCurveError",
    "Point",
    "O",
    "WeierstrassCurve",
    "CurveFunction",
    "CurveRational",
    "curve_from_k",
    "curve_from_h",
    "add",
    "neg",
    "mul",
    "named_points",
    "standard_labels",
    "functions_xy",
    "function_f",
    "function_g",
    "function_g_sigma",
    "iso_phi",
    "phi_codomain",
    "pullback",
]

POINT_RTOL = 1e-8
ON_CURVE_TOL = 1e-10
SQRT5 = 5**0.5


class SingularCurveError(ValueError):
    pass


class OffCurveError(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    """Affine point ``(X, Y)`` or, with both fields ``None``, the origin ``O``."""

    X: complex | None = None
    Y: complex | None = None

    def __post_init__(self):
        if (self.X is None) != (self.Y is None):
            raise ValueError("give both coordinates or neither")
        if self.X is not None:
            object.__setattr__(self, "X", complex(self.X))
            object.__setattr__(self, "Y", complex(self.Y))

    @property
    def is_infinity(self) -> bool:
        return self.X is None

    def __neg__(self) -> "Point":
        return self if self.is_infinity else Point(self.X, -self.Y)

    def __repr__(self) -> str:
        if self.is_infinity:
            return "O"
        return f"({_fmt(self.X)}, {_fmt(self.Y)})"


O = Point()


def _fmt(z: complex) -> str:
    z = complex(z)
    if abs(z.imag) <= 1e-14 * (1 + abs(z)):
        return f"{z.real:.12g}"
    if abs(z.real) <= 1e-14 * (1 + abs(z)):
        return f"{z.imag:.12g}j"
    return f"{z.real:.12g}{z.imag:+.12g}j"


def close(u: complex, v: complex, rtol: float = POINT_RTOL) -> bool:
    return abs(u - v) <= rtol * (1 + max(abs(u), abs(v)))


@dataclass(frozen=True)
class WeierstrassCurve:
    k: complex
    a: complex = field(init=False)

    def __post_init__(self):
        k = complex(self.k)
        object.__setattr__(self, "k", k)
        if k == 0 or k * k == 16:
            raise SingularCurveError(f"E_k is singular for k={k}")
        object.__setattr__(self, "a", k * k / 4 - 2)

    @property
    def cubic(self) -> np.ndarray:
        """Coefficients of ``X^3 + a X^2 + X`` (lowest degree first)."""
        return np.array([0, 1, self.a, 1], dtype=complex)

    def rhs(self, X: complex) -> complex:
        return X * (X * X + self.a * X + 1)

    def roots(self) -> np.ndarray:
        """The three 2-torsion abscissae ``0, r, 1/r``."""
        d = cmath.sqrt(self.a * self.a - 4)
        r1 = (-self.a - d) / 2 if abs(-self.a - d) >= abs(-self.a + d) else (-self.a + d) / 2
        return np.array([0, r1, 1 / r1], dtype=complex)

    def residual(self, S: Point) -> float:
        if S.is_infinity:
            return 0.0
        return abs(S.Y * S.Y - self.rhs(S.X)) / (1 + abs(S.X) ** 3)

    def contains(self, S: Point, tol: float = ON_CURVE_TOL) -> bool:
        return self.residual(S) <= tol

    def check(self, S: Point, tol: float = ON_CURVE_TOL) -> Point:
        if not self.contains(S, tol):
            raise OffCurveError(f"{S} is not on E_k for k={self.k}")
        return S

    def is_two_torsion(self, S: Point) -> bool:
        return not S.is_infinity and abs(S.Y) <= POINT_RTOL * (1 + abs(S.X))

    def equal(self, S: Point, T: Point, rtol: float = POINT_RTOL) -> bool:
        if S.is_infinity or T.is_infinity:
            return S.is_infinity and T.is_infinity
        return close(S.X, T.X, rtol) and close(S.Y, T.Y, rtol)

    # group law -------------------------------------------------------

    def add(self, S: Point, T: Point) -> Point:
        if S.is_infinity:
            return T
        if T.is_infinity:
            return S
        if close(S.X, T.X):
            if self.is_two_torsion(S) or close(S.Y, -T.Y):
                return O
            if not close(S.Y, T.Y):
                raise OffCurveError(f"{S} and {T} share X but not +-Y")
            lam = (3 * S.X * S.X + 2 * self.a * S.X + 1) / (2 * S.Y)
        else:
            lam = (T.Y - S.Y) / (T.X - S.X)
        X3 = lam * lam - self.a - S.X - T.X
        Y3 = -(S.Y + lam * (X3 - S.X))
        return Point(X3, Y3)

    def neg(self, S: Point) -> Point:
        return -S

    def sub(self, S: Point, T: Point) -> Point:
        return self.add(S, -T)

    def mul(self, n: int, S: Point) -> Point:
        if n < 0:
            return self.mul(-n, -S)
        result = O
        base = S
        while n:
            if n & 1:
                result = self.add(result, base)
            base = self.add(base, base)
            n >>= 1
        return result

    def random_point(self, rng: np.random.Generator) -> Point:
        X = complex(*rng.normal(size=2))
        return Point(X, cmath.sqrt(self.rhs(X)))


def curve_from_k(k: complex) -> WeierstrassCurve:
    return WeierstrassCurve(k)


def curve_from_h(h: complex) -> WeierstrassCurve:
    h = complex(h)
    if h == 0:
        raise SingularCurveError("h must be nonzero")
    return WeierstrassCurve(2 * (h + 1 / h))


def add(E: WeierstrassCurve, S: Point, T: Point) -> Point:
    E.check(S)
    E.check(T)
    return E.add(S, T)


def neg(T: Point) -> Point:
    return -T


def mul(E: WeierstrassCurve, n: int, T: Point) -> Point:
    E.check(T)
    return E.mul(n, T)


def named_points(h: complex) -> dict[str, Point]:
    """P, Q, P+Q, 2P, 2P+Q, A, B on ``E_{2(h + 1/h)}``.

    ``A`` takes the principal square root of ``9 - 16 h^2``.
    """
    h = complex(h)
    E = curve_from_h(h)
    k = E.k
    s = cmath.sqrt(9 - 16 * h * h)
    base = 3.5 * h - 1.5 / h
    pts = {
        "P": Point(1, k / 2),
        "Q": Point(-1 / h**2, 0),
        "P+Q": Point(-1, h - 1 / h),
        "2P": Point(0, 0),
        "2P+Q": Point(-(h**2), 0),
        "A": Point((-3 + s) / 2, base - (h - 1 / h) * s / 2),
        "B": Point((-3 - s) / 2, base + (h - 1 / h) * s / 2),
    }
    for name, S in pts.items():
        if not E.contains(S):
            raise OffCurveError(f"named point {name} failed the curve equation")
    return pts


def standard_labels(h: complex) -> dict[str, Point]:
    """Named points plus the translates by ``Q`` that appear in relations.

    Ordered for label lookup: at ``h = 1/sqrt2`` one has ``A = -(P+Q)`` and
    ``B = Q``, and the earlier names win.
    """
    E = curve_from_h(h)
    p = named_points(h)
    order = ["P", "P+Q", "Q", "2P", "2P+Q", "A", "B"]
    out = {name: p[name] for name in order}
    out["Q+A"] = E.add(p["Q"], p["A"])
    out["Q+B"] = E.add(p["Q"], p["B"])
    return out


# --------------------------------------------------------------------------
# functions on the curve


def _trim(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    nz = np.nonzero(c)[0]
    return c[: nz[-1] + 1] if nz.size else np.zeros(1, dtype=complex)


@dataclass(frozen=True)
class CurveFunction:
    """``a(X) + b(X) * Y``; coefficient arrays lowest degree first."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _trim(self.a))
        object.__setattr__(self, "b", _trim(self.b))
        if self.is_zero:
            raise ValueError("the zero function has no divisor")

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.a) or np.any(self.b))

    @property
    def is_constant(self) -> bool:
        return self.a.size == 1 and not np.any(self.b)

    def __call__(self, S: Point) -> complex:
        if S.is_infinity:
            raise ValueError("curve functions are evaluated at affine points only")
        return complex(npoly.polyval(S.X, self.a) + npoly.polyval(S.X, self.b) * S.Y)

    def one_minus(self) -> "CurveFunction":
        return CurveFunction(npoly.polysub([1], self.a), -self.b)

    def times(self, other: "CurveFunction", E: WeierstrassCurve) -> "CurveFunction":
        a = npoly.polyadd(
            npoly.polymul(self.a, other.a),
            npoly.polymul(npoly.polymul(self.b, other.b), E.cubic),
        )
        b = npoly.polyadd(npoly.polymul(self.a, other.b), npoly.polymul(self.b, other.a))
        return CurveFunction(a, b)

    def conjugate_y(self) -> "CurveFunction":
        """Image under the involution ``Y -> -Y``."""
        return CurveFunction(self.a, -self.b)

    def __repr__(self) -> str:
        return f"CurveFunction(a={np.round(self.a, 12)}, b={np.round(self.b, 12)})"


@dataclass(frozen=True)
class CurveRational:
    num: CurveFunction
    den: CurveFunction

    def __call__(self, S: Point) -> complex:
        return self.num(S) / self.den(S)

    def times(self, other: "CurveRational", E: WeierstrassCurve) -> "CurveRational":
        return CurveRational(self.num.times(other.num, E), self.den.times(other.den, E))

    def inverse(self) -> "CurveRational":
        return CurveRational(self.den, self.num)


def constant(c: complex) -> CurveRational:
    return CurveRational(CurveFunction([c], [0]), CurveFunction([1], [0]))


def functions_xy(E: WeierstrassCurve) -> tuple[CurveRational, CurveRational]:
    """``x = (kX - 2Y)/(2X(X-1))`` and ``y = (kX + 2Y)/(2X(X-1))``."""
    den = CurveFunction([0, -2, 2], [0])
    x = CurveRational(CurveFunction([0, E.k], [-2]), den)
    y = CurveRational(CurveFunction([0, E.k], [2]), den)
    return x, y


def function_f(h: complex) -> CurveFunction:
    """``f = Y/(2h) + (1/2 - 1/(2h^2)) X``; zeros at 2P and (doubly) P+Q."""
    h = complex(h)
    return CurveFunction([0, 0.5 - 0.5 / h**2], [1 / (2 * h)])


def _g_from(root5: float) -> CurveFunction:
    c = (3 + root5) / 20
    return CurveFunction([4 * c, c], [(root5 - 1) / 10])


def function_g() -> CurveFunction:
    """``g = (sqrt5 - 1)/10 Y + (3 + sqrt5)/20 (X + 4)`` on ``E_5``."""
    return _g_from(SQRT5)


def function_g_sigma() -> CurveFunction:
    """Galois conjugate of ``g`` under ``sqrt5 -> -sqrt5``."""
    return _g_from(-SQRT5)


# --------------------------------------------------------------------------
# the isomorphism (X, Y) -> (-X, iY)


def phi_codomain(h: complex) -> WeierstrassCurve:
    """Target curve ``E_{2(ih + 1/(ih))}`` of the isomorphism for parameter ``h``."""
    h = complex(h)
    return curve_from_h(1j * h)


def iso_phi(S: Point, source: WeierstrassCurve | None = None) -> Point:
    if source is not None:
        source.check(S)
    if S.is_infinity:
        return O
    return Point(-S.X, 1j * S.Y)


def _reflect(c: np.ndarray) -> np.ndarray:
    """Coefficients of ``p(-X)``."""
    return c * (-1.0) ** np.arange(c.size)


def _pull_function(F: CurveFunction) -> CurveFunction:
    return CurveFunction(_reflect(F.a), 1j * _reflect(F.b))


def pullback(r: CurveRational | CurveFunction):
    """Compose a function on the target curve with ``phi``."""
    if isinstance(r, CurveFunction):
        return _pull_function(r)
    return CurveRational(_pull_function(r.num), _pull_function(r.den))
