"""Divisors of curve functions, the diamond pairing and Z[E(C)]^-.

``divisor_of`` finds the zeros of ``F = a(X) + b(X) Y`` through its norm
``N(X) = a^2 - b^2 (X^3 + aX^2 + X)``.  Each root ``X0`` of multiplicity
``m`` carries ``m`` zeros of ``F`` split between ``(X0, Y0)`` and
``(X0, -Y0)``; the pole order at ``O`` follows from degrees alone.

Classes in ``Z[E(C)]^-`` are kept canonical: no ``O``, one representative of
each pair ``{T, -T}``, 2-torsion coefficients reduced mod 2.  Identities
displayed in the literature usually discard torsion altogether (the
elliptic dilogarithm kills it), so :meth:`DiamondClass.modulo_torsion` drops
the 2-torsion part as well; comparisons against such identities go through
that projection.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np
from numpy.polynomial import polynomial as npoly

from .curve import (
    O,
    POINT_RTOL,
    CurveFunction,
    CurveRational,
    Point,
    WeierstrassCurve,
    _fmt,
    close,
)

__all__ = [
    "DivisorError",
    "MixedCurveError",
    "Divisor",
    "DiamondClass",
    "divisor_of",
    "divisor_of_rational",
    "diamond",
    "canonicalize",
    "class_combine",
    "parse_class_text",
]

CLUSTER_TOL = 1e-6


class DivisorError(ArithmeticError):
    """Root clustering produced a point that fails its residual check."""


class MixedCurveError(ValueError):
    pass


def _same_curve(E1: WeierstrassCurve, E2: WeierstrassCurve) -> None:
    if not close(E1.a, E2.a, 1e-12) or not close(E1.k, E2.k, 1e-12):
        raise MixedCurveError("operands live on different curves")


def _accumulate(E: WeierstrassCurve, pairs: Iterable[tuple[Point, int]]) -> list[list]:
    acc: list[list] = []
    for S, c in pairs:
        for item in acc:
            if E.equal(item[0], S):
                item[1] += c
                break
        else:
            acc.append([S, c])
    return acc


def _sort_key(S: Point):
    if S.is_infinity:
        return (math.inf,) * 4
    return (round(S.X.real, 9), round(S.X.imag, 9), round(S.Y.real, 9), round(S.Y.imag, 9))


def _labelled(c: int, S: Point, labels: Mapping[str, Point] | None, E, flip: bool):
    """``(text, rank)`` for one term; ``flip`` reads ``-T`` as ``-(T)`` (classes).

    ``rank`` is the label's position, so labelled terms print in label
    order and the rest (then ``O``) follow.
    """
    if S.is_infinity:
        return f"{c}*O", math.inf
    if labels:
        for i, (name, T) in enumerate(labels.items()):
            if E.equal(S, T):
                return f"{c}*({name})", i
            if E.equal(S, -T):
                return (f"{-c}*({name})" if flip else f"{c}*(-{name})"), i + 0.5
    return f"{c}*({_fmt(S.X)},{_fmt(S.Y)})", len(labels or ())


def _term_text(c: int, S: Point, labels: Mapping[str, Point] | None, E, flip: bool) -> str:
    return _labelled(c, S, labels, E, flip)[0]


def _joined(terms, labels, E, flip: bool) -> str:
    if not terms:
        return "0"
    items = [_labelled(c, S, labels, E, flip) for S, c in terms]
    order = sorted(range(len(items)), key=lambda j: (items[j][1], j))
    return " + ".join(items[j][0] for j in order)


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Divisor:
    curve: WeierstrassCurve
    terms: tuple[tuple[Point, int], ...] = ()

    def __post_init__(self):
        merged = _accumulate(self.curve, self.terms)
        clean = tuple(sorted(((S, c) for S, c in merged if c != 0), key=lambda t: _sort_key(t[0])))
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int:
        return sum(c for _, c in self.terms)

    def coefficient(self, S: Point) -> int:
        for T, c in self.terms:
            if self.curve.equal(S, T):
                return c
        return 0

    def __add__(self, other: "Divisor") -> "Divisor":
        _same_curve(self.curve, other.curve)
        return Divisor(self.curve, self.terms + other.terms)

    def __neg__(self) -> "Divisor":
        return Divisor(self.curve, tuple((S, -c) for S, c in self.terms))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __rmul__(self, n: int) -> "Divisor":
        return Divisor(self.curve, tuple((S, n * c) for S, c in self.terms))

    def equals(self, other: "Divisor") -> bool:
        return not (self - other).terms

    def to_text(self, labels: Mapping[str, Point] | None = None) -> str:
        return _joined(self.terms, labels, self.curve, False)

    def __str__(self) -> str:
        return self.to_text()


def _multiplicity(p: np.ndarray, x0: complex, tol: float = 1e-7) -> int:
    """Order of vanishing of polynomial ``p`` at ``x0`` (``inf`` for p == 0)."""
    if not np.any(p):
        return 10**9
    scale = float(np.sum(np.abs(p))) * (1 + abs(x0)) ** (p.size - 1)
    q = p
    for j in range(p.size):
        if abs(npoly.polyval(x0, q)) > tol * scale:
            return j
        q = npoly.polyder(q) / (j + 1)
    return p.size - 1


def _deflate(p: np.ndarray, x0: complex, e: int) -> np.ndarray:
    for _ in range(e):
        p, _rem = npoly.polydiv(p, np.array([-x0, 1], dtype=complex))
    return p


def _cluster_roots(roots: np.ndarray) -> list[tuple[complex, int]]:
    groups: list[list[complex]] = []
    for r in roots:
        for g in groups:
            if abs(r - g[0]) <= CLUSTER_TOL * (1 + abs(g[0])):
                g.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _polish(N: np.ndarray, x0: complex, m: int) -> complex:
    """Newton on the (m-1)-th derivative, where ``x0`` is a simple root."""
    d = npoly.polyder(N, m - 1) if m > 1 else N
    dd = npoly.polyder(d)
    for _ in range(3):
        den = npoly.polyval(x0, dd)
        if den == 0:
            break
        step = npoly.polyval(x0, d) / den
        if not np.isfinite(step) or abs(step) > 1e-6 * (1 + abs(x0)):
            break
        x0 = x0 - step
    return x0


def divisor_of(E: WeierstrassCurve, F: CurveFunction) -> Divisor:
    """Divisor of ``F = a(X) + b(X) Y`` on ``E``."""
    if F.is_constant:
        return Divisor(E)
    a, b = F.a, F.b
    deg_a = a.size - 1 if np.any(a) else -(10**9)
    deg_b = b.size - 1 if np.any(b) else -(10**9)
    pole = max(2 * deg_a, 3 + 2 * deg_b)
    N = npoly.polysub(npoly.polymul(a, a), npoly.polymul(npoly.polymul(b, b), E.cubic))
    N = N[: pole + 1]
    roots = np.roots(N[::-1])
    twotors = E.roots()
    scale = float(np.sum(np.abs(N)))
    terms: list[tuple[Point, int]] = [(O, -pole)]
    for x0, m in _cluster_roots(roots):
        x0 = _polish(N, x0, m)
        hit = [e for e in twotors if abs(x0 - e) <= CLUSTER_TOL * (1 + abs(e))]
        if hit:
            # local parameter at a 2-torsion point is Y, and X - e ~ Y^2
            terms.append((Point(hit[0], 0), m))
            continue
        if abs(npoly.polyval(x0, N)) > 1e-8 * scale * (1 + abs(x0)) ** (N.size - 1):
            raise DivisorError(f"norm residual too large at X={x0}")
        y0 = cmath.sqrt(E.rhs(x0))
        e = min(_multiplicity(a, x0), _multiplicity(b, x0))
        if 2 * e > m:
            raise DivisorError(f"inconsistent multiplicities at X={x0}")
        if e:
            terms += [(Point(x0, y0), e), (Point(x0, -y0), e)]
        rest = m - 2 * e
        if rest:
            ar, br = _deflate(a, x0, e), _deflate(b, x0, e)
            plus = abs(npoly.polyval(x0, ar) + npoly.polyval(x0, br) * y0)
            minus = abs(npoly.polyval(x0, ar) - npoly.polyval(x0, br) * y0)
            if min(plus, minus) > 1e-6 * max(plus, minus, 1e-300) and max(plus, minus) > 0:
                raise DivisorError(f"cannot decide the Y-branch at X={x0}")
            terms.append((Point(x0, y0 if plus <= minus else -y0), rest))
    D = Divisor(E, tuple(terms))
    if D.degree != 0:
        raise DivisorError(f"principal divisor has degree {D.degree}")
    return D


def divisor_of_rational(E: WeierstrassCurve, r: CurveRational) -> Divisor:
    return divisor_of(E, r.num) - divisor_of(E, r.den)


# --------------------------------------------------------------------------


def _representative(E: WeierstrassCurve, S: Point) -> tuple[Point, int]:
    """Canonical member of ``{S, -S}`` and the sign relating it to ``S``."""
    Y = S.Y
    tol = POINT_RTOL * (1 + abs(Y))
    if Y.real > tol or (abs(Y.real) <= tol and Y.imag >= 0):
        return S, 1
    return -S, -1


@dataclass(frozen=True)
class DiamondClass:
    curve: WeierstrassCurve
    terms: tuple[tuple[Point, int], ...] = ()

    def __add__(self, other: "DiamondClass") -> "DiamondClass":
        return class_combine(self, other, 1, 1)

    def __sub__(self, other: "DiamondClass") -> "DiamondClass":
        return class_combine(self, other, 1, -1)

    def __neg__(self) -> "DiamondClass":
        return canonicalize(self.curve, [(S, -c) for S, c in self.terms])

    def __rmul__(self, n: int) -> "DiamondClass":
        return canonicalize(self.curve, [(S, n * c) for S, c in self.terms])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, S: Point) -> int:
        """Coefficient of ``(S)``, read through ``(-T) ~ -(T)``."""
        rep, sign = _representative(self.curve, S)
        for T, c in self.terms:
            if self.curve.equal(rep, T):
                return sign * c
        return 0

    def torsion_part(self) -> "DiamondClass":
        E = self.curve
        return DiamondClass(E, tuple((S, c) for S, c in self.terms if E.is_two_torsion(S)))

    def modulo_torsion(self) -> "DiamondClass":
        """Drop the 2-torsion terms (image in ``Z[E(C)]^- (x) Q``)."""
        E = self.curve
        return DiamondClass(E, tuple((S, c) for S, c in self.terms if not E.is_two_torsion(S)))

    def equals(self, other: "DiamondClass", modulo_torsion: bool = False) -> bool:
        _same_curve(self.curve, other.curve)
        diff = self - other
        if modulo_torsion:
            diff = diff.modulo_torsion()
        return diff.is_zero

    def to_text(self, labels: Mapping[str, Point] | None = None) -> str:
        return _joined(self.terms, labels, self.curve, True)

    def to_json(self, labels: Mapping[str, Point] | None = None) -> dict:
        out = []
        for S, c in self.terms:
            term = {"coeff": c, "X": [S.X.real, S.X.imag], "Y": [S.Y.real, S.Y.imag]}
            text = _term_text(c, S, labels, self.curve, True)
            if "(" in text and "," not in text:
                coeff, _, label = text.partition("*")
                term["label"] = label[1:-1]
                term["label_coeff"] = int(coeff)
            out.append(term)
        return {"text": self.to_text(labels), "terms": out}

    def __str__(self) -> str:
        return self.to_text()


def canonicalize(E: WeierstrassCurve, terms: Iterable[tuple[Point, int]]) -> DiamondClass:
    """Reduce formal terms to the canonical form of their class."""
    staged = []
    for S, c in terms:
        if S.is_infinity or c == 0:
            continue
        if E.is_two_torsion(S):
            staged.append((Point(S.X, 0), c))
            continue
        rep, sign = _representative(E, S)
        staged.append((rep, sign * c))
    merged = _accumulate(E, staged)
    out = []
    for S, c in merged:
        if E.is_two_torsion(S):
            c %= 2
        if c:
            out.append((S, c))
    out.sort(key=lambda t: _sort_key(t[0]))
    return DiamondClass(E, tuple(out))


def diamond(D1: Divisor, D2: Divisor) -> DiamondClass:
    """``(x) <> (y) = sum a_S b_T (S - T)``."""
    _same_curve(D1.curve, D2.curve)
    E = D1.curve
    pairs = [(E.sub(S, T), a * b) for S, a in D1.terms for T, b in D2.terms]
    return canonicalize(E, pairs)


def class_combine(c1: DiamondClass, c2: DiamondClass, s1: int = 1, s2: int = 1) -> DiamondClass:
    _same_curve(c1.curve, c2.curve)
    terms = [(S, s1 * c) for S, c in c1.terms] + [(S, s2 * c) for S, c in c2.terms]
    return canonicalize(c1.curve, terms)


_LABEL_ALIASES = {"Q+P": "P+Q", "A+Q": "Q+A", "B+Q": "Q+B", "Q+2P": "2P+Q"}


def parse_class_text(text: str) -> dict[str, int]:
    """Inverse of the labelled text form: ``"-12*(P+Q) + 10*(P)"`` -> dict.

    Sums of labels may be written in either order (``Q+P`` reads as ``P+Q``).
    """
    out: dict[str, int] = {}
    text = text.strip()
    if text == "0":
        return out
    for chunk in text.split(" + "):
        coeff, _, rest = chunk.partition("*")
        label = rest.strip()
        if label.startswith("(") and label.endswith(")"):
            label = label[1:-1]
        label = _LABEL_ALIASES.get(label.replace(" ", ""), label.replace(" ", ""))
        out[label] = out.get(label, 0) + int(coeff)
    out = {k: v for k, v in out.items() if v}
    return out
