"""Mahler measure of ``P_k(x, y) = x + 1/x + y + 1/y + k``.

Two independent routes:

``mahler_measure``
    Jensen's formula in ``y``.  ``y * P_k = y**2 + c*y + 1`` with
    ``c = x + 1/x + k``; the roots multiply to 1, so
    ``m(k) = (1/pi) * int_0^pi log max(|y_big(2 cos t + k)|, 1) dt``.
    The integrand is analytic except where ``c`` is real with ``|c| = 2``;
    for real ``k`` those angles become panel edges and each panel is
    integrated with tanh-sinh, which absorbs the square-root endpoint
    behaviour.  Non-real ``k`` never meets that locus.

``mahler_measure_2d_oracle``
    Shifted midpoint rule for ``int int log|P_k|`` over the torus.  Slow and
    only ~1e-5 accurate; it exists to cross-check the first route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ._accel import njit, select

__all__ = [
    "CurveParam",
    "QuadratureConfig",
    "QuadratureError",
    "y_roots",
    "mahler_measure",
    "mahler_measure_estimate",
    "mahler_measure_2d_oracle",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


@dataclass(frozen=True)
class CurveParam:
    """A member of the family, optionally remembered through ``k = 2(h + 1/h)``."""

    k: complex
    h: complex | None = None

    def __post_init__(self):
        object.__setattr__(self, "k", complex(self.k))
        if self.h is not None:
            h = complex(self.h)
            object.__setattr__(self, "h", h)
            if h == 0:
                raise ValueError("h must be nonzero")
            if abs(self.k - 2 * (h + 1 / h)) > 1e-12 * (1 + abs(self.k)):
                raise ValueError(f"k={self.k} is not 2(h + 1/h) for h={h}")

    @classmethod
    def from_h(cls, h: complex) -> "CurveParam":
        h = complex(h)
        if h == 0:
            raise ValueError("h must be nonzero")
        return cls(2 * (h + 1 / h), h)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-11
    max_subdivisions: int = 200
    grid_n: int = 1024
    max_level: int = 7

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.grid_n < 8:
            raise ValueError("grid_n must be >= 8")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def _as_k(k) -> complex:
    return k.k if isinstance(k, CurveParam) else complex(k)


def y_roots(c: complex) -> tuple[complex, complex]:
    """Roots of ``y**2 + c*y + 1`` ordered so that ``|y_plus| >= |y_minus|``.

    The large root is formed without cancellation and the small one is its
    reciprocal, so the product is 1 to rounding.
    """
    c = complex(c)
    s = np.sqrt(complex(c * c - 4))
    big = (-c - s) / 2 if (c.conjugate() * s).real >= 0 else (-c + s) / 2
    return complex(big), complex(1 / big)


# --------------------------------------------------------------------------
# kernels: log max(|y_big(c)|, 1)


@njit
def _logplus_numba(c):
    out = np.empty(c.shape[0])
    for i in range(c.shape[0]):
        ci = c[i]
        s = np.sqrt(ci * ci - 4.0)
        if (ci.real * s.real + ci.imag * s.imag) >= 0.0:
            big = (-ci - s) * 0.5
        else:
            big = (-ci + s) * 0.5
        v = math.log(abs(big))
        out[i] = v if v > 0.0 else 0.0
    return out


def _logplus_numpy(c):
    c = np.asarray(c, dtype=complex)
    s = np.sqrt(c * c - 4.0)
    big = np.where((c.conjugate() * s).real >= 0, -c - s, -c + s) * 0.5
    return np.maximum(np.log(np.abs(big)), 0.0)


_logplus = select(_logplus_numba, _logplus_numpy)


# --------------------------------------------------------------------------
# tanh-sinh panels

_TMAX = 3.6
_NODE_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _ts_rule(level: int):
    """Nodes ``s`` in (0, 1), complements ``1 - s`` and weights for level."""
    if level not in _NODE_CACHE:
        h = 2.0**-level
        n = int(math.ceil(_TMAX / h))
        t = np.arange(-n, n + 1) * h
        u = 0.5 * math.pi * np.sinh(t)
        s = expit(2 * u)
        sc = expit(-2 * u)
        w = h * 0.25 * math.pi * np.cosh(t) / np.cosh(u) ** 2
        _NODE_CACHE[level] = (s, sc, w)
    return _NODE_CACHE[level]


def _panel(f, a: float, b: float, tol: float, max_level: int):
    """Tanh-sinh on [a, b]; returns (value, error_estimate, converged)."""
    width = b - a
    prev = None
    for level in range(2, max_level + 1):
        s, sc, w = _ts_rule(level)
        x = np.where(s < 0.5, a + width * s, b - width * sc)
        val = width * float(np.dot(w, f(x)))
        if prev is not None:
            err = abs(val - prev)
            if err <= tol and level >= 4:
                return val, err, True
        prev = val
    return prev, abs(val - prev) if level > 2 else math.inf, False


def _integrate(f, edges, tol, cfg: QuadratureConfig):
    """Adaptive bisection over panels; returns (value, error_estimate)."""
    total_len = edges[-1] - edges[0]
    stack = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)][::-1]
    done: list[tuple[float, float, float]] = []
    splits = 0
    while stack:
        a, b = stack.pop()
        local_tol = max(tol * (b - a) / total_len, 1e-17)
        val, err, ok = _panel(f, a, b, local_tol, cfg.max_level)
        if ok:
            done.append((a, val, err))
            continue
        splits += 1
        if splits > cfg.max_subdivisions:
            raise QuadratureError(
                f"no convergence to {tol:g} within {cfg.max_subdivisions} subdivisions"
            )
        mid = 0.5 * (a + b)
        stack.append((mid, b))
        stack.append((a, mid))
    done.sort()
    value = math.fsum(v for _, v, _ in done)
    err = math.fsum(e for _, _, e in done)
    return value, err


def _transition_angles(k: complex) -> list[float]:
    """Angles in (0, pi) where ``2 cos t + Re k = +-2``."""
    out = []
    kr = k.real
    for target in (2.0, -2.0):
        cval = (target - kr) / 2.0
        if -1.0 < cval < 1.0:
            out.append(math.acos(cval))
    return sorted(out)


def mahler_measure_estimate(k, cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """Return ``(m(k), error_estimate)`` via the Jensen reduction."""
    cfg = cfg or QuadratureConfig()
    k = _as_k(k)
    real = abs(k.imag) <= 1e-15 * (1 + abs(k))
    if real:
        k = complex(k.real, 0.0)
    edges = [0.0, *_transition_angles(k), math.pi]

    def f(theta):
        return _logplus(np.ascontiguousarray(2.0 * np.cos(theta) + k, dtype=np.complex128))

    if real:
        # panels where |c| < 2 throughout contribute exactly zero
        live = []
        for a, b in zip(edges[:-1], edges[1:]):
            cm = 2 * math.cos(0.5 * (a + b)) + k.real
            live.append(abs(cm) > 2)
        pieces = [(a, b) for (a, b), keep in zip(zip(edges[:-1], edges[1:]), live) if keep]
    else:
        pieces = list(zip(edges[:-1], edges[1:]))

    value, err = 0.0, 0.0
    # tolerance is on m = integral / pi
    for a, b in pieces:
        v, e = _integrate(f, [a, b], cfg.abs_tol * math.pi * (b - a) / math.pi, cfg)
        value += v
        err += e
    return value / math.pi, err / math.pi


def mahler_measure(k, cfg: QuadratureConfig | None = None) -> float:
    """Mahler measure ``m(k)`` of ``x + 1/x + y + 1/y + k``, any complex ``k``."""
    return mahler_measure_estimate(k, cfg)[0]


# --------------------------------------------------------------------------
# 2-D oracle


@njit
def _grid_numba(cx, cy, k):
    acc = 0.0
    for i in range(cx.shape[0]):
        row = 0.0
        for j in range(cy.shape[0]):
            v = abs(cx[i] + cy[j] + k)
            if v < 1e-300:
                v = 1e-300
            row += math.log(v)
        acc += row
    return acc


def _grid_numpy(cx, cy, k):
    acc = 0.0
    step = max(1, 2**22 // max(cy.shape[0], 1))
    for start in range(0, cx.shape[0], step):
        block = np.abs(cx[start : start + step, None] + cy[None, :] + k)
        acc += float(np.sum(np.log(np.maximum(block, 1e-300))))
    return acc


_grid = select(_grid_numba, _grid_numpy)


def mahler_measure_2d_oracle(k, grid_n: int = 1024) -> float:
    """Midpoint-rule average of ``log|P_k|`` on a ``grid_n**2`` torus grid.

    The two axes use offsets 1/2 and 1/4 of a cell, so no node lands on
    ``cos a = -cos b`` (which would hit the zero set exactly when ``k = 0``).
    """
    if grid_n < 8:
        raise ValueError("grid_n must be >= 8")
    k = _as_k(k)
    j = np.arange(grid_n)
    cx = np.ascontiguousarray(2 * np.cos(2 * np.pi * (j + 0.5) / grid_n)).astype(np.complex128)
    cy = np.ascontiguousarray(2 * np.cos(2 * np.pi * (j + 0.25) / grid_n)).astype(np.complex128)
    return _grid(cx, cy, complex(k)) / grid_n**2
