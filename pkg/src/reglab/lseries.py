"""L-function of ``E_k`` for integer ``k``: a_p, conductor, L(E, 2), L'(E, 0).

Pipeline:

1. ``integral_model(k)`` clears denominators of ``Y^2 = X^3 + aX^2 + X``.
2. ``a_p`` is read off a model minimal at ``p`` as ``p + 1 - #E(F_p)``;
   that one formula covers good, multiplicative and additive primes.
3. ``conductor_scan`` tries every conductor allowed by the reduction types
   together with both signs, and keeps the pair whose completed L-function
   satisfies ``Lambda(s) = w Lambda(2 - s)`` numerically.
4. ``L'(E, 0) = w N L(E, 2) / (4 pi^2)``, with ``L(E, 2)`` from the
   exponentially weighted series.

With ``A = sqrt(N) / (2 pi)``, ``Lambda(s) = A^s Gamma(s) L(E, s)`` and for any
``t > 0``

    Lambda(s) = sum a_n [ (A/n)^s Gamma(s, n t/A)
                          + w (A/n)^(2-s) Gamma(2-s, n/(A t)) ].
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.special import exp1, gamma, gammaincc

from ._accel import njit, select

__all__ = [
    "LSeriesError",
    "WeierstrassModel",
    "IntegralModel",
    "LSeriesData",
    "integral_model",
    "primes_up_to",
    "local_minimal_model",
    "reduction_type",
    "a_p",
    "a_p_list",
    "a_n_list",
    "a_n_euler",
    "brute_count",
    "count_fp2",
    "conductor_candidates",
    "fe_residual",
    "conductor_scan",
    "l_series_data",
    "default_terms",
    "l_value_at_2",
    "l2_partial_sum",
    "l_prime_at_zero",
    "cache_dir",
]


class LSeriesError(RuntimeError):
    """Conductor/sign could not be determined unambiguously."""


# --------------------------------------------------------------------------
# Weierstrass models over Z


def _v(n: int, p: int) -> int:
    if n == 0:
        return 10**9
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@dataclass(frozen=True)
class WeierstrassModel:
    """``y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`` with integer a_i."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    @property
    def b(self) -> tuple[int, int, int, int]:
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        b2 = a1 * a1 + 4 * a2
        b4 = a1 * a3 + 2 * a4
        b6 = a3 * a3 + 4 * a6
        b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        return b2, b4, b6, b8

    @property
    def c4(self) -> int:
        b2, b4, _, _ = self.b
        return b2 * b2 - 24 * b4

    @property
    def c6(self) -> int:
        b2, b4, b6, _ = self.b
        return -(b2**3) + 36 * b2 * b4 - 216 * b6

    @property
    def discriminant(self) -> int:
        b2, b4, b6, b8 = self.b
        return -b2 * b2 * b8 - 8 * b4**3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    def transform_numerators(self, r: int, s: int, t: int) -> tuple[int, ...]:
        """``u^i a_i'`` for ``x = u^2 x' + r, y = u^3 y' + s u^2 x' + t``."""
        a1, a2, a3, a4, a6 = self.a1, self.a2, self.a3, self.a4, self.a6
        return (
            a1 + 2 * s,
            a2 - s * a1 + 3 * r - s * s,
            a3 + r * a1 + 2 * t,
            a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
            a6 + r * a4 + r * r * a2 + r**3 - t * a3 - t * t - r * t * a1,
        )

    def transform(self, u: int, r: int, s: int, t: int) -> "WeierstrassModel":
        nums = self.transform_numerators(r, s, t)
        out = []
        for num, w in zip(nums, (1, 2, 3, 4, 6)):
            q, rem = divmod(num, u**w)
            if rem:
                raise ValueError("transformation does not give integral coefficients")
            out.append(q)
        return WeierstrassModel(*out)


@dataclass(frozen=True)
class IntegralModel:
    """``v^2 = u^3 + A u^2 + B u + C`` with ``X = u / scale^2, Y = v / scale^3``."""

    k: int
    A: int
    B: int
    C: int
    scale: int

    @property
    def weierstrass(self) -> WeierstrassModel:
        return WeierstrassModel(0, self.A, 0, self.B, self.C)

    @property
    def discriminant(self) -> int:
        return self.weierstrass.discriminant

    def to_model(self, X, Y):
        return X * self.scale**2, Y * self.scale**3

    def from_model(self, u, v):
        return u / self.scale**2, v / self.scale**3

    def curve_a(self) -> Fraction:
        """The ``a`` of ``Y^2 = X^3 + aX^2 + X`` recovered from the model."""
        return Fraction(self.A, self.scale**2)


def integral_model(k: int) -> IntegralModel:
    """Integral model of ``E_k``; ``X = u/4, Y = v/8`` for odd ``k``."""
    if isinstance(k, bool) or int(k) != k:
        raise ValueError(f"k must be an integer, got {k!r}")
    k = int(k)
    if k == 0 or k * k == 16:
        from .curve import SingularCurveError

        raise SingularCurveError(f"E_k is singular for k={k}")
    if k % 2:
        # a = (k^2 - 8)/4; scaling by 4 and 8 gives u^3 + 4a u^2 + 16 u
        M = IntegralModel(k, k * k - 8, 16, 0, 2)
    else:
        M = IntegralModel(k, k * k // 4 - 2, 1, 0, 1)
    if M.discriminant == 0:
        raise ValueError("degenerate model")
    return M


def _as_model(M) -> WeierstrassModel:
    return M.weierstrass if isinstance(M, IntegralModel) else M


# --------------------------------------------------------------------------
# primes, minimal models, reduction types


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def _prime_factors(n: int) -> list[int]:
    n = abs(n)
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _reduce_once_small(W: WeierstrassModel, p: int) -> WeierstrassModel | None:
    """Search ``r mod p^2, s mod p, t mod p^3`` for a scaling by ``u = p``."""
    for r in range(p * p):
        for s in range(p):
            for t in range(p**3):
                nums = W.transform_numerators(r, s, t)
                if all(n % p**w == 0 for n, w in zip(nums, (1, 2, 3, 4, 6))):
                    return W.transform(p, r, s, t)
    return None


def local_minimal_model(M, p: int) -> WeierstrassModel:
    """A model minimal at ``p`` (integral at every prime)."""
    W = _as_model(M)
    if p >= 5:
        c4, c6 = W.c4, W.c6
        e = 0
        while _v(c4, p) >= 4 * (e + 1) and _v(c6, p) >= 6 * (e + 1):
            e += 1
        if e == 0:
            return W
        # short model y^2 = x^3 - 27 c4 x - 54 c6 is fine away from 2, 3
        return WeierstrassModel(0, 0, 0, -27 * (c4 // p ** (4 * e)), -54 * (c6 // p ** (6 * e)))
    while _v(W.discriminant, p) >= 12:
        nxt = _reduce_once_small(W, p)
        if nxt is None:
            break
        W = nxt
    return W


def _singular_point(W: WeierstrassModel, p: int) -> tuple[int, int]:
    for x in range(p):
        for y in range(p):
            f = y * y + W.a1 * x * y + W.a3 * y - (x**3 + W.a2 * x * x + W.a4 * x + W.a6)
            fx = W.a1 * y - (3 * x * x + 2 * W.a2 * x + W.a4)
            fy = 2 * y + W.a1 * x + W.a3
            if f % p == 0 and fx % p == 0 and fy % p == 0:
                return x, y
    raise ArithmeticError("no singular point found")


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def reduction_type(M, p: int) -> str:
    """``"good"``, ``"split"``, ``"nonsplit"`` or ``"additive"`` at ``p``.

    Decided from the tangent cone at the singular point of the minimal model.
    """
    W = local_minimal_model(M, p)
    if W.discriminant % p:
        return "good"
    if p >= 5:
        if W.c4 % p == 0:
            return "additive"
        return "split" if _legendre(-W.c6, p) == 1 else "nonsplit"
    x0, y0 = _singular_point(W, p)
    # move the singular point to the origin; tangent cone y^2 + a1 xy - a2 x^2
    T = WeierstrassModel(*W.transform_numerators(x0, 0, y0))
    a1, a2 = T.a1 % p, T.a2 % p
    if p == 2:
        if a1 == 0:
            return "additive"
        return "split" if a2 == 0 else "nonsplit"
    disc = (a1 * a1 + 4 * a2) % p
    if disc == 0:
        return "additive"
    return "split" if _legendre(disc, p) == 1 else "nonsplit"


# --------------------------------------------------------------------------
# point counting kernels: sum_x chi(c3 x^3 + c2 x^2 + c1 x + c0) mod p


@njit
def _charsum_numba(p, c3, c2, c1, c0):
    sq = np.zeros(p, dtype=np.int8)
    for y in range(1, p):
        sq[(y * y) % p] = 1
    total = 0
    for x in range(p):
        v = (((c3 * x + c2) % p * x + c1) % p * x + c0) % p
        if v != 0:
            total += 1 if sq[v] else -1
    return total


def _charsum_numpy(p, c3, c2, c1, c0):
    sq = np.zeros(p, dtype=bool)
    y = np.arange(1, p, dtype=np.int64)
    sq[(y * y) % p] = True
    x = np.arange(p, dtype=np.int64)
    v = (((c3 * x + c2) % p * x + c1) % p * x + c0) % p
    chi = np.where(sq[v], 1, -1)
    chi[v == 0] = 0
    return int(chi.sum())


_charsum = select(_charsum_numba, _charsum_numpy)


def _count_general(W: WeierstrassModel, p: int) -> int:
    """Projective ``#E(F_p)`` including any singular point."""
    if p == 2:
        n = 1
        for x in range(2):
            for y in range(2):
                f = y * y + W.a1 * x * y + W.a3 * y - (x**3 + W.a2 * x * x + W.a4 * x + W.a6)
                n += f % 2 == 0
        return n
    # (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
    b2, b4, b6, _ = W.b
    s = _charsum(p, 4 % p, b2 % p, (2 * b4) % p, b6 % p)
    return p + 1 + int(s)


def a_p(M, p: int) -> int:
    """``p + 1 - #E(F_p)`` on a model minimal at ``p``."""
    p = int(p)
    W = local_minimal_model(M, p)
    ap = p + 1 - _count_general(W, p)
    if W.discriminant % p:
        if ap * ap > 4 * p:
            raise ArithmeticError(f"Hasse bound violated at p={p}: a_p={ap}")
    return ap


def brute_count(M, p: int) -> int:
    """Projective point count by a double loop over ``F_p^2`` (test oracle)."""
    W = _as_model(M)
    n = 1
    for x in range(p):
        rhs = (x**3 + W.a2 * x * x + W.a4 * x + W.a6) % p
        for y in range(p):
            if (y * y + W.a1 * x * y + W.a3 * y - rhs) % p == 0:
                n += 1
    return n


def count_fp2(M, p: int) -> int:
    """``#E(F_{p^2})`` for odd ``p`` on a short-enough model (``a1 = a3 = 0``).

    ``F_{p^2} = F_p(sqrt(nu))``; an element is a square iff its norm is a
    square in ``F_p``.
    """
    W = _as_model(M)
    if p == 2 or W.a1 or W.a3:
        raise ValueError("count_fp2 needs odd p and a1 = a3 = 0")
    nu = next(c for c in range(2, p) if _legendre(c, p) == -1)
    sq = np.zeros(p, dtype=bool)
    y = np.arange(1, p, dtype=np.int64)
    sq[(y * y) % p] = True
    a, b = np.meshgrid(np.arange(p, dtype=np.int64), np.arange(p, dtype=np.int64), indexing="ij")
    a, b = a.ravel(), b.ravel()

    def mul(x, y):
        return (x[0] * y[0] + nu * x[1] * y[1]) % p, (x[0] * y[1] + x[1] * y[0]) % p

    X = (a, b)
    X2 = mul(X, X)
    X3 = mul(X2, X)
    fr = (X3[0] + W.a2 * X2[0] + W.a4 * X[0] + W.a6) % p
    fi = (X3[1] + W.a2 * X2[1] + W.a4 * X[1]) % p
    norm = (fr * fr - nu * fi * fi) % p
    chi = np.where(sq[norm], 1, -1)
    chi[(fr == 0) & (fi == 0)] = 0
    return p * p + 1 + int(chi.sum())


# --------------------------------------------------------------------------
# caches


_CACHE_LOCK = threading.Lock()


def cache_dir() -> Path:
    env = os.environ.get("REGLAB_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "reglab"


def _ap_cache_path(k: int) -> Path:
    return cache_dir() / f"ap_k{k}.txt"


def _read_ap_cache(k: int) -> dict[int, int]:
    path = _ap_cache_path(k)
    try:
        lines = path.read_text().splitlines()
    except OSError:
        return {}
    if not lines or lines[0].strip() != f"k={k}":
        return {}
    out = {}
    for line in lines[1:]:
        parts = line.split()
        if len(parts) == 2:
            out[int(parts[0])] = int(parts[1])
    return out


def _write_atomic(path: Path, text: str) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + f".{os.getpid()}.tmp")
        tmp.write_text(text)
        os.replace(tmp, path)
    except OSError:
        pass  # a read-only cache only costs recomputation


def _write_ap_cache(k: int, table: dict[int, int]) -> None:
    body = "".join(f"{p} {table[p]}\n" for p in sorted(table))
    with _CACHE_LOCK:
        _write_atomic(_ap_cache_path(k), f"k={k}\n" + body)


def a_p_list(M, pmax: int, use_cache: bool = True) -> dict[int, int]:
    """``{p: a_p}`` for all primes ``p <= pmax``."""
    k = M.k if isinstance(M, IntegralModel) else None
    cached = _read_ap_cache(k) if (use_cache and k is not None) else {}
    out = {}
    missing = False
    for p in primes_up_to(pmax):
        p = int(p)
        if p in cached:
            out[p] = cached[p]
        else:
            out[p] = a_p(M, p)
            missing = True
    if use_cache and k is not None and missing:
        cached.update(out)
        _write_ap_cache(k, cached)
    return out


def _bad_primes(M) -> list[int]:
    return _prime_factors(_as_model(M).discriminant)


def _good_at(M, p: int) -> bool:
    return local_minimal_model(M, p).discriminant % p != 0


def a_n_list(M, n_max: int, use_cache: bool = True) -> np.ndarray:
    """``a_n`` for ``0 <= n <= n_max`` (index 0 unused) via a factor sieve."""
    ap = a_p_list(M, max(n_max, 2), use_cache)
    bad = {p for p in _bad_primes(M) if not _good_at(M, p)}
    spf = np.zeros(n_max + 1, dtype=np.int64)
    for p in primes_up_to(n_max):
        p = int(p)
        block = spf[p::p]
        block[block == 0] = p
    an = np.zeros(n_max + 1, dtype=object if n_max > 10**7 else np.int64)
    if n_max >= 1:
        an[1] = 1
    for n in range(2, n_max + 1):
        p = int(spf[n])
        m, e = n, 0
        while m % p == 0:
            m //= p
            e += 1
        pe = n // m
        if m > 1:
            an[n] = an[pe] * an[m]
        elif e == 1:
            an[n] = ap[p]
        elif p in bad:
            an[n] = ap[p] * an[n // p]
        else:
            an[n] = ap[p] * an[n // p] - p * an[n // (p * p)]
    return an


def a_n_euler(M, n_max: int) -> np.ndarray:
    """Same coefficients by expanding the Euler product with Dirichlet
    convolutions; nothing here assumes multiplicativity (test oracle)."""
    ap = a_p_list(M, max(n_max, 2), use_cache=False)
    bad = {p for p in _bad_primes(M) if not _good_at(M, p)}
    coeff = np.zeros(n_max + 1, dtype=np.int64)
    coeff[1] = 1
    for p, a in ap.items():
        # local series sum_e c_e p^{-es} = 1 / (1 - a p^-s + [good] p^{1-2s})
        local = [1]
        pe = p
        while pe <= n_max:
            e = len(local)
            c = a * local[e - 1] - (0 if p in bad or e < 2 else p * local[e - 2])
            local.append(c)
            pe *= p
        new = np.zeros_like(coeff)
        pe = 1
        for c in local:
            if c:
                idx = np.arange(1, n_max // pe + 1)
                new[idx * pe] += c * coeff[idx]
            pe *= p
        coeff = new
    return coeff


# --------------------------------------------------------------------------
# completed L-function


def default_terms(N: int, t_spread: float = 1.0) -> int:
    """Terms for which ``exp(-2 pi n / (sqrt(N) t_spread)) < 1e-14``."""
    A = math.sqrt(N) / (2 * math.pi)
    return int(math.ceil(-math.log(1e-14) * A * t_spread)) + 1


def _lambda(an: np.ndarray, N: int, w: int, s: float, t: float) -> float:
    A = math.sqrt(N) / (2 * math.pi)
    n = np.arange(1, len(an), dtype=float)
    a = an[1:].astype(float)
    x = n / A
    first = (A / n) ** s * gammaincc(s, x * t) * gamma(s)
    second = (A / n) ** (2 - s) * gammaincc(2 - s, x / t) * gamma(2 - s)
    return float(np.sum(a * (first + w * second)))


FE_POINTS = ((0.8, 1.0, 1.2), (1.1, 1.0, 1.2), (1.3, 1.0, 1.2))


def fe_residual(M, N: int, w: int, an: np.ndarray | None = None) -> float:
    """Largest ``|Lambda_t1(s) - Lambda_t2(s)|`` over the probe points.

    Both expansions equal ``Lambda(s)`` only if ``(N, w)`` is right.
    """
    n_need = default_terms(N, 1.2)
    if an is None or len(an) <= n_need:
        an = a_n_list(M, n_need)
    an = an[: n_need + 1]
    return max(abs(_lambda(an, N, w, s, t1) - _lambda(an, N, w, s, t2)) for s, t1, t2 in FE_POINTS)


def conductor_candidates(M) -> list[int]:
    """Conductors compatible with the reduction type at each bad prime."""
    options = [[1]]
    for p in _bad_primes(M):
        kind = reduction_type(M, p)
        if kind == "good":
            continue
        if kind in ("split", "nonsplit"):
            exps = [1]
        elif p >= 5:
            exps = [2]
        elif p == 3:
            exps = [2, 3, 4, 5]
        else:
            exps = list(range(2, 9))
        options.append([p**e for e in exps])
    out = [1]
    for opts in options:
        out = [a * b for a in out for b in opts]
    return sorted(out)


def _conductor_cache_path() -> Path:
    return cache_dir() / "conductors.txt"


def _read_conductor_cache() -> dict[int, tuple[int, int]]:
    try:
        lines = _conductor_cache_path().read_text().splitlines()
    except OSError:
        return {}
    out = {}
    for line in lines:
        try:
            fields = dict(item.split("=") for item in line.split())
            out[int(fields["k"])] = (int(fields["N"]), int(fields["w"]))
        except (ValueError, KeyError):
            continue
    return out


def _write_conductor_cache(k: int, N: int, w: int) -> None:
    with _CACHE_LOCK:
        table = _read_conductor_cache()
        table[k] = (N, w)
        _write_atomic(
            _conductor_cache_path(),
            "".join(f"k={kk} N={n} w={ww}\n" for kk, (n, ww) in sorted(table.items())),
        )


def conductor_scan(
    M, candidates: list[int] | None = None, threshold: float = 1e-6, use_cache: bool = True
) -> tuple[int, int]:
    """Unique ``(N, w)`` whose functional-equation residual is below threshold."""
    k = M.k if isinstance(M, IntegralModel) else None
    if candidates is None and use_cache and k is not None:
        hit = _read_conductor_cache().get(k)
        if hit is not None:
            return hit
    cands = conductor_candidates(M) if candidates is None else list(candidates)
    an = a_n_list(M, default_terms(max(cands), 1.2))
    passing = []
    for N in cands:
        for w in (1, -1):
            if fe_residual(M, N, w, an) <= threshold:
                passing.append((N, w))
    if not passing:
        raise LSeriesError(f"no (N, w) among {cands} satisfies the functional equation")
    if len(passing) > 1:
        raise LSeriesError(f"ambiguous conductor/sign: {passing}")
    N, w = passing[0]
    if candidates is None and use_cache and k is not None:
        _write_conductor_cache(k, N, w)
    return N, w


@dataclass
class LSeriesData:
    N: int
    w: int
    an: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.N < 1 or self.w not in (1, -1):
            raise ValueError("bad conductor or sign")


def l_series_data(M, n_max: int | None = None) -> LSeriesData:
    N, w = conductor_scan(M)
    n_max = n_max or default_terms(N)
    return LSeriesData(N, w, a_n_list(M, n_max))


def l_value_at_2(M, N: int, w: int, n_max: int | None = None) -> float:
    """``L(E, 2)`` from the weighted series at ``t = 1``."""
    n_max = n_max or default_terms(N)
    an = a_n_list(M, n_max).astype(float)[1:]
    n = np.arange(1, n_max + 1, dtype=float)
    c = 2 * math.pi * n / math.sqrt(N)
    # Lambda(2) = sum a_n [(A/n)^2 (1 + c) e^-c + w E1(c)],  L(2) = Lambda(2) 4pi^2 / N
    lam = np.sum(an * ((N / (4 * math.pi**2 * n * n)) * (1 + c) * np.exp(-c) + w * exp1(c)))
    return float(lam) * 4 * math.pi**2 / N


def l2_partial_sum(M, n_max: int = 10**5) -> tuple[float, float]:
    """``sum_{n <= n_max} a_n / n^2`` and a rigorous bound on the tail.

    ``|a_n| <= d(n) sqrt(n)`` and ``sum_{n <= x} d(n) <= x (log x + 1)``
    give ``|tail| <= (3 log X + 9) / sqrt(X)``.
    """
    an = a_n_list(M, n_max).astype(float)
    n = np.arange(1, n_max + 1, dtype=float)
    head = math.fsum(an[1:] / (n * n))
    return head, (3 * math.log(n_max) + 9) / math.sqrt(n_max)


def l_prime_at_zero(M, N: int | None = None, n_max: int | None = None, w: int | None = None) -> float:
    """``L'(E, 0) = w N L(E, 2) / (4 pi^2)``.

    ``N`` and ``w`` default to ``conductor_scan``; a supplied ``N`` is
    re-checked and its sign fixed by the functional equation.
    """
    if N is None:
        N, w = conductor_scan(M)
    elif w is None:
        signs = [s for s in (1, -1) if fe_residual(M, N, s) <= 1e-6]
        if len(signs) != 1:
            raise LSeriesError(f"cannot fix the sign for N={N}: passing signs {signs}")
        w = signs[0]
    return w * N * l_value_at_2(M, N, w, n_max) / (4 * math.pi**2)
