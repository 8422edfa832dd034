"""Complex dilogarithm and the Bloch-Wigner function.

``li2`` maps its argument into the region ``|z| <= 1, Re z <= 1/2`` with the
inversion and reflection formulas and then sums the Bernoulli series in
``w = -log(1 - z)``, which converges for ``|w| < 2*pi`` (here ``|w| < 1.9``).
Principal branches are used throughout, so ``Im li2(x) = -pi*log(x)`` for
real ``x > 1``, the same convention as mpmath.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.special import bernoulli, factorial

from ._accel import njit, select

__all__ = ["li2", "bloch_wigner", "bloch_wigner_array", "li2_series"]

PI2_6 = math.pi**2 / 6.0
_NTERMS = 22
# B_{2j} / (2j+1)!  for j = 1 .. _NTERMS
_B = bernoulli(2 * _NTERMS)
_COEF = np.array([_B[2 * j] / factorial(2 * j + 1, exact=False) for j in range(1, _NTERMS + 1)])


@njit
def _li2_impl(z, coef):
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6, 0.0)
    sign = 1.0
    const = 0j
    if abs(z) > 1.0:
        mz = -z
        # +0.0 clears a negative zero so real z > 1 lands on arg(-z) = +pi
        lz = cmath.log(complex(mz.real, mz.imag + 0.0))
        const = -PI2_6 - 0.5 * lz * lz
        sign = -1.0
        z = 1.0 / z
    if z.real > 0.5:
        const = const + sign * (PI2_6 - cmath.log(z) * cmath.log(1.0 - z))
        sign = -sign
        z = 1.0 - z
    w = -cmath.log(1.0 - z)
    w2 = w * w
    acc = 0j
    for j in range(coef.shape[0] - 1, -1, -1):
        acc = acc * w2 + coef[j]
    series = w - 0.25 * w2 + w * w2 * acc
    return const + sign * series


@njit
def _bloch_wigner_impl(z, coef):
    if z == 0 or z == 1:
        return 0.0
    sign = 1.0
    if abs(z) > 1.0:
        z = 1.0 / z
        sign = -1.0
    v = _li2_impl(z, coef).imag + cmath.phase(1.0 - z) * math.log(abs(z))
    return sign * v




def li2(z: complex) -> complex:
    """Principal dilogarithm ``Li2(z)`` for complex ``z``."""
    return complex(_li2_impl(complex(z), _COEF))


def bloch_wigner(z: complex) -> float:
    """Bloch-Wigner function ``D(z) = Im Li2(z) + arg(1-z) log|z|``.

    Real-analytic off ``{0, 1}``, zero on the real line, odd under
    ``z -> conj(z)``, ``z -> 1/z`` and ``z -> 1 - z``.
    """
    return float(_bloch_wigner_impl(complex(z), _COEF))


def li2_series(z: complex, nterms: int) -> complex:
    """Partial sum ``sum_{n=1}^{nterms} z**n / n**2`` (test oracle)."""
    n = np.arange(1, nterms + 1, dtype=float)
    # log-space powers keep large nterms from underflowing into NaN
    terms = np.exp(n * np.log(complex(z))) / n**2 if z != 0 else np.zeros(1)
    return complex(np.sum(terms[::-1]))


# --------------------------------------------------------------------------
# array kernels


@njit
def _bw_array_numba(z, coef):
    out = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        out[i] = _bloch_wigner_impl(z[i], coef)
    return out


def _li2_array_numpy(z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    sign = np.ones(z.shape)
    const = np.zeros_like(z)
    zero = z == 0
    one = z == 1
    work = np.where(zero | one, 0.5 + 0j, z)

    big = np.abs(work) > 1.0
    mz = -work[big]
    lz = np.log(mz.real + 1j * (mz.imag + 0.0))
    const[big] = -PI2_6 - 0.5 * lz * lz
    sign[big] = -1.0
    work[big] = 1.0 / work[big]

    refl = work.real > 0.5
    wr = work[refl]
    const[refl] += sign[refl] * (PI2_6 - np.log(wr) * np.log(1.0 - wr))
    sign[refl] = -sign[refl]
    work[refl] = 1.0 - wr

    w = -np.log(1.0 - work)
    w2 = w * w
    acc = np.zeros_like(w)
    for c in _COEF[::-1]:
        acc = acc * w2 + c
    out = const + sign * (w - 0.25 * w2 + w * w2 * acc)
    out[zero] = 0.0
    out[one] = PI2_6
    return out


def _bw_array_numpy(z, coef=None):
    z = np.asarray(z, dtype=complex)
    trivial = (z == 0) | (z == 1)
    work = np.where(trivial, 0.5 + 0.5j, z)
    big = np.abs(work) > 1.0
    sign = np.where(big, -1.0, 1.0)
    work = np.where(big, 1.0 / work, work)
    val = _li2_array_numpy(work).imag + np.angle(1.0 - work) * np.log(np.abs(work))
    return np.where(trivial, 0.0, sign * val)


_bw_array = select(_bw_array_numba, _bw_array_numpy)


def bloch_wigner_array(z) -> np.ndarray:
    """Vectorised :func:`bloch_wigner` over a 1-D complex array."""
    z = np.ascontiguousarray(np.asarray(z, dtype=np.complex128).ravel())
    return _bw_array(z, _COEF)
