"""Digamma, trigamma and log-gamma for positive real arguments.

All three use the same scheme: shift the argument upward with the
functional recurrence until it exceeds ``_SHIFT``, then evaluate the
asymptotic (Stirling-type) expansion.  With ``_SHIFT = 6`` and nine series
terms the truncation error is below 1e-13.
"""

import math

import numpy as np

from ..errors import DomainError

_SHIFT = 6.0
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_2n / (2n) for n = 1..9
_PSI_COEF = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
    43867.0 / 14364.0,
)
# B_2n for n = 1..9
_TRIGAMMA_COEF = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
)
# B_2n / (2n (2n - 1)) for n = 1..9
_LGAMMA_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
)


def _check_domain(x, name):
    x = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(x)):
        raise DomainError(f"{name}: NaN argument")
    if np.any(x <= 0):
        raise DomainError(f"{name}: argument must be > 0, got min {x.min()!r}")
    return x


def _shift(x, term):
    """Shift every x < _SHIFT up by _SHIFT, summing ``term(x + i)`` on the way.

    Returns ``(z, acc)`` with acc = sum_{i < _SHIFT} term(x + i) for shifted
    elements and 0 elsewhere.
    """
    small = x < _SHIFT
    z = x.copy()
    acc = np.zeros_like(x)
    xs = x[small]
    if xs.size:
        part = np.zeros_like(xs)
        for i in range(int(_SHIFT)):
            part += term(xs + i)
        acc[small] = part
        z[small] = xs + _SHIFT
    return z, acc


def _poly_inv_sq(z2inv, coefs):
    # sum_n coefs[n] * z2inv**(n+1), Horner form
    acc = np.zeros_like(z2inv)
    for c in reversed(coefs):
        acc = (acc + c) * z2inv
    return acc


def digamma(x):
    """psi(x) = d/dx ln Gamma(x) for x > 0, elementwise."""
    x = _check_domain(x, "digamma")
    z, acc = _shift(x, lambda t: -1.0 / t)
    z2inv = 1.0 / (z * z)
    return acc + np.log(z) - 0.5 / z - _poly_inv_sq(z2inv, _PSI_COEF)


def trigamma(x):
    """psi'(x) for x > 0, elementwise."""
    x = _check_domain(x, "trigamma")
    z, acc = _shift(x, lambda t: 1.0 / (t * t))
    zinv = 1.0 / z
    series = _poly_inv_sq(zinv * zinv, _TRIGAMMA_COEF) * zinv
    return acc + zinv + 0.5 * zinv * zinv + series


def lgamma(x):
    """ln Gamma(x) for x > 0, elementwise."""
    x = _check_domain(x, "lgamma")
    z, acc = _shift(x, lambda t: -np.log(t))
    zinv = 1.0 / z
    series = _poly_inv_sq(zinv * zinv, _LGAMMA_COEF) * z
    return acc + (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series
