"""Jacobi elliptic functions by the arithmetic-geometric mean.

Parameter convention: ``m = k^2`` with ``0 <= m <= 1``.
"""

from functools import lru_cache

import numpy as np

_MAX_AGM = 40


@lru_cache(maxsize=64)
def _agm_sequence(m):
    a = [1.0]
    b = np.sqrt(1.0 - m)
    c = [np.sqrt(m)]
    # c stalls at about one ulp of a, so stop at machine epsilon
    while abs(c[-1]) > np.finfo(float).eps * a[-1] and len(a) < _MAX_AGM:
        a_next = 0.5 * (a[-1] + b)
        c.append(0.5 * (a[-1] - b))
        b = np.sqrt(a[-1] * b)
        a.append(a_next)
    return tuple(a), tuple(c)


def ellipk(m: float) -> float:
    """Complete elliptic integral of the first kind, ``K(m)``."""
    if not 0 <= m <= 1:
        raise ValueError(f"m={m} outside [0, 1]")
    if m == 1:
        return np.inf
    a, _ = _agm_sequence(float(m))
    return np.pi / (2 * a[-1])


def jacobi_elliptic(u, m: float):
    """Return ``(sn, cn, dn)`` at ``u`` (scalar or array) for parameter ``m``.

    Uses the descending Landen / AGM recursion for the amplitude; the two
    degenerate parameters fall back to their closed forms.
    """
    if not 0 <= m <= 1:
        raise ValueError(f"m={m} outside [0, 1]")
    u = np.asarray(u, dtype=float)
    if m == 0:
        return np.sin(u), np.cos(u), np.ones_like(u)
    if m == 1:
        sech = 1 / np.cosh(u)
        return np.tanh(u), sech, sech.copy()

    a, c = _agm_sequence(float(m))
    n = len(a) - 1
    # sn, cn have real period 4K
    period = 2 * np.pi / a[n]
    u = u - period * np.round(u / period)
    phi = (2.0**n) * a[n] * u
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # 1 - m sn^2 written without cancellation; 1 - m is exact for m >= 1/2
    dn = np.sqrt(cn * cn + (1.0 - m) * sn * sn)
    return sn, cn, dn
