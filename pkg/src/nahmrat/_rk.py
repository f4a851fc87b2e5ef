"""Embedded Dormand-Prince 5(4) integrator for complex vector ODEs."""

import numpy as np

from .errors import StepFailure

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_AM = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _AM[_i, : len(_row)] = _row
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array(
    [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4


def integrate(rhs, s0, s1, u0, tol=1e-12, max_step=None, max_steps=200_000):
    """Integrate ``du/ds = rhs(s, u)`` from ``s0`` to ``s1 > s0``.

    ``max_step`` is an optional callable giving the largest admissible step
    at position ``s``. Mixed absolute/relative error control at ``tol``.
    Returns ``(u1, n_steps)``.
    """
    u = np.array(u0, dtype=complex)
    s = float(s0)
    span = s1 - s0
    if span <= 0:
        raise ValueError("integration runs forward only")
    h = min(span, max_step(s) if max_step else span) * 0.1
    k1 = rhs(s, u)
    steps = 0
    K = np.empty((7,) + u.shape, dtype=complex)
    while s < s1:
        if steps >= max_steps:
            raise StepFailure(f"step budget of {max_steps} exhausted at s={s:.6g}")
        cap = max_step(s) if max_step else span
        h = min(h, cap, s1 - s)
        if h <= 1e-15 * max(1.0, abs(s)):
            raise StepFailure(f"step size underflow at s={s:.6g}")
        K[0] = k1
        for i in range(1, 7):
            K[i] = rhs(s + _C[i] * h, u + h * (_AM[i, :i] @ K[:i]))
        u_new = u + h * (_B5 @ K)
        err = h * (_E @ K)
        scale = tol + tol * np.maximum(np.abs(u), np.abs(u_new))
        e = float(np.max(np.abs(err) / scale)) if u.size else 0.0
        if e <= 1.0:
            s = s + h if h < s1 - s else s1
            u = u_new
            k1 = K[6]
            steps += 1
        factor = 5.0 if e == 0 else min(5.0, max(0.2, 0.9 * e ** -0.2))
        h = h * factor
    return u, steps
