"""Scattering flow from Nahm data to a Donaldson pair.

With ``A0 = T1 + i T2``, ``A1 = -i T3`` and ``A2 = T1 - i T2`` the flow
solves ``du/ds = A1(s) u / 2`` from the pole at ``s = -1``, where
``u ~ (1 + s)^lam v``, and reads off ``B = -A0(1)`` and ``W = u(1)``.

The exponent ``lam`` comes from the declared residue at ``-1``: near the
pole ``A1 ~ (-i t3)/(1 + s)``, and substituting ``(1+s)^lam v`` with
``-i t3 v = mu v`` gives ``lam = mu / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._rk import integrate
from .bwpairs import BWPair, project
from .errors import DivergentEndpoint, NotSymmetric
from .nahm import NahmData
from .ratmaps import RationalMap

DEFAULT_EPS = 1e-3
DEFAULT_TOL = 1e-12
DEFAULT_LEVELS = 4
#: |ratio - 2| / 2 below this flags a simple pole of A0 at s = +1
DIVERGENCE_BAND = 0.15
FLOW_SYMMETRY_TOL = 1e-6


@dataclass(frozen=True)
class CombinedMatrices:
    data: NahmData

    def _T(self, s):
        return self.data(s)

    def A0(self, s):
        T = self._T(s)
        return T[..., 0, :, :] + 1j * T[..., 1, :, :]

    def A1(self, s):
        return -1j * self._T(s)[..., 2, :, :]

    def A2(self, s):
        T = self._T(s)
        return T[..., 0, :, :] - 1j * T[..., 1, :, :]


def combine(data: NahmData) -> CombinedMatrices:
    return CombinedMatrices(data)


def indicial_exponent(data: NahmData) -> float:
    """Half the largest eigenvalue of ``-i t3`` at ``s = -1`` (0 if trivial)."""
    res = data.residue_minus
    if res.is_trivial():
        return 0.0
    return 0.5 * float(res.spectrum()[0])


@dataclass(frozen=True, eq=False)
class FlowResult:
    B: np.ndarray
    W: np.ndarray
    epsilon_used: float
    extrapolation_error: float
    endpoint_divergence_flag: bool
    diagnostics: str
    exponent: float = 0.0


def _max_step(s):
    return max(0.1 * (1 - abs(s)), 1e-14)


def solve_scattering(data: NahmData, s_end: float, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL, v=None):
    """``u(s_end)`` for the solution started at ``-1 + eps`` with ``eps^lam v``."""
    lam = indicial_exponent(data)
    v = data.residue_minus.v if v is None else np.asarray(v, dtype=complex)
    u0 = eps**lam * v
    sampler = data.sampler

    def rhs(s, u):
        # (1/2) A1 u with A1 = -i T3
        return -0.5j * (sampler(np.array([s]))[0, 2] @ u)

    u, _ = integrate(rhs, -1 + eps, s_end, u0, tol=tol, max_step=_max_step)
    return u


def _richardson(values):
    """Diagonal of the Richardson tableau for halving steps, integer powers."""
    table = [[values[0]]]
    for j in range(1, len(values)):
        row = [values[j]]
        for l in range(1, j + 1):
            row.append(row[l - 1] + (row[l - 1] - table[j - 1][l - 1]) / (2**l - 1))
        table.append(row)
    best = table[-1][-1]
    prev = table[-2][-2] if len(table) > 1 else best
    return best, prev


def donaldson_flow(
    data: NahmData,
    eps: float = DEFAULT_EPS,
    tol: float = DEFAULT_TOL,
    levels: int = DEFAULT_LEVELS,
    v=None,
) -> FlowResult:
    """Integrate the scattering equation and return ``(B, W)`` at ``s = 1``.

    The solve is repeated at ``eps, eps/2, ..., eps/2^(levels-1)`` and the
    endpoint values are Richardson-extrapolated in ``eps``. A simple pole of
    ``A0`` at ``s = +1`` is reported through ``endpoint_divergence_flag``
    rather than raised.
    """
    if not 0 < eps < 0.1:
        raise ValueError(f"eps={eps} outside (0, 0.1)")
    levels = max(2, int(levels))
    A = combine(data)
    lam = indicial_exponent(data)

    n0 = np.linalg.norm(A.A0(1 - eps))
    n1 = np.linalg.norm(A.A0(1 - eps / 2))
    ratio = n1 / n0 if n0 > 1e-300 else 1.0
    divergent = abs(ratio - 2) <= 2 * DIVERGENCE_BAND
    notes = [
        f"exponent={lam:.6g}",
        f"|A0(1-eps)|*eps={n0 * eps:.6g}",
        f"|A0(1-eps/2)|*eps/2={n1 * eps / 2:.6g}",
        f"growth_ratio={ratio:.6g}",
    ]

    Ws, Bs = [], []
    for j in range(levels):
        e = eps / 2**j
        Ws.append(solve_scattering(data, 1 - e, e, tol, v))
        Bs.append(-A.A0(1 - e))

    if divergent:
        notes.insert(0, "A0 grows like 1/(1-s) at s=+1; B=-A0(1) is undefined")
        return FlowResult(
            Bs[-1], Ws[-1], eps / 2 ** (levels - 1), float("nan"), True, "; ".join(notes), lam
        )

    W, W_prev = _richardson(Ws)
    B, B_prev = _richardson(Bs)
    err = max(np.max(np.abs(W - W_prev)), np.max(np.abs(B - B_prev)))
    scale = np.max(np.abs(B)) if B.size else 0.0
    asym = np.max(np.abs(B - B.T))
    if asym > FLOW_SYMMETRY_TOL * max(scale, 1.0):
        notes.append(f"B is not symmetric: max|B-B^t|={asym:.3g}")
    return FlowResult(B, W, eps, float(err), False, "; ".join(notes), lam)


def extract_map(result: FlowResult) -> RationalMap:
    """Project the flow output to its rational map."""
    if result.endpoint_divergence_flag:
        raise DivergentEndpoint("A0 has a pole at s=+1; no pair (B, W) to project")
    B = result.B
    asym = np.max(np.abs(B - B.T))
    if asym > FLOW_SYMMETRY_TOL * max(1.0, np.max(np.abs(B))):
        raise NotSymmetric(f"flow output B is not symmetric (max|B-B^t| = {asym:.3g})")
    B = 0.5 * (B + B.T)
    return project(BWPair(B, result.W))
