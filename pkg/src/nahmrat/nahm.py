"""Nahm data on (-1, 1): samplers, pole residues and residual checks.

Nahm's equations read ``dT1/ds = [T2, T3]`` and cyclic permutations. Taking
residues at a simple pole gives ``t1 + [t2, t3] = 0`` (cyclic), so the
residues are ``i`` times spin operators and ``-i t3`` has the half-integer
spectrum ``(k-1)/2, ..., -(k-1)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .elliptic import ellipk, jacobi_elliptic
from .errors import FormatError, GridOutOfRange, NoPole

RESIDUE_EQ_TOL = 1e-12
NO_POLE_TOL = 1e-8
#: smallest admissible distance of a residual probe to an endpoint
GRID_MARGIN = 1e-3
FIT_OFFSETS = (1e-2, 1e-3, 1e-4)

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


def commutator(a, b):
    return a @ b - b @ a


def residue_equation_error(t) -> float:
    """max over cyclic (i, j, l) of ||t_i + [t_j, t_l]||."""
    t1, t2, t3 = t
    return max(
        np.linalg.norm(t1 + commutator(t2, t3)),
        np.linalg.norm(t2 + commutator(t3, t1)),
        np.linalg.norm(t3 + commutator(t1, t2)),
    )


def commutant_dimension(mats, tol: float = 1e-9) -> int:
    """Dimension of ``{X : X M = M X for all M}``; 1 means irreducible."""
    k = mats[0].shape[0]
    eye = np.eye(k)
    rows = [np.kron(eye, M) - np.kron(M.T, eye) for M in mats]
    A = np.vstack(rows)
    s = np.linalg.svd(A, compute_uv=False)
    scale = max(s[0], 1.0) if s.size else 1.0
    return int(k * k - np.sum(s > tol * scale))


@dataclass(frozen=True, eq=False)
class SU2Residues:
    """Residue triple ``(t1, t2, t3)`` at a pole plus the unit vector ``v``."""

    t: np.ndarray  # shape (3, k, k)
    v: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=complex)
        v = np.asarray(self.v, dtype=complex).ravel()
        if t.ndim != 3 or t.shape[0] != 3 or t.shape[1] != t.shape[2] or t.shape[1] != v.size:
            raise FormatError(f"residue triple of shape {t.shape} does not fit v of size {v.size}")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)

    @property
    def k(self) -> int:
        return self.v.size

    @property
    def t1(self):
        return self.t[0]

    @property
    def t2(self):
        return self.t[1]

    @property
    def t3(self):
        return self.t[2]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues of ``-i t3``, real parts, descending."""
        ev = np.linalg.eigvals(-1j * self.t3)
        return np.sort(ev.real)[::-1]

    def is_trivial(self) -> bool:
        return bool(np.all(self.t == 0))

    def check(self, tol: float = 1e-10) -> None:
        """Raise ``FormatError`` unless the residue invariants hold."""
        err = residue_equation_error(self.t)
        if err > tol * max(1.0, np.abs(self.t).max()):
            raise FormatError(f"residue equations violated by {err:.3g}")
        if abs(np.linalg.norm(self.v) - 1) > 1e-10:
            raise FormatError("v must have unit norm")
        if self.is_trivial():
            return
        top = self.spectrum()[0]
        if np.linalg.norm(-1j * self.t3 @ self.v - top * self.v) > 1e-8:
            raise FormatError("v is not an eigenvector of -i t3 for its largest eigenvalue")


def spin_matrices(k: int):
    """Spin-(k-1)/2 operators ``S1, S2, S3``, ``S3`` diagonal and descending."""
    j = (k - 1) / 2
    m = j - np.arange(k)
    S3 = np.diag(m).astype(complex)
    Sp = np.zeros((k, k), dtype=complex)
    for a in range(1, k):
        # S+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, and |m+1> sits one row up
        Sp[a - 1, a] = np.sqrt(j * (j + 1) - m[a] * (m[a] + 1))
    Sm = Sp.conj().T
    S1 = (Sp + Sm) / 2
    S2 = (Sp - Sm) / (2j)
    return S1, S2, S3


def su2_residues(k: int) -> SU2Residues:
    """Standard irreducible residues ``t_i = i S_i`` with ``v = e_1``."""
    if k < 1:
        raise ValueError("k must be positive")
    S = np.array(spin_matrices(k))
    v = np.zeros(k, dtype=complex)
    v[0] = 1
    return SU2Residues(1j * S, v)


@dataclass(frozen=True, eq=False)
class NahmData:
    """Matrix-valued ``T_i(s)`` on (-1, 1) with declared pole residues.

    ``sampler`` maps an array of ``s`` values of shape ``(n,)`` to an array
    of shape ``(n, 3, k, k)``. ``residue_plus`` is None when the data is
    regular at ``s = +1``.
    """

    k: int
    kind: str
    sampler: Callable[[np.ndarray], np.ndarray]
    residue_minus: SU2Residues
    residue_plus: SU2Residues | None
    params: dict = field(default_factory=dict)

    def __call__(self, s):
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = self.sampler(s_arr)
        return out[0] if np.ndim(s) == 0 else out

    def residue(self, endpoint: int) -> SU2Residues | None:
        return self.residue_minus if endpoint == -1 else self.residue_plus


def builtin_k1(c) -> NahmData:
    """Constant charge-one data ``T_j = -(i/2) c_j``."""
    c = np.asarray(c, dtype=float).ravel()
    if c.size != 3:
        raise ValueError("builtin_k1 needs three real numbers")
    T = (-0.5j * c).reshape(3, 1, 1)

    def sampler(s):
        return np.repeat(T[None], s.size, axis=0)

    trivial = SU2Residues(np.zeros((3, 1, 1)), np.ones(1))
    return NahmData(1, "builtin_k1", sampler, trivial, trivial, {"c": c.tolist()})


# Signs of the Euler-top profiles, fixed against the residual check so that
# the residue at s = -1 is exactly su2_residues(2).
K2_SIGNS = (1.0, 1.0, 1.0)


def builtin_k2(m: float) -> NahmData:
    """Charge-two Euler-top data ``T_i = (i/2) f_i(s) sigma_i``.

    With ``D = K(m)`` and ``x = D (s + 1)``::

        f1 = D cn(x)/sn(x),  f2 = D dn(x)/sn(x),  f3 = D/sn(x)

    Poles sit at both endpoints since ``sn`` vanishes at 0 and 2K.
    """
    if not 0 <= m < 1:
        raise ValueError(f"m={m} outside [0, 1)")
    D = ellipk(m)
    signs = np.asarray(K2_SIGNS)

    def sampler(s):
        # on the right half use x = 2K - y with y = D (1 - s); evaluating sn
        # next to 2K directly would lose digits to cancellation in sin(phi)
        right = s > 0
        x = np.where(right, D * (1 - s), D * (s + 1))
        sn, cn, dn = jacobi_elliptic(x, m)
        cn = np.where(right, -cn, cn)
        f = signs[:, None] * np.stack([D * cn / sn, D * dn / sn, D / sn])  # (3, n)
        return 0.5j * f.T[:, :, None, None] * SIGMA[None]

    minus = su2_residues(2)
    # near s = 1: sn -> sn(2K - y) = sn(y), cn -> -1, dn -> 1
    plus_t = 0.5j * np.array([SIGMA[0], -SIGMA[1], -SIGMA[2]]) * signs[:, None, None]
    plus_v = np.array([0, 1], dtype=complex)  # -i t3 = -sigma3/2 is largest on e_2
    plus = SU2Residues(plus_t, plus_v)
    return NahmData(2, "builtin_k2", sampler, minus, plus, {"m": float(m), "D": float(D)})


def tabulated(s_samples, T_samples, residue_minus: SU2Residues, residue_plus: SU2Residues | None) -> NahmData:
    """Nahm data from samples, with the declared pole parts added back.

    The regular part ``T(s) - t^-/(1+s) - t^+/(s-1)`` is interpolated by a
    cubic spline and held constant beyond the sampled range.
    """
    s_samples = np.asarray(s_samples, dtype=float)
    T_samples = np.asarray(T_samples, dtype=complex)
    order = np.argsort(s_samples)
    s_samples, T_samples = s_samples[order], T_samples[order]
    if np.any(np.diff(s_samples) <= 0):
        raise FormatError("sample positions must be distinct")
    if s_samples[0] <= -1 or s_samples[-1] >= 1:
        raise FormatError("samples must lie strictly inside (-1, 1)")
    n, three, k, k2 = T_samples.shape
    if three != 3 or k != k2 or k != residue_minus.k:
        raise FormatError(f"sample array has shape {T_samples.shape}")
    if residue_plus is not None and residue_plus.k != k:
        raise FormatError("residue_plus has the wrong size")
    if n < 2:
        raise FormatError("need at least two samples")

    def pole_part(s):
        s = s[:, None, None, None]
        out = residue_minus.t[None] / (1 + s)
        if residue_plus is not None:
            out = out + residue_plus.t[None] / (s - 1)
        return out

    regular = T_samples - pole_part(s_samples)
    bc = "natural" if n > 2 else "not-a-knot"
    spline = CubicSpline(s_samples, regular, axis=0, bc_type=bc) if n > 2 else None

    def sampler(s):
        sc = np.clip(s, s_samples[0], s_samples[-1])
        if spline is None:
            w = ((sc - s_samples[0]) / (s_samples[1] - s_samples[0]))[:, None, None, None]
            reg = (1 - w) * regular[0] + w * regular[1]
        else:
            reg = spline(sc)
        return reg + pole_part(s)

    return NahmData(k, "tabulated", sampler, residue_minus, residue_plus, {"n_samples": int(n)})


def pole_part(data: NahmData, s: np.ndarray):
    """Declared pole terms ``t^-/(1+s) + t^+/(s-1)`` and their s-derivative."""
    s = s[:, None, None, None]
    P = data.residue_minus.t[None] / (1 + s)
    dP = -data.residue_minus.t[None] / (1 + s) ** 2
    if data.residue_plus is not None:
        P = P + data.residue_plus.t[None] / (s - 1)
        dP = dP - data.residue_plus.t[None] / (s - 1) ** 2
    return P, dP


def _derivative(data: NahmData, s: np.ndarray, h: np.ndarray, levels: int) -> np.ndarray:
    """dT/ds: exact for the declared pole part, central differences with
    Richardson extrapolation over h, h/2, ... for the regular remainder."""

    def regular(x):
        return data.sampler(x) - pole_part(data, x)[0]

    hs = h[:, None, None, None]
    table = []
    for j in range(levels + 1):
        step = h / 2**j
        d = (regular(s + step) - regular(s - step)) / (2 * hs / 2**j)
        row = [d]
        for l in range(1, j + 1):
            prev = table[j - 1][l - 1]
            row.append(row[l - 1] + (row[l - 1] - prev) / (4**l - 1))
        table.append(row)
    return table[-1][-1] + pole_part(data, s)[1]


def nahm_residual(
    data: NahmData, grid, step_fraction: float = 0.01, levels: int = 1, relative: bool = False
) -> float:
    """Max over the grid of ``||dT_i/ds - [T_j, T_l]||`` (Frobenius, cyclic).

    The declared pole part is differentiated exactly. The regular remainder
    uses central differences with step ``step_fraction`` times the distance
    to the nearer endpoint, refined by ``levels`` Richardson extrapolations;
    ``levels=0`` is the plain second-order difference.

    With ``relative=True`` each point is divided by ``1 + max_i ||T_i||^2``,
    the size of the commutator terms, which keeps probes next to a pole
    comparable with interior ones.
    """
    s = np.atleast_1d(np.asarray(grid, dtype=float))
    dist = 1 - np.abs(s)
    if np.any(dist < GRID_MARGIN * (1 - 1e-9)):
        raise GridOutOfRange(f"grid must stay {GRID_MARGIN} away from the endpoints")
    h = step_fraction * dist
    T = data.sampler(s)
    dT = _derivative(data, s, h, levels)
    T1, T2, T3 = T[:, 0], T[:, 1], T[:, 2]
    r = np.stack(
        [
            dT[:, 0] - commutator(T2, T3),
            dT[:, 1] - commutator(T3, T1),
            dT[:, 2] - commutator(T1, T2),
        ]
    )
    res = np.max(np.linalg.norm(r, axis=(-2, -1)), axis=0)
    if relative:
        res = res / (1 + np.max(np.linalg.norm(T, axis=(-2, -1)), axis=1) ** 2)
    return float(np.max(res))


@dataclass(frozen=True, eq=False)
class ResidueFit:
    t: np.ndarray
    spectrum: np.ndarray
    residue_error: float
    commutant_dim: int

    @property
    def irreducible(self) -> bool:
        return self.commutant_dim == 1


def residue_fit(data: NahmData, endpoint: int, offsets=FIT_OFFSETS) -> ResidueFit:
    """Extrapolate ``(s - e) T(s)`` to ``s = e`` from the given offsets."""
    if endpoint not in (-1, 1):
        raise ValueError("endpoint must be -1 or +1")
    h = np.asarray(offsets, dtype=float)
    s = endpoint - endpoint * h
    g = (s - endpoint)[:, None, None, None] * data.sampler(s)
    # Neville extrapolation to h = 0
    p = list(g)
    n = len(p)
    for level in range(1, n):
        for i in range(n - level):
            p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i])
        p.pop()
    t = p[0]
    if np.linalg.norm(t) < NO_POLE_TOL:
        raise NoPole(f"no pole at s={endpoint}: fitted residue norm {np.linalg.norm(t):.3g}")
    spectrum = np.sort(np.linalg.eigvals(-1j * t[2]).real)[::-1]
    return ResidueFit(t, spectrum, residue_equation_error(t), commutant_dimension(list(t)))
