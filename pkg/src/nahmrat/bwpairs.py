"""Donaldson pairs ``(B, W)``: symmetric B, cyclic W.

The pairs form a principal O(k) bundle over Rat_k through the projection
``f(z) = W^t (zI - B)^{-1} W``. Over maps with distinct poles the diagonal
pairs give a reduction to the signed permutation group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoMatch, NotOrthogonal, NotSignRelated, NotSymmetric, ZeroResidue
from .ratmaps import (
    DEFAULT_DELTA,
    RESIDUE_TOL,
    PartialFractions,
    Polynomial,
    RationalMap,
    pole_threshold,
    poles_and_residues,
)

SYMMETRY_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-12
#: cyclic iff the conditioned Krylov matrix has sigma_min / sigma_max above this
CYCLIC_TOL = 1e-8
#: |W2 / W1 -+ 1| allowed when relating diagonal pairs
SIGN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class BWPair:
    """Symmetric complex ``B`` (k x k) with vector ``W``.

    Symmetry is with respect to the transpose, not the conjugate transpose.
    Cyclicity is not enforced here; see :func:`cyclicity`.
    """

    B: np.ndarray
    W: np.ndarray

    def __post_init__(self):
        B = np.atleast_2d(np.asarray(self.B, dtype=complex)).copy()
        W = np.atleast_1d(np.asarray(self.W, dtype=complex)).ravel().copy()
        if B.shape != (W.size, W.size):
            raise ValueError(f"B has shape {B.shape} but W has {W.size} entries")
        scale = np.max(np.abs(B)) if B.size else 0.0
        asym = np.max(np.abs(B - B.T)) if B.size else 0.0
        if asym > SYMMETRY_TOL * scale:
            raise NotSymmetric(f"max|B - B^t| = {asym:.3g}")
        B.setflags(write=False)
        W.setflags(write=False)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "W", W)

    @property
    def k(self) -> int:
        return self.W.size

    def is_diagonal(self) -> bool:
        return bool(np.all(self.B == np.diag(np.diag(self.B))))


def krylov_matrix(B, W) -> np.ndarray:
    """Columns ``W, BW, ..., B^{k-1} W``."""
    B = np.asarray(B, dtype=complex)
    k = B.shape[0]
    K = np.empty((k, k), dtype=complex)
    col = np.asarray(W, dtype=complex)
    for j in range(k):
        K[:, j] = col
        col = B @ col
    return K


def cyclicity(pair: BWPair) -> complex:
    """Determinant of the Krylov matrix of ``pair`` (LU with partial pivoting)."""
    return complex(np.linalg.det(krylov_matrix(pair.B, pair.W)))


def _conditioned_krylov(pair: BWPair) -> np.ndarray:
    """Krylov matrix of ``((B - cI)/rho, W/|W|)`` with ``c = tr B / k``.

    The shift and scaling leave the Krylov span unchanged.
    """
    k = pair.k
    B = pair.B - np.trace(pair.B) / k * np.eye(k)
    rho = np.linalg.norm(B, 2)
    nw = np.linalg.norm(pair.W)
    if nw == 0:
        return np.zeros((k, k), dtype=complex)
    return krylov_matrix(B / rho if rho > 0 else B, pair.W / nw)


def normalized_cyclicity(pair: BWPair) -> float:
    """Reciprocal condition number of the shifted, scaled Krylov matrix.

    Lies in [0, 1] and vanishes exactly when W is not cyclic. A raw
    determinant is useless as a threshold here: Vandermonde factors make it
    tiny for perfectly cyclic pairs once k is around 8.
    """
    s = np.linalg.svd(_conditioned_krylov(pair), compute_uv=False)
    return float(s[-1] / s[0]) if s[0] > 0 else 0.0


def is_cyclic(pair: BWPair, tol: float = CYCLIC_TOL) -> bool:
    return normalized_cyclicity(pair) > tol


def _krylov_basis(pair: BWPair, tol: float) -> np.ndarray:
    """Orthonormal basis of the numerical Krylov span (at most k - 1 columns)."""
    U, s, _ = np.linalg.svd(_conditioned_krylov(pair))
    rank = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return U[:, : min(rank, pair.k - 1)]


def _faddeev_leverrier(B, W, left=None):
    """Characteristic polynomial of B and ``L^t adj(zI - B) W``, both ascending.

    ``L`` defaults to ``W``.
    """
    k = B.shape[0]
    left = W if left is None else left
    I = np.eye(k, dtype=complex)
    q = np.zeros(k + 1, dtype=complex)
    p = np.zeros(max(k, 1), dtype=complex)
    q[k] = 1
    M = I
    for j in range(1, k + 1):
        # adj(zI - B) = sum_j M_j z^(k-j)
        p[k - j] = left @ M @ W
        BM = B @ M
        q[k - j] = -np.trace(BM) / j
        M = BM + q[k - j] * I
    return Polynomial(p), Polynomial(q)


def project(pair: BWPair, cyclic_tol: float = CYCLIC_TOL) -> RationalMap:
    """The map ``z -> W^t (zI - B)^{-1} W``.

    Numerator and denominator come from the Faddeev-LeVerrier recursion.
    When W is not cyclic the returned map is the reduced one, of degree
    ``k - degree_drop``.
    """
    B, W = pair.B, pair.W
    if is_cyclic(pair, cyclic_tol):
        p, q = _faddeev_leverrier(B, W)
        return RationalMap(pair.k, p, q)

    # The Krylov span is B-invariant and contains W, so restricting to it
    # realizes the same map with the common factors already gone.
    V = _krylov_basis(pair, cyclic_tol)
    rank = V.shape[1]
    H = V.conj().T @ B @ V
    p, q = _faddeev_leverrier(H, V.conj().T @ W, left=V.T @ W)
    return RationalMap(rank, p, q, degree_drop=pair.k - rank)


def check_orthogonal(Q, tol: float = ORTHOGONALITY_TOL) -> np.ndarray:
    Q = np.asarray(Q)
    if np.iscomplexobj(Q):
        if np.max(np.abs(Q.imag), initial=0) > 0:
            raise NotOrthogonal("orthogonal matrices must be real")
        Q = Q.real
    Q = np.atleast_2d(Q.astype(float))
    if Q.shape[0] != Q.shape[1]:
        raise NotOrthogonal(f"Q must be square, got {Q.shape}")
    err = np.max(np.abs(Q.T @ Q - np.eye(Q.shape[0])))
    if err > tol:
        raise NotOrthogonal(f"max|Q^t Q - I| = {err:.3g}")
    return Q


def random_orthogonal(k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of O(k)."""
    Q, R = np.linalg.qr(rng.standard_normal((k, k)))
    return Q * np.sign(np.diag(R))


def act_orthogonal(Q, pair: BWPair) -> BWPair:
    """``(Q B Q^t, Q W)``."""
    Q = check_orthogonal(Q)
    if Q.shape[0] != pair.k:
        raise NotOrthogonal(f"Q is {Q.shape[0]}x{Q.shape[0]} but k={pair.k}")
    B = Q @ pair.B @ Q.T
    return BWPair(0.5 * (B + B.T), Q @ pair.W)


def principal_sqrt(r) -> np.ndarray:
    """Principal square root; negative reals map to ``+i sqrt|r|``."""
    r = np.asarray(r, dtype=complex)
    # a signed-zero imaginary part would otherwise put -0.0j on the lower sheet
    r = np.where(r.imag == 0, r.real + 0j, r)
    return np.sqrt(r)


def lift_pf(pf: PartialFractions) -> BWPair:
    if np.any(np.abs(pf.residues) <= RESIDUE_TOL):
        raise ZeroResidue("cannot lift a map with a vanishing residue")
    return BWPair(np.diag(pf.poles), principal_sqrt(pf.residues))


def lift_distinct(f: RationalMap, delta: float = DEFAULT_DELTA) -> BWPair:
    """Diagonal pair over ``f``: ``B = diag(b_i)``, ``W_i = sqrt(r_i)``."""
    return lift_pf(poles_and_residues(f, delta))


def relate(pair1: BWPair, pair2: BWPair, delta: float = DEFAULT_DELTA, sign_tol: float = SIGN_TOL):
    """Signed permutation ``g`` with ``g . pair1 = pair2`` for diagonal pairs.

    Diagonal entries are matched greedily to their nearest counterpart, then
    each component ratio ``W2[pi(i)] / W1[i]`` must be +1 or -1.
    """
    from .monodromy import SignedPermutation

    if pair1.k != pair2.k:
        raise NoMatch(f"sizes differ: {pair1.k} vs {pair2.k}")
    if not (pair1.is_diagonal() and pair2.is_diagonal()):
        raise NoMatch("relate needs diagonal pairs")
    b1, b2 = np.diag(pair1.B), np.diag(pair2.B)
    thr = max(pole_threshold(b1, delta), pole_threshold(b2, delta))
    dist = np.abs(b1[:, None] - b2[None, :])
    perm = np.argmin(dist, axis=1)
    if len(set(perm.tolist())) != pair1.k:
        raise NoMatch("diagonal entries are not a permutation of each other")
    gap = dist[np.arange(pair1.k), perm]
    if np.any(gap > max(thr, delta)):
        raise NoMatch(f"diagonal entries differ by up to {gap.max():.3g}")
    W1, W2 = pair1.W, pair2.W
    if np.any(W1 == 0):
        raise NotSignRelated("pair1 has a zero W component")
    ratio = W2[perm] / W1
    signs = np.where(np.abs(ratio - 1) <= sign_tol, 1, 0) + np.where(
        np.abs(ratio + 1) <= sign_tol, -1, 0
    )
    if np.any(signs == 0):
        bad = np.flatnonzero(signs == 0).tolist()
        raise NotSignRelated(f"W ratios at {bad} are not +-1: {ratio[bad]}")
    return SignedPermutation(tuple(perm.tolist()), tuple(signs.tolist()))
