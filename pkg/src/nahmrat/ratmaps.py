"""Based rational maps ``f = p/q`` with ``deg p < deg q = k`` (so ``f(oo) = 0``).

Polynomials store complex coefficients in ascending degree order. A map with
pairwise distinct poles is also available in partial-fraction form
``f(z) = sum_i r_i / (z - b_i)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeError, NotCoprime, PoleHit, RepeatedPoles, ZeroResidue

#: relative pole separation; absolute when the pole set has diameter < 1
DEFAULT_DELTA = 1e-6
#: |det| threshold for the row-normalized Sylvester matrix
RESULTANT_TOL = 1e-10
#: below this |r_i| a residue counts as zero
RESIDUE_TOL = 1e-12
#: relative size of |q(z)| treated as a pole hit
POLE_HIT_TOL = 1e-13


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Complex polynomial, coefficients in ascending order.

    Trailing zero coefficients are stripped so that the leading coefficient
    is nonzero unless the polynomial is identically zero.
    """

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=complex)).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        if self.coefficients.size == 1 and self.coefficients[0] == 0:
            return -1
        return self.coefficients.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1])

    def __call__(self, z):
        return horner(self.coefficients, z)

    def derivative(self) -> Polynomial:
        c = self.coefficients
        if c.size == 1:
            return Polynomial([0])
        return Polynomial(c[1:] * np.arange(1, c.size))

    def monic(self) -> Polynomial:
        return Polynomial(self.coefficients / self.leading)

    def roots(self) -> np.ndarray:
        """Roots from companion-matrix eigenvalues plus one Newton polish step."""
        n = self.degree
        if n < 1:
            return np.zeros(0, dtype=complex)
        c = self.coefficients / self.leading
        comp = np.zeros((n, n), dtype=complex)
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -c[:-1]
        r = np.linalg.eigvals(comp)
        dq = self.derivative()
        val, dval = self(r), dq(r)
        ok = dval != 0
        step = np.zeros_like(r)
        step[ok] = val[ok] / dval[ok]
        # keep the polish only where it does not increase the residual
        polished = r - step
        better = np.abs(self(polished)) <= np.abs(val)
        return np.where(better, polished, r)

    def scale(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    def __repr__(self):
        return f"Polynomial({np.round(self.coefficients, 12).tolist()})"


def horner(coefficients, z):
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for a in coefficients[::-1]:
        out = out * z + a
    return out


def _abs_horner(coefficients, z):
    """Sum of |a_j| |z|^j, the natural scale for a Horner evaluation at z."""
    return horner(np.abs(coefficients), np.abs(z)).real


@dataclass(frozen=True, eq=False)
class RationalMap:
    """Based degree-k map ``numerator / denominator``.

    ``degree_drop`` is nonzero only for maps produced by projecting a
    non-cyclic pair, in which case ``k`` is the reduced degree and
    ``degree_drop`` counts the cancelled common factors.
    """

    k: int
    numerator: Polynomial
    denominator: Polynomial
    degree_drop: int = 0

    def __post_init__(self):
        if self.denominator.degree != self.k:
            raise DegreeError(
                f"denominator has degree {self.denominator.degree}, expected k={self.k}"
            )
        if self.numerator.degree >= self.k:
            raise DegreeError(
                f"numerator degree {self.numerator.degree} must be below k={self.k}"
            )
        if abs(self.denominator.leading - 1) > 1e-14:
            raise DegreeError("denominator must be monic")

    def __call__(self, z):
        return evaluate(self, z)

    def coefficient_distance(self, other: RationalMap) -> float:
        """Max coefficient difference relative to max(1, largest coefficient)."""
        if self.k != other.k:
            return np.inf
        n = self.k
        a = np.zeros(2 * n + 1, dtype=complex)
        b = np.zeros(2 * n + 1, dtype=complex)
        a[: self.numerator.coefficients.size] = self.numerator.coefficients
        b[: other.numerator.coefficients.size] = other.numerator.coefficients
        a[n:] = self.denominator.coefficients
        b[n:] = other.denominator.coefficients
        scale = max(1.0, np.max(np.abs(a)), np.max(np.abs(b)))
        return float(np.max(np.abs(a - b)) / scale)

    def allclose(self, other: RationalMap, tol: float = 1e-8) -> bool:
        return self.coefficient_distance(other) <= tol

    def __repr__(self):
        return (
            f"RationalMap(k={self.k}, numerator={self.numerator!r}, "
            f"denominator={self.denominator!r})"
        )


def pole_threshold(points, delta: float = DEFAULT_DELTA) -> float:
    """Minimum admissible pairwise distance for a pole set."""
    points = np.asarray(points, dtype=complex)
    if points.size < 2:
        return 0.0
    diam = np.max(np.abs(points[:, None] - points[None, :]))
    return delta * max(diam, 1.0)


def min_separation(points) -> float:
    points = np.asarray(points, dtype=complex)
    if points.size < 2:
        return np.inf
    d = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


@dataclass(frozen=True, eq=False)
class PartialFractions:
    """Poles ``b_i`` and residues ``r_i`` of a map in Rat0_k.

    Construction checks that the poles are separated and the residues are
    nonzero; ``delta`` sets the separation margin.
    """

    poles: np.ndarray
    residues: np.ndarray
    delta: float = field(default=DEFAULT_DELTA, repr=False)

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.poles, dtype=complex)).ravel().copy()
        r = np.atleast_1d(np.asarray(self.residues, dtype=complex)).ravel().copy()
        if b.size != r.size or b.size == 0:
            raise DegreeError(f"need k >= 1 poles and as many residues, got {b.size}, {r.size}")
        b.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "poles", b)
        object.__setattr__(self, "residues", r)
        sep, thr = min_separation(b), pole_threshold(b, self.delta)
        if sep <= thr:
            raise RepeatedPoles(f"poles closer than {thr:.3g} (min separation {sep:.3g})")
        small = np.abs(r) <= RESIDUE_TOL
        if small.any():
            raise ZeroResidue(f"residue(s) at index {np.flatnonzero(small).tolist()} vanish")

    @property
    def k(self) -> int:
        return self.poles.size


def _sylvester(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Sylvester matrix of p, q (ascending coefficients), rows unit-normalized."""
    m, n = p.size - 1, q.size - 1
    size = m + n
    S = np.zeros((size, size), dtype=complex)
    pd, qd = p[::-1], q[::-1]
    for i in range(n):
        S[i, i : i + m + 1] = pd / np.linalg.norm(pd)
    for i in range(m):
        S[n + i, i : i + n + 1] = qd / np.linalg.norm(qd)
    return S


def scaled_resultant(p: Polynomial, q: Polynomial) -> complex:
    """Resultant of the row-normalized Sylvester matrix; |value| <= 1."""
    if p.degree < 0 or q.degree < 0:
        return 0.0
    if p.degree + q.degree == 0:
        return 1.0
    return complex(np.linalg.det(_sylvester(p.coefficients, q.coefficients)))


def make_rational_map(num, den) -> RationalMap:
    """Build a based map from numerator and denominator coefficients.

    The denominator is made monic. Raises ``DegreeError`` unless
    ``deg num < deg den`` and ``NotCoprime`` when the two share a root.
    """
    num = num if isinstance(num, Polynomial) else Polynomial(num)
    den = den if isinstance(den, Polynomial) else Polynomial(den)
    if den.degree < 1:
        raise DegreeError("denominator must have degree >= 1")
    if num.degree >= den.degree:
        raise DegreeError(f"deg numerator {num.degree} >= deg denominator {den.degree}")
    lead = den.leading
    num = Polynomial(num.coefficients / lead)
    den = Polynomial(den.coefficients / lead)
    res = scaled_resultant(num, den)
    if abs(res) < RESULTANT_TOL:
        root = None
        if num.degree >= 0:
            roots = den.roots()
            rel = np.abs(num(roots)) / np.maximum(_abs_horner(num.coefficients, roots), 1e-300)
            root = complex(roots[np.argmin(rel)])
        raise NotCoprime(
            f"numerator and denominator share a root near {root} (|scaled resultant| = {abs(res):.3g})",
            common_root=root,
        )
    return RationalMap(den.degree, num, den)


def evaluate(f: RationalMap, z):
    """``p(z)/q(z)``; for |z| > 1 the reversed polynomials are used in 1/z."""
    z = complex(z)
    p, q = f.numerator.coefficients, f.denominator.coefficients
    if abs(z) <= 1:
        qz = horner(q, z)
        scale = _abs_horner(q, z)
        if abs(qz) <= POLE_HIT_TOL * scale:
            raise PoleHit(f"z={z} is a pole")
        return complex(horner(p, z) / qz)
    w = 1 / z
    qr = horner(q[::-1], w)
    if abs(qr) <= POLE_HIT_TOL * _abs_horner(q[::-1], w):
        raise PoleHit(f"z={z} is a pole")
    # p(z)/q(z) = w^(deg q - deg p) * prev(w) / qrev(w)
    pr = horner(p[::-1], w)
    return complex(w ** (q.size - p.size) * pr / qr)


def poles_and_residues(f: RationalMap, delta: float = DEFAULT_DELTA) -> PartialFractions:
    """Partial-fraction form; raises ``RepeatedPoles`` outside Rat0_k."""
    b = f.denominator.roots()
    sep, thr = min_separation(b), pole_threshold(b, delta)
    if sep <= thr:
        raise RepeatedPoles(
            f"denominator roots closer than {thr:.3g}; map is not in Rat0_{f.k}"
        )
    diff = b[:, None] - b[None, :]
    diff[np.diag_indices_from(diff)] = 1
    dq = diff.prod(axis=1)  # q'(b_i) for monic q
    r = f.numerator(b) / dq
    return PartialFractions(b, r, delta=delta)


def from_partial_fractions(pf: PartialFractions) -> RationalMap:
    """Expand ``sum_i r_i/(z - b_i)`` into ``p/q``."""
    P = np.polynomial.polynomial
    b, r = pf.poles, pf.residues
    q = P.polyfromroots(b)
    p = np.zeros(b.size, dtype=complex)
    for i in range(b.size):
        term = r[i] * P.polyfromroots(np.delete(b, i))
        p[: term.size] += term
    return RationalMap(b.size, Polynomial(p), Polynomial(q))


def is_in_rat0(f: RationalMap, delta: float = DEFAULT_DELTA) -> bool:
    b = f.denominator.roots()
    return min_separation(b) > pole_threshold(b, delta)
