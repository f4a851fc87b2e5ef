import itertools

import numpy as np
import pytest
import sympy as sp
from conftest import random_diagonal_pair

from nahmrat import (
    BWPair,
    SignedPermutation,
    act_orthogonal,
    cyclicity,
    is_cyclic,
    lift_distinct,
    from_partial_fractions,
    make_rational_map,
    project,
    random_orthogonal,
    relate,
)
from nahmrat.bwpairs import lift_pf, normalized_cyclicity, principal_sqrt
from nahmrat.ratmaps import PartialFractions
from nahmrat.errors import NoMatch, NotOrthogonal, NotSignRelated, NotSymmetric, RepeatedPoles, ZeroResidue


def _coeffs_from_sympy(expr, z):
    num, den = sp.fraction(sp.cancel(sp.together(expr)))
    lc = sp.Poly(den, z).LC()
    num_c = [complex(c) for c in reversed(sp.Poly(num / lc, z).all_coeffs())]
    den_c = [complex(c) for c in reversed(sp.Poly(den / lc, z).all_coeffs())]
    return num_c, den_c


def test_project_scalar():
    f = project(BWPair([[0]], [1]))
    assert np.allclose(f.numerator.coefficients, [1])
    assert np.allclose(f.denominator.coefficients, [0, 1])


def test_project_diagonal():
    f = project(BWPair(np.diag([1, -1]), [1, 1]))
    assert f.allclose(make_rational_map([0, 2], [-1, 0, 1]), 1e-14)


def test_project_offdiagonal_symbolic_oracle():
    z = sp.symbols("z")
    B = sp.Matrix([[0, 1], [1, 0]])
    W = sp.Matrix([1, 0])
    expr = (W.T * (z * sp.eye(2) - B).inv() * W)[0, 0]
    num, den = _coeffs_from_sympy(expr, z)

    f = project(BWPair([[0, 1], [1, 0]], [1, 0]))
    assert f.degree_drop == 0
    assert np.allclose(f.numerator.coefficients, num)
    assert np.allclose(f.denominator.coefficients, den)
    assert np.allclose(f.numerator.coefficients, [0, 1])
    assert np.allclose(f.denominator.coefficients, [-1, 0, 1])


def test_project_random_symmetric_against_sympy(rng):
    k = 3
    A = rng.integers(-3, 4, (k, k))
    B = A + A.T
    W = rng.integers(-2, 3, k)
    W[0] = 1
    z = sp.symbols("z")
    Bs, Ws = sp.Matrix(B.tolist()), sp.Matrix(W.tolist())
    num, den = _coeffs_from_sympy((Ws.T * (z * sp.eye(k) - Bs).adjugate() * Ws)[0, 0] / (z * sp.eye(k) - Bs).det(), z)
    pair = BWPair(B, W)
    f = project(pair)
    if f.degree_drop == 0:
        assert np.allclose(f.denominator.coefficients, den)
        assert np.allclose(f.numerator.coefficients, num)


def test_asymmetric_rejected():
    with pytest.raises(NotSymmetric):
        BWPair([[0, 1], [0, 0]], [1, 1])


@pytest.mark.parametrize(
    "B, W, expected",
    [
        (np.diag([1, -1]), [1, 1], -2),
        (np.diag([1, -1]), [1, 0], 0),
        ([[3.7]], [1], 1),
    ],
)
def test_cyclicity_examples(B, W, expected):
    assert cyclicity(BWPair(B, W)) == pytest.approx(expected, abs=1e-14)


def test_vandermonde_formula(rng):
    for _ in range(50):
        k = int(rng.integers(1, 9))
        pair = random_diagonal_pair(rng, k)
        b, W = np.diag(pair.B), pair.W
        vdm = np.prod(W) * np.prod([b[j] - b[i] for i in range(k) for j in range(i + 1, k)])
        assert abs(cyclicity(pair) - vdm) <= 1e-8 * abs(vdm)


def test_cyclic_iff_full_degree(rng):
    for _ in range(60):
        k = int(rng.integers(2, 9))
        pair = random_diagonal_pair(rng, k)
        assert is_cyclic(pair)
        assert project(pair).degree_drop == 0
        W = pair.W.copy()
        j = int(rng.integers(k))
        W[j] = 0
        cut = BWPair(pair.B, W)
        assert not is_cyclic(cut)
        g = project(cut)
        assert g.degree_drop == 1 and g.k == k - 1
        # the reduced map is what is left after removing pole j
        rest = from_partial_fractions(PartialFractions(np.delete(np.diag(pair.B), j), np.delete(pair.W, j) ** 2))
        assert g.allclose(rest, 1e-8)


def test_normalized_cyclicity_range(rng):
    pair = random_diagonal_pair(rng, 5)
    assert 0 < normalized_cyclicity(pair) <= 1
    assert normalized_cyclicity(BWPair(pair.B, np.zeros(5))) == 0


def test_repeated_eigenvalue_is_not_cyclic():
    pair = BWPair(np.diag([1.0, 1.0, 2.0]), [1, 1, 1])
    assert not is_cyclic(pair)
    f = project(pair)
    assert f.degree_drop == 1
    assert f.allclose(make_rational_map([-5, 3], [2, -3, 1]), 1e-12)  # 2/(z-1) + 1/(z-2)


def test_act_identity_and_permutation():
    pair = BWPair(np.diag([1, -1]), [1, 2])
    same = act_orthogonal(np.eye(2), pair)
    assert np.array_equal(same.B, pair.B) and np.array_equal(same.W, pair.W)
    swapped = act_orthogonal([[0, 1], [1, 0]], pair)
    assert np.allclose(swapped.B, np.diag([-1, 1]))
    assert np.allclose(swapped.W, [2, 1])


def test_act_rejects_non_orthogonal():
    pair = BWPair(np.diag([1, -1]), [1, 2])
    with pytest.raises(NotOrthogonal):
        act_orthogonal([[1, 1], [0, 1]], pair)
    with pytest.raises(NotOrthogonal):
        act_orthogonal([[1j, 0], [0, 1]], pair)


def test_equivariance(rng):
    for _ in range(40):
        k = int(rng.integers(1, 8))
        pair = random_diagonal_pair(rng, k)
        Q = random_orthogonal(k, rng)
        moved = act_orthogonal(Q, pair)
        asym = np.max(np.abs(moved.B - moved.B.T))
        assert asym <= 1e-12 * k * np.max(np.abs(moved.B))
        assert project(moved).allclose(project(pair), 1e-10)


def test_lift_examples():
    f = make_rational_map([1], [0, 1])
    p = lift_distinct(f)
    assert np.allclose(p.B, [[0]]) and np.allclose(p.W, [1])
    p = lift_distinct(make_rational_map([-1], [0, 1]))
    assert p.W[0] == pytest.approx(1j)
    p = lift_distinct(make_rational_map([0, 2], [-1, 0, 1]))
    assert relate(p, BWPair(np.diag([1, -1]), [1, 1])) is not None


def test_principal_sqrt_negative_zero_imaginary():
    assert principal_sqrt(complex(-4, -0.0)) == pytest.approx(2j)
    assert principal_sqrt(-4) == pytest.approx(2j)


def test_lift_errors():
    with pytest.raises(RepeatedPoles):
        lift_distinct(make_rational_map([1], [0, 0, 1]))
    with pytest.raises(ZeroResidue):
        lift_pf(_unchecked_pf([0, 1], [1e-14, 1]))


def _unchecked_pf(poles, residues):
    # PartialFractions refuses tiny residues itself, so bypass its checks
    pf = object.__new__(PartialFractions)
    object.__setattr__(pf, "poles", np.asarray(poles, dtype=complex))
    object.__setattr__(pf, "residues", np.asarray(residues, dtype=complex))
    object.__setattr__(pf, "delta", 1e-6)
    return pf


def _signed_perms(k):
    for perm in itertools.permutations(range(k)):
        for signs in itertools.product((1, -1), repeat=k):
            yield SignedPermutation(perm, signs)


def test_relate_exhaustive_oracle():
    p1 = BWPair(np.diag([1, -1]), [1, 1])
    p2 = BWPair(np.diag([-1, 1]), [1, -1])
    hits = [g for g in _signed_perms(2) if np.allclose(g.act(p1).B, p2.B) and np.allclose(g.act(p1).W, p2.W)]
    assert len(hits) == 1
    g = relate(p1, p2)
    assert g == hits[0]
    assert g.perm == (1, 0)
    # (g W)[perm[i]] = signs[i] W[i]: component 1 lands on position 2 with a minus
    assert g.signs == (-1, 1)
    # the same element with signs listed by target position reads (+, -)
    assert tuple(g.signs[g.perm.index(j)] for j in range(2)) == (1, -1)


def test_relate_identity(rng):
    pair = random_diagonal_pair(rng, 4)
    assert relate(pair, pair) == SignedPermutation.identity(4)


def test_relate_errors():
    p1 = BWPair(np.diag([1, -1]), [1, 1])
    with pytest.raises(NotSignRelated):
        relate(p1, BWPair(np.diag([1, -1]), [2, 1]))
    with pytest.raises(NoMatch):
        relate(p1, BWPair(np.diag([1, 2]), [1, 1]))
    with pytest.raises(NoMatch):
        relate(p1, BWPair([[0, 1], [1, 0]], [1, 1]))


def test_roundtrip_all_k(rng):
    for k in range(1, 9):
        for _ in range(10):
            pair = random_diagonal_pair(rng, k)
            f = project(pair)
            g = relate(lift_distinct(f), pair)
            assert np.allclose(g.act(lift_distinct(f)).W, pair.W, atol=1e-8)
