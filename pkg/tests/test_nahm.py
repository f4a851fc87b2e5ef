import numpy as np
import pytest

from nahmrat import builtin_k1, builtin_k2, nahm_residual, residue_fit, su2_residues
from nahmrat.elliptic import ellipk, jacobi_elliptic
from nahmrat.errors import FormatError, GridOutOfRange, NoPole
from nahmrat.io import nahm_from_json, nahm_to_json
from nahmrat.nahm import K2_SIGNS, SIGMA, NahmData, commutator, residue_equation_error, tabulated

GRID = np.linspace(-0.95, 0.95, 1001)


def _commutator_2x2_by_hand(a, b):
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            out[i, j] = sum(a[i, l] * b[l, j] - b[i, l] * a[l, j] for l in range(2))
    return out


def test_trivial_representation():
    r = su2_residues(1)
    assert np.all(r.t == 0)
    assert np.array_equal(r.v, [1])
    assert r.is_trivial()


def test_spin_half():
    r = su2_residues(2)
    for i in range(3):
        assert np.allclose(r.t[i], 0.5j * SIGMA[i], atol=1e-15)
    for i, j, l in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        assert np.max(np.abs(r.t[i] + _commutator_2x2_by_hand(r.t[j], r.t[l]))) < 1e-15
    assert np.allclose(-1j * r.t3, np.diag([0.5, -0.5]))
    assert np.allclose(r.v, [1, 0])


@pytest.mark.parametrize("k", range(1, 9))
def test_spin_spectrum_and_residue_equations(k):
    r = su2_residues(k)
    assert residue_equation_error(r.t) < 1e-12
    expected = (k - 1) / 2 - np.arange(k)
    assert np.allclose(r.spectrum(), expected, atol=1e-12)
    r.check()


def test_spin_one():
    assert np.allclose(np.diag(-1j * su2_residues(3).t3), [1, 0, -1])


def test_builtin_k1_definition():
    d = builtin_k1((1, 2, 3))
    T = d(0.3)
    assert np.allclose(T[:, 0, 0], [-0.5j, -1j, -1.5j])
    assert np.all(builtin_k1((0, 0, 0))(np.array([-0.5, 0.5])) == 0)


def test_builtin_k1_residual_exactly_zero(rng):
    for c in rng.normal(size=(5, 3)):
        assert nahm_residual(builtin_k1(c), GRID) == 0.0


@pytest.mark.parametrize("m", [0.0, 0.3, 0.5, 0.7])
def test_builtin_k2_residual(m):
    assert nahm_residual(builtin_k2(m), GRID) < 1e-8


def test_builtin_k2_trigonometric_at_m0():
    d = builtin_k2(0.0)
    s = np.array([-0.4, 0.2])
    x = np.pi / 2 * (s + 1)
    T = d(s)
    f1 = np.pi / 2 / np.tan(x)
    f3 = np.pi / 2 / np.sin(x)
    assert np.allclose(T[:, 0, 0, 1], 0.5j * f1)
    assert np.allclose(T[:, 2, 0, 0], 0.5j * f3)
    assert np.allclose(T[:, 1, 0, 1], 0.5 * f3)  # dn = 1 so f2 = f3; (i/2)(-i) f2


def test_builtin_k2_reflection_matches_direct_formula():
    # the sampler evaluates the right half by reflection; compare with the
    # direct formula where cancellation is harmless
    m = 0.6
    d = builtin_k2(m)
    D = ellipk(m)
    s = np.array([0.1, 0.4, 0.8])
    sn, cn, dn = jacobi_elliptic(D * (s + 1), m)
    f = np.stack([D * cn / sn, D * dn / sn, D / sn]).T
    T = d(s)
    for i in range(3):
        assert np.allclose(T[:, i], 0.5j * f[:, i, None, None] * SIGMA[i], rtol=1e-12, atol=1e-12)


def test_k2_sign_regression():
    assert K2_SIGNS == (1.0, 1.0, 1.0)
    flipped = builtin_k2(0.3)
    base = flipped.sampler

    def sampler(s):
        T = base(s).copy()
        T[:, 1] *= -1
        return T

    wrong = NahmData(2, "tabulated", sampler, flipped.residue_minus, flipped.residue_plus)
    assert nahm_residual(wrong, GRID) > 1e-2


@pytest.mark.parametrize("m", [0.0, 0.5, 0.9])
def test_laurent_limit_at_minus_one(m):
    d = builtin_k2(m)
    s = -1 + 1e-4
    g = (1 + s) * d(s)
    assert np.max(np.abs(g - 0.5j * SIGMA)) < 1e-3


def test_corrupted_data_fails():
    d = builtin_k2(0.3)

    def sampler(s):
        T = d.sampler(s).copy()
        T[:, 2] *= 1.1
        return T

    bad = NahmData(2, "tabulated", sampler, d.residue_minus, d.residue_plus)
    assert nahm_residual(bad, GRID) > 1e-2


def test_residue_fit_both_ends():
    d = builtin_k2(0.5)
    fit = residue_fit(d, -1)
    assert np.max(np.abs(fit.t - 0.5j * SIGMA)) < 1e-6
    assert np.allclose(fit.spectrum, [0.5, -0.5], atol=1e-6)
    assert fit.irreducible
    fit = residue_fit(d, 1)
    assert fit.irreducible
    assert np.allclose(fit.spectrum, [0.5, -0.5], atol=1e-6)
    assert fit.residue_error < 1e-9
    assert np.max(np.abs(fit.t - d.residue_plus.t)) < 1e-6


def test_residue_fit_no_pole():
    with pytest.raises(NoPole):
        residue_fit(builtin_k1((1, 2, 3)), -1)


def test_grid_too_close_to_endpoint():
    with pytest.raises(GridOutOfRange):
        nahm_residual(builtin_k2(0.3), [0.0, 0.9999])
    # exactly at the margin is allowed
    nahm_residual(builtin_k2(0.3), [-0.999, 0.999])


def test_relative_residual_small_next_to_poles():
    d = builtin_k2(0.3)
    grid = np.linspace(-0.999, 0.999, 1001)
    assert nahm_residual(d, grid, relative=True) < 1e-10


def test_finite_difference_order():
    # plain central differences: halving the step divides the error by ~4
    d = builtin_k2(0.4)
    grid = np.linspace(-0.9, 0.9, 41)
    e1 = nahm_residual(d, grid, step_fraction=0.08, levels=0)
    e2 = nahm_residual(d, grid, step_fraction=0.04, levels=0)
    assert np.log2(e1 / e2) >= 1.9


def test_tabulated_roundtrip_through_json():
    d = builtin_k2(0.3)
    s = np.linspace(-0.99, 0.99, 400)
    t = nahm_from_json(nahm_to_json(d, s))
    probe = np.linspace(-0.9, 0.9, 37)
    assert np.max(np.abs(t(probe) - d(probe))) < 1e-6
    assert nahm_residual(t, probe) < 1e-4


def test_tabulated_rejects_bad_samples():
    r = su2_residues(2)
    with pytest.raises(FormatError):
        tabulated([0.0], np.zeros((1, 3, 2, 2)), r, None)
    with pytest.raises(FormatError):
        tabulated([-1.0, 0.0], np.zeros((2, 3, 2, 2)), r, None)


def test_commutator():
    a, b = SIGMA[0], SIGMA[1]
    assert np.allclose(commutator(a, b), 2j * SIGMA[2])
