import numpy as np
import pytest
import sympy as sp
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from nahmrat import (
    PartialFractions,
    RationalMap,
    evaluate,
    from_partial_fractions,
    is_in_rat0,
    make_rational_map,
    poles_and_residues,
)
from nahmrat.errors import DegreeError, NotCoprime, PoleHit, RepeatedPoles, ZeroResidue
from nahmrat.ratmaps import Polynomial, pole_threshold


def test_one_over_z():
    f = make_rational_map([1], [0, 1])
    assert f.k == 1
    assert evaluate(f, 2.0) == pytest.approx(0.5)
    pf = poles_and_residues(f)
    assert pf.poles[0] == pytest.approx(0)
    assert pf.residues[0] == pytest.approx(1)


def test_two_z_over_z2_minus_one():
    f = make_rational_map([0, 2], [-1, 0, 1])
    pf = poles_and_residues(f)
    order = np.argsort(pf.poles.real)
    assert np.allclose(pf.poles[order], [-1, 1])
    assert np.allclose(pf.residues[order], [1, 1])


def test_denominator_made_monic():
    f = make_rational_map([2], [0, 2])
    assert np.allclose(f.numerator.coefficients, [1])
    assert np.allclose(f.denominator.coefficients, [0, 1])


def test_from_partial_fractions_sympy_oracle():
    z = sp.symbols("z")
    expr = sp.together(1 / (z - 0) - 1 / (z - 1))
    num, den = sp.fraction(sp.cancel(expr))
    lc = sp.Poly(den, z).LC()
    num_c = [complex(c) for c in reversed(sp.Poly(num / lc, z).all_coeffs())]
    den_c = [complex(c) for c in reversed(sp.Poly(den / lc, z).all_coeffs())]

    f = from_partial_fractions(PartialFractions([0, 1], [1, -1]))
    assert np.allclose(f.numerator.coefficients, num_c)
    assert np.allclose(f.denominator.coefficients, den_c)
    assert np.allclose(f.denominator.coefficients, [0, -1, 1])
    assert np.allclose(f.numerator.coefficients, [-1])


@pytest.mark.parametrize(
    "num, den",
    [([1, 0, 1], [0, 1]), ([1], [5]), ([0, 0, 1], [1, 0, 1])],
)
def test_degree_error(num, den):
    with pytest.raises(DegreeError):
        make_rational_map(num, den)


def test_common_factor_detected():
    with pytest.raises(NotCoprime) as info:
        make_rational_map([-1, 1], [0, 0, -1, 1])  # (z-1) / (z^2 (z-1))
    assert info.value.common_root == pytest.approx(1, abs=1e-6)


def test_pole_hit():
    f = make_rational_map([1], [-1, 0, 1])
    with pytest.raises(PoleHit):
        evaluate(f, 1.0)


def test_repeated_poles():
    f = make_rational_map([1], [0, 0, 1])
    with pytest.raises(RepeatedPoles):
        poles_and_residues(f)
    assert not is_in_rat0(f)


def test_zero_residue_rejected():
    with pytest.raises(ZeroResidue):
        PartialFractions([0, 1], [1, 0])


def test_evaluate_far_from_origin():
    # f ~ sum(r)/z for large z; the reversed evaluation stays accurate there
    f = from_partial_fractions(PartialFractions([1, -2, 3j], [1, 2, -0.5]))
    z = 1e8 + 1e8j
    assert abs(evaluate(f, z) * z - 2.5) < 1e-7


def test_pole_threshold_absolute_for_small_sets():
    assert pole_threshold(np.array([0, 0.1])) == pytest.approx(1e-6)
    assert pole_threshold(np.array([0, 10])) == pytest.approx(1e-5)


def test_polynomial_basics():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert Polynomial([0]).degree == -1
    assert p(3) == 7
    assert np.allclose(Polynomial([-2, 0, 1]).roots()**2, [2, 2])


complex_box = st.builds(
    complex,
    st.floats(-3, 3, allow_nan=False),
    st.floats(-3, 3, allow_nan=False),
)


@st.composite
def configurations(draw):
    k = draw(st.integers(1, 6))
    poles = draw(st.lists(complex_box, min_size=k, max_size=k))
    poles = np.array(poles)
    if k > 1:
        sep = np.min(np.abs(poles[:, None] - poles[None, :]) + 10 * np.eye(k))
        assume(sep > 0.3)
    mags = draw(st.lists(st.floats(0.3, 2.0), min_size=k, max_size=k))
    phases = draw(st.lists(st.floats(0, 2 * np.pi), min_size=k, max_size=k))
    residues = np.array(mags) * np.exp(1j * np.array(phases))
    return poles, residues


@settings(max_examples=150, deadline=None)
@given(configurations())
def test_partial_fraction_roundtrip(cfg):
    poles, residues = cfg
    f = from_partial_fractions(PartialFractions(poles, residues))
    pf = poles_and_residues(f)
    # match recovered poles to the originals
    idx = [int(np.argmin(np.abs(pf.poles - b))) for b in poles]
    assert sorted(idx) == list(range(len(poles)))
    assert np.allclose(pf.poles[idx], poles, atol=1e-8)
    assert np.allclose(pf.residues[idx], residues, atol=1e-8)
    assert from_partial_fractions(pf).allclose(f, 1e-8)


@settings(max_examples=100, deadline=None)
@given(configurations())
def test_residue_sum_is_leading_numerator_coefficient(cfg):
    poles, residues = cfg
    f = from_partial_fractions(PartialFractions(poles, residues))
    k = f.k
    coeffs = np.concatenate([f.numerator.coefficients, np.zeros(k)])
    assert abs(coeffs[k - 1] - residues.sum()) < 1e-9 * max(1, np.abs(residues).sum())


def test_rational_map_rejects_nonmonic():
    with pytest.raises(DegreeError):
        RationalMap(1, Polynomial([1]), Polynomial([0, 2]))
