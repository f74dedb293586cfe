import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polydist.errors import InvalidInput, SingularLeadingCoefficient
from polydist.matpoly import MatrixPolynomial, WeightSet, is_weakly_normal, phi

from .oracles import central_difference, poly_eval


def test_evaluate_quad(quad):
    np.testing.assert_allclose(quad.evaluate(3), np.diag([2, 6, 20]), atol=1e-14)
    np.testing.assert_allclose(quad.evaluate(1), np.diag([0, 0, 6]), atol=1e-14)
    np.testing.assert_array_equal(quad.evaluate(0), quad.coeffs[0])


def test_evaluate_matches_power_sum():
    rng = np.random.default_rng(3)
    coeffs = [rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)) for _ in range(4)]
    P = MatrixPolynomial(coeffs)
    z = 0.7 - 1.3j
    np.testing.assert_allclose(P.evaluate(z), poly_eval(coeffs, z), rtol=1e-13)


def test_derivative_quad(quad):
    d = quad.derivative()
    assert d.m == 1
    np.testing.assert_array_equal(d.coeffs[1], 2 * np.eye(3))
    np.testing.assert_array_equal(d.coeffs[0], np.diag([-3, -1, 3]))
    np.testing.assert_allclose(d.evaluate(3), np.diag([3, 5, 9]))


def test_derivative_of_linear_is_constant():
    A1 = np.array([[1, 2], [0, 3]], dtype=complex)
    P = MatrixPolynomial([np.eye(2), A1])
    d = P.derivative()
    assert d.m == 0
    np.testing.assert_array_equal(d.coeffs[0], A1)
    with pytest.raises(InvalidInput):
        d.derivative()


def test_derivative_matches_finite_difference(quad):
    z, h = 3.0, 1e-6
    fd = central_difference(quad.evaluate, z, h)
    exact = quad.derivative().evaluate(z)
    assert np.linalg.norm(fd - exact) <= 1e-8 * np.linalg.norm(exact)


def test_rejects_bad_coefficients():
    with pytest.raises(InvalidInput):
        MatrixPolynomial([np.eye(2), np.eye(3)])
    with pytest.raises(InvalidInput):
        MatrixPolynomial([np.ones((2, 3))])
    with pytest.raises(SingularLeadingCoefficient):
        MatrixPolynomial([np.eye(2), np.diag([1.0, 0.0])])
    with pytest.raises(InvalidInput):
        MatrixPolynomial([np.eye(2), np.array([[np.nan, 0], [0, 1]])])


def test_coefficients_are_read_only(quad):
    with pytest.raises(ValueError):
        quad.coeffs[0][0, 0] = 5


def test_weight_values():
    w = WeightSet((1, 1, 1))
    assert w.value(3) == 13
    assert w.slope(3) == 7
    w2 = WeightSet((2, 0, 0))
    assert w2.value(5) == 2 and w2.slope(5) == 0
    w3 = WeightSet((0.5, 0.25, 4))
    assert w3.value(0) == 0.5 and w3.slope(0) == 0.25
    with pytest.raises(InvalidInput):
        w.value(-1)


@pytest.mark.parametrize("weights", [(), (0, 1), (1, -1), (1, float("inf"))])
def test_weight_validation(weights):
    with pytest.raises(InvalidInput):
        WeightSet(weights)


def test_phi_values():
    w = WeightSet((1, 1, 1))
    assert phi(w, 3) == pytest.approx(7 / 13, abs=1e-15)
    assert phi(w, 0) == 0
    assert phi(w, 3j) == pytest.approx(7 / 13 * -1j, abs=1e-15)


weights_st = st.lists(st.floats(0, 10), min_size=1, max_size=5).map(
    lambda ws: tuple([ws[0] + 0.1] + ws[1:])
)


@given(weights_st, st.floats(0, 50), st.floats(0, 50))
def test_weight_value_monotone(ws, a, b):
    w = WeightSet(ws)
    lo, hi = sorted((a, b))
    assert w.value(lo) <= w.value(hi) * (1 + 1e-12)


@given(weights_st, st.floats(0.01, 20), st.floats(-cmath.pi, cmath.pi))
@settings(max_examples=50)
def test_phi_modulus(ws, r, theta):
    w = WeightSet(ws)
    mu = cmath.rect(r, theta)
    expected = w.slope(r) / w.value(r)
    assert abs(phi(w, mu)) == pytest.approx(expected, rel=1e-12, abs=1e-300)


def test_weakly_normal(quad):
    assert is_weakly_normal(quad).weakly_normal
    nilpotent = MatrixPolynomial([np.array([[0, 1], [0, 0]]), np.eye(2)])
    rep = is_weakly_normal(nilpotent)
    assert not rep.weakly_normal
    assert rep.worst_residual > 0.1
    rng = np.random.default_rng(0)
    diag = MatrixPolynomial([np.diag(rng.standard_normal(4) + 1j) for _ in range(4)])
    assert is_weakly_normal(diag).weakly_normal


def test_weakly_normal_unitary_similarity():
    from polydist.sampling import random_normal_polynomial

    P, _, _ = random_normal_polynomial(np.random.default_rng(5), 4, 3)
    assert is_weakly_normal(P).weakly_normal
