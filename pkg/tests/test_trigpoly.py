"""Tests for the trigonometric polynomial coefficient calculus."""

import numpy as np
import pytest

from cotrig.trigpoly import (TrigPoly, coeffs_from_vector, random_trig,
                             trig_basis, trig_derivative_basis)


def test_evaluation_matches_closed_forms():
    ts = np.linspace(-np.pi, np.pi, 41)
    assert np.allclose(TrigPoly(0.0, [], [1.0])(ts), np.sin(ts))
    assert np.allclose(TrigPoly(0.0, [0.0, 1.0])(ts), np.cos(2 * ts))
    assert TrigPoly(3.5)(0.7) == 3.5


def test_scalar_call_returns_float():
    p = TrigPoly(1.0, [2.0], [0.5])
    out = p(0.3)
    assert isinstance(out, float)
    assert out == pytest.approx(1.0 + 2.0 * np.cos(0.3) + 0.5 * np.sin(0.3))


def test_periodicity():
    rng = np.random.default_rng(3)
    p = random_trig(rng, 5)
    ts = np.linspace(0, 1, 7)
    assert np.allclose(p(ts), p(ts + 2 * np.pi), atol=1e-12)


def test_mixed_length_coefficients_pad():
    p = TrigPoly(0.0, [1.0], [0.0, 2.0])
    assert p.degree == 2
    assert p.cos_coeffs.tolist() == [1.0, 0.0]
    assert p.sin_coeffs.tolist() == [0.0, 2.0]


def test_derivative_coefficients_exact():
    # (cos t)' = -sin t; (sin 2t)' = 2 cos 2t
    p = TrigPoly(4.0, [1.0, 0.0], [0.0, 1.0])
    d = p.derivative()
    assert d.a0 == 0.0
    assert d.cos_coeffs.tolist() == [0.0, 2.0]
    assert d.sin_coeffs.tolist() == [-1.0, 0.0]


def test_fourth_derivative_is_identity_at_degree_one():
    p = TrigPoly(0.0, [0.7], [-0.3])
    d4 = p.derivative(4)
    assert np.allclose(d4.cos_coeffs, p.cos_coeffs)
    assert np.allclose(d4.sin_coeffs, p.sin_coeffs)


def test_derivative_order_validation():
    with pytest.raises(ValueError):
        TrigPoly(0.0, [1.0]).derivative(-1)
    q = TrigPoly(2.0, [1.0]).derivative(0)
    assert q.a0 == 2.0


def test_even_odd_split():
    p = TrigPoly(1.0, [2.0], [3.0])
    even, odd = p.even_odd_split()
    ts = np.linspace(-2, 2, 9)
    assert np.allclose(even(ts) + odd(ts), p(ts))
    assert np.allclose(even(-ts), even(ts))
    assert np.allclose(odd(-ts), -odd(ts))


def test_shifted_translates_argument():
    rng = np.random.default_rng(11)
    p = random_trig(rng, 4)
    q = p.shifted(0.9)
    ts = np.linspace(-3, 3, 25)
    assert np.allclose(q(ts), p(ts - 0.9), atol=1e-12)


def test_arithmetic():
    p = TrigPoly(1.0, [1.0], [0.0])
    q = TrigPoly(0.5, [0.0, 2.0], [1.0])
    ts = np.linspace(0, 2, 9)
    assert np.allclose((p + q)(ts), p(ts) + q(ts))
    assert np.allclose((p - q)(ts), p(ts) - q(ts))
    assert np.allclose((3.0 * p)(ts), 3.0 * p(ts))
    assert np.allclose((p + 2.0)(ts), p(ts) + 2.0)


def test_sup_norm_of_cosine():
    assert TrigPoly(0.0, [1.0]).sup_norm() == pytest.approx(1.0, abs=1e-11)


def test_trig_basis_columns():
    ts = np.array([0.0, 0.5])
    B = trig_basis(ts, 2)
    assert B.shape == (2, 5)
    assert np.allclose(B[:, 0], 1.0)
    assert np.allclose(B[:, 1], np.cos(ts))
    assert np.allclose(B[:, 2], np.cos(2 * ts))
    assert np.allclose(B[:, 3], np.sin(ts))
    assert np.allclose(B[:, 4], np.sin(2 * ts))
    B0 = trig_basis(ts, 0)
    assert B0.shape == (2, 1)


def test_trig_derivative_basis_matches_exact_derivative():
    ts = np.linspace(-1, 1, 13)
    rng = np.random.default_rng(7)
    for order in (0, 1, 2, 3):
        D = trig_derivative_basis(ts, 3, order)
        theta = rng.standard_normal(7)
        p = coeffs_from_vector(theta, 3)
        assert np.allclose(D @ theta, p.derivative(order)(ts), atol=1e-10)


def test_coeffs_from_vector_layout():
    p = coeffs_from_vector(np.array([1.0, 2.0, 3.0, 4.0, 5.0]), 2)
    assert p.a0 == 1.0
    assert p.cos_coeffs.tolist() == [2.0, 3.0]
    assert p.sin_coeffs.tolist() == [4.0, 5.0]


def test_random_trig_odd_and_deterministic():
    p = random_trig(np.random.default_rng(5), 6, odd=True)
    q = random_trig(np.random.default_rng(5), 6, odd=True)
    assert p.a0 == 0.0
    assert np.all(p.cos_coeffs == 0.0)
    assert np.array_equal(p.sin_coeffs, q.sin_coeffs)
    ts = np.linspace(0.1, 1.0, 5)
    assert np.allclose(p(-ts), -p(ts))


def test_random_trig_decay_shrinks_high_modes():
    p = random_trig(np.random.default_rng(0), 40, decay=0.5)
    assert np.abs(p.sin_coeffs[-5:]).max() < 1e-6


def test_round_trip_dict():
    p = TrigPoly(0.25, [1.0, -2.0], [0.5, 0.0])
    q = TrigPoly.from_dict(p.to_dict())
    ts = np.linspace(-1, 1, 9)
    assert np.allclose(p(ts), q(ts))
    assert p.to_dict()["kind"] == "trigpoly"
