"""Tests for the bump calculus and the smooth step table."""

import numpy as np
import pytest
from scipy.integrate import quad

from cotrig.mollifier import (build_mollifier_table, bump, bump_derivative,
                              bump_mass)


def test_bump_values_and_support():
    assert bump(0.0)[0] == pytest.approx(np.exp(-1.0), abs=1e-15)
    assert bump(1.0)[0] == 0.0
    assert bump(-1.0)[0] == 0.0
    assert bump(2.5)[0] == 0.0
    ts = np.linspace(-0.95, 0.95, 33)
    assert np.allclose(bump(ts), bump(-ts), atol=1e-16)
    assert np.all(bump(ts) > 0.0)


def test_bump_derivative_matches_central_differences():
    # each closed-form order against a difference quotient of the one below:
    # a wrong prefactor recursion cannot survive this cascade
    ts = np.linspace(-0.85, 0.85, 19)
    h = 1e-6
    for k in range(1, 7):
        fd = (bump_derivative(k - 1, ts + h) - bump_derivative(k - 1, ts - h)) / (2 * h)
        exact = bump_derivative(k, ts)
        scale = np.abs(exact).max()
        assert np.allclose(fd, exact, atol=1e-5 * max(scale, 1.0))


def test_bump_second_derivative_closed_form():
    # psi'' = (6 t^4 - 2) / (1 - t^2)^4 * psi, worked out by hand
    ts = np.linspace(-0.9, 0.9, 25)
    d = 1.0 - ts * ts
    expected = (6.0 * ts ** 4 - 2.0) / d ** 4 * bump(ts)
    assert np.allclose(bump_derivative(2, ts), expected, atol=1e-13)


def test_bump_derivative_zero_order_and_bounds():
    ts = np.linspace(-0.9, 0.9, 11)
    assert np.allclose(bump_derivative(0, ts), bump(ts))
    with pytest.raises(ValueError):
        bump_derivative(13, ts)
    with pytest.raises(ValueError):
        bump_derivative(-1, ts)


def test_bump_mass_against_dense_trapezoid():
    ts = np.linspace(-1.0, 1.0, 200001)
    approx = np.trapezoid(bump(ts), ts)
    assert bump_mass() == pytest.approx(approx, abs=1e-9)
    assert 0.44 < bump_mass() < 0.45


def test_step_shape(table):
    us = np.linspace(-1.5, 1.5, 101)
    s = table.step(us)
    # the interpolant may overshoot the plateaus by its own accuracy
    assert np.all(np.abs(s) <= 1.0 + 1e-10)
    assert np.allclose(table.step(-us), -s, atol=1e-11)
    assert table.step(0.0)[0] == pytest.approx(0.0, abs=1e-12)
    assert table.step(1.0)[0] == 1.0
    assert table.step(-3.0)[0] == -1.0
    # strictly increasing where the slope beats the interpolation error,
    # nondecreasing up to that error in the flat tails
    core = np.linspace(-0.9, 0.9, 181)
    assert np.all(np.diff(table.step(core)) > 0.0)
    inner = np.linspace(-0.999, 0.999, 201)
    assert np.all(np.diff(table.step(inner)) > -1e-11)


def test_step_matches_direct_quadrature(table):
    for u in (-0.7, -0.2, 0.3, 0.8):
        integral, _ = quad(lambda t: bump(t)[0], -1.0, u,
                           epsabs=1e-13, epsrel=1e-12, limit=200)
        expected = -1.0 + 2.0 * integral / table.mass
        assert table.step(u)[0] == pytest.approx(expected, abs=1e-10)


def test_step_derivative_consistency(table):
    us = np.linspace(-0.9, 0.9, 41)
    d1 = table.step_derivative(1, us)
    assert np.allclose(d1, 2.0 / table.mass * bump(us), atol=1e-14)
    h = 1e-5
    fd = (table.step(us + h) - table.step(us - h)) / (2 * h)
    assert np.allclose(fd, d1, atol=1e-6)
    with pytest.raises(ValueError):
        table.step_derivative(0, us)


def test_s_norms(table):
    assert table.s_norm(0) == 1.0
    # |S'| peaks at 0 with value 2 psi(0) / mass
    assert table.s_norm(1) == pytest.approx(2.0 * np.exp(-1.0) / table.mass,
                                            rel=1e-6)
    for j in range(table.max_order):
        assert table.s_norm(j + 1) > 0.0
    # higher derivatives of the bump family grow rapidly
    assert table.s_norm(2) > table.s_norm(1)


def test_table_cache_returns_same_object(table):
    assert build_mollifier_table() is table


def test_table_validation():
    with pytest.raises(ValueError):
        build_mollifier_table(grid_size=100)
    with pytest.raises(ValueError):
        build_mollifier_table(max_order=13)


def test_table_to_dict(table):
    d = table.to_dict()
    assert d["kind"] == "mollifier_table"
    assert len(d["sup_norms"]) == table.max_order + 1
