"""Tests for grid minimax solves and the refinement drivers."""

import numpy as np
import pytest

from cotrig.grids import Interval
from cotrig.minimax import (MinimaxProblem, best_approx, best_co_q_monotone,
                            count_alternations, solve_grid_minimax,
                            solve_problem)
from cotrig.signsets import SignChangeSet
from cotrig.trigpoly import random_trig


def test_constant_fit():
    values = np.array([0.0, 1.0, 2.0])
    columns = np.ones((3, 1))
    theta, error, info = solve_grid_minimax(values, columns)
    assert error == pytest.approx(1.0, abs=1e-10)
    assert theta[0] == pytest.approx(1.0, abs=1e-10)
    assert info["iterations"] > 0


def test_line_fit_equioscillates():
    xs = np.array([0.0, 1.0, 2.0])
    values = np.array([0.0, 0.0, 1.0])
    columns = np.column_stack([np.ones(3), xs])
    theta, error, _ = solve_grid_minimax(values, columns)
    assert error == pytest.approx(0.25, abs=1e-10)
    assert theta[0] == pytest.approx(-0.25, abs=1e-9)
    assert theta[1] == pytest.approx(0.5, abs=1e-9)


def test_nonneg_flag_pins_coefficient():
    values = np.array([-2.0, -1.0])
    columns = np.ones((2, 1))
    theta, error, _ = solve_grid_minimax(values, columns, nonneg=[True])
    assert theta[0] == pytest.approx(0.0, abs=1e-10)
    assert error == pytest.approx(2.0, abs=1e-10)


def test_constraint_row_caps_coefficient():
    values = np.array([1.0, 2.0])
    columns = np.ones((2, 1))
    theta, error, _ = solve_grid_minimax(values, columns,
                                         cons_matrix=np.array([[-1.0]]))
    assert theta[0] == pytest.approx(0.0, abs=1e-10)
    assert error == pytest.approx(2.0, abs=1e-10)


def test_tiny_amplitude_targets_keep_relative_accuracy():
    # amplitudes comparable to the nested summands: the solve must stay
    # scale-free instead of tripping absolute tolerances
    xs = np.array([0.0, 1.0, 2.0])
    amp = 1e-13
    values = amp * np.array([0.0, 0.0, 1.0])
    columns = np.column_stack([np.ones(3), xs])
    theta, error, _ = solve_grid_minimax(values, columns)
    assert error == pytest.approx(0.25 * amp, rel=1e-8)
    assert theta[0] == pytest.approx(-0.25 * amp, rel=1e-6)
    assert theta[1] == pytest.approx(0.5 * amp, rel=1e-6)


def test_zero_values_are_fit_exactly():
    theta, error, _ = solve_grid_minimax(np.zeros(4), np.ones((4, 1)))
    assert error == pytest.approx(0.0, abs=1e-14)
    assert theta[0] == pytest.approx(0.0, abs=1e-14)


def test_count_alternations_of_pure_harmonic():
    xs = np.linspace(-np.pi, np.pi, 4001)
    assert count_alternations(xs, np.cos(4 * xs), 1.0) == 9
    # order independence
    perm = np.random.default_rng(0).permutation(xs.size)
    assert count_alternations(xs[perm], np.cos(4 * xs[perm]), 1.0) == 9
    assert count_alternations(xs, np.cos(4 * xs), 0.0) == 0


def test_best_approx_reproduces_representable_target():
    res = best_approx(np.sin, 1)
    assert res.post_check_error <= 1e-10
    assert res.approximant.sin_coeffs[0] == pytest.approx(1.0, abs=1e-8)


def test_best_approx_alternation_and_post_check():
    target = random_trig(np.random.default_rng(1), 7, decay=0.25)
    res = best_approx(target, 3)
    assert res.error > 0
    assert res.post_check_error >= res.error
    assert res.post_check_error <= res.error * (1 + 1e-5)
    assert res.alternation_count >= 2 * 3 + 2


def test_best_approx_on_subinterval():
    # fitting x on a short window: much easier than on the full period
    iv = Interval(-0.5, 0.5)
    res_local = best_approx(lambda t: t, 2, domain=iv)
    res_global = best_approx(lambda t: t, 2)
    assert res_local.error < res_global.error


def test_degree_monotonicity():
    target = random_trig(np.random.default_rng(2), 8, decay=0.3)
    errors = [best_approx(target, n).post_check_error for n in (2, 4, 6)]
    assert errors[1] <= errors[0] * (1 + 1e-6) + 1e-12
    assert errors[2] <= errors[1] * (1 + 1e-6) + 1e-12


def test_constrained_solve_on_feasible_target():
    # sin is itself co-3-monotone for sign changes at -pi/2 and pi/2
    ys = SignChangeSet([-np.pi / 2, np.pi / 2])
    res = best_co_q_monotone(np.sin, 2, 3, ys)
    assert res.post_check_error <= 1e-8
    assert res.constraint_violation is not None
    assert res.constraint_violation <= 1e-10
    assert res.approximant.sin_coeffs[0] == pytest.approx(1.0, abs=1e-6)


def test_constrained_never_beats_unconstrained():
    ys = SignChangeSet([-np.pi / 2, 0.0])
    rng = np.random.default_rng(9)
    for _ in range(6):
        target = random_trig(rng, 6, decay=0.2)
        unc = best_approx(target, 3)
        con = best_co_q_monotone(target, 3, 3, ys)
        assert con.post_check_error >= unc.post_check_error - 1e-9 * max(
            1.0, unc.post_check_error)


def test_constrained_q_validation():
    with pytest.raises(ValueError):
        best_co_q_monotone(np.sin, 2, 0, SignChangeSet([-1.0, 0.0]))


def test_solve_problem_dispatch():
    prob = MinimaxProblem(degree=2)
    assert not prob.constrained
    res = solve_problem(np.cos, prob)
    assert res.post_check_error <= 1e-10
    ys = SignChangeSet([-np.pi / 2, np.pi / 2])
    prob_c = MinimaxProblem(degree=2, q=3, sign_changes=ys)
    assert prob_c.constrained
    res_c = solve_problem(np.sin, prob_c)
    assert res_c.constraint_violation is not None


def test_result_serialization():
    res = best_approx(np.sin, 1)
    d = res.to_dict()
    assert d["approximant"]["kind"] == "trigpoly"
    assert "post_check_error" in d and "rounds" in d
