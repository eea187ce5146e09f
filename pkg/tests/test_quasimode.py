import numpy as np
import pytest

from spectral.errors import GridMismatchError, HypothesisViolation, OutOfRangeError
from spectral.linalg import smallest_singular
from spectral.quasimode import (adjoint_quasimode, build_quasimode, cutoff, find_crossings,
                                fit_decay_rate, phase_function, residual)
from spectral.symbols import PeriodicFunction


def test_crossings_of_exponential(g_exp):
    pair = find_crossings(g_exp, 0.5j)
    assert pair.x_plus == pytest.approx(5 * np.pi / 6, abs=1e-12)
    assert pair.x_minus == pytest.approx(np.pi / 6, abs=1e-12)
    assert pair.xi_plus == pytest.approx(np.sqrt(3) / 2, abs=1e-12)
    assert pair.xi_minus == pytest.approx(-np.sqrt(3) / 2, abs=1e-12)
    assert pair.bracket_plus == pytest.approx(np.sqrt(3), rel=1e-10)
    assert pair.bracket_minus == pytest.approx(-np.sqrt(3), rel=1e-10)
    assert pair.shorter_arc == pytest.approx(2 * np.pi / 3)


@pytest.mark.parametrize("z", [1.5j, 1.0j, -1.0j])
def test_points_outside_the_open_range(g_exp, z):
    with pytest.raises(OutOfRangeError):
        find_crossings(g_exp, z)


def test_too_many_extrema():
    g = PeriodicFunction.from_callable(lambda x: np.exp(2j * x), K=4)
    with pytest.raises(HypothesisViolation):
        find_crossings(g, 0.2j)


def test_cutoff_is_flat_then_vanishes():
    d = np.array([0.0, 0.5, 0.7, 0.85, 1.0, 1.2])
    assert np.allclose(cutoff(d, 1.0), [1.0, 1.0, 1.0, 0.5, 0.0, 0.0])
    assert np.allclose(cutoff(-d, 1.0), cutoff(d, 1.0))


def test_phase_derivative_is_z_minus_g(g_exp):
    z = 0.2 + 0.5j
    x_plus = find_crossings(g_exp, z).x_plus
    d = np.array([-0.3, 0.1, 0.4])
    step = 1e-6
    deriv = (phase_function(g_exp, z, x_plus, d + step) - phase_function(g_exp, z, x_plus, d - step)) / (2 * step)
    assert np.allclose(deriv, z - g_exp(x_plus + d), atol=1e-7)
    assert phase_function(g_exp, z, x_plus, np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-14)


def test_quasimode_concentrates_at_x_plus(g_exp):
    qm = build_quasimode(g_exp, 0.5j, 0.05)
    assert qm.K == 160
    assert np.linalg.norm(qm.vector) == pytest.approx(1.0)
    assert abs(qm.peak() - 5 * np.pi / 6) <= 2 * np.pi / (2 * qm.K + 1)
    assert qm.tail_mass(qm.cutoff_radius) == 0.0
    assert qm.spread() < 0.1
    assert list(qm.to_frame().columns) == ["x", "re", "im", "abs"]


def test_adjoint_quasimode_sits_at_x_minus(g_exp):
    qm = adjoint_quasimode(g_exp, 0.5j, 0.05)
    assert abs(qm.peak() - np.pi / 6) <= 2 * np.pi / (2 * qm.K + 1)


def test_cutoff_radius_must_fit_the_arc(g_exp):
    with pytest.raises(HypothesisViolation):
        build_quasimode(g_exp, 0.5j, 0.1, cutoff_radius=np.pi / 3 + 0.1)


def test_residuals_decay_exponentially(g_exp, first_order_operator):
    hs = [0.1, 0.05, 0.025]
    residuals = []
    for h in hs:
        qm = build_quasimode(g_exp, 0.5j, h)
        residuals.append(residual(first_order_operator(h, qm.K), qm))
    assert residuals[0] > residuals[1] > residuals[2]
    fit = fit_decay_rate(hs, residuals)
    assert fit.rate > 0.05
    assert fit.r_squared > 0.9


def test_residual_grid_mismatch(g_exp, first_order_operator):
    qm = build_quasimode(g_exp, 0.5j, 0.1)
    with pytest.raises(GridMismatchError):
        residual(first_order_operator(0.1, qm.K + 1), qm)


def test_decay_fit_recovers_rate():
    hs = np.array([0.2, 0.1, 0.05])
    fit = fit_decay_rate(hs, 3.0 * np.exp(-0.4 / hs))
    assert fit.rate == pytest.approx(0.4)
    assert fit.intercept == pytest.approx(np.log(3.0))
    assert fit.r_squared == pytest.approx(1.0)


@pytest.mark.slow
def test_residual_decay_over_four_dyadic_steps(g_exp, first_order_operator):
    hs = [0.1, 0.05, 0.025, 0.0125]
    residuals = []
    for h in hs:
        qm = build_quasimode(g_exp, 0.5j, h)
        op = first_order_operator(h, qm.K)
        r = residual(op, qm)
        assert smallest_singular(op.shifted(0.5j)).s_min <= r * (1 + 1e-10)
        residuals.append(r)
    ratios = np.array(residuals[1:]) / np.array(residuals[:-1])
    assert np.all(ratios < 0.2)
    fit = fit_decay_rate(hs, residuals)
    assert fit.rate > 0
    assert fit.r_squared >= 0.95
