import numpy as np
import pytest

from spectral.errors import ConfigError, HypothesisViolation, NumericalError, VolumeCutoffError
from spectral.symbols import (PeriodicFunction, Symbol1D, bracket, eval_symbol, exp_ix,
                              periodic_from_config, symbol_from_config, weyl_volume)


def test_fourier_coefficients_of_exponential(g_exp):
    n = np.arange(-4, 5)
    expected = (n == 1).astype(complex)
    assert np.allclose(g_exp.coefficient(n), expected, atol=1e-14)
    assert g_exp.coefficient(np.array([7]))[0] == 0
    assert g_exp.bandwidth() == 1
    assert g_exp.roundtrip_error() < 1e-12


def test_interpolation_and_derivative_between_nodes(g_exp):
    x = np.array([0.3, 1.7, 4.1])
    assert np.allclose(g_exp(x), np.exp(1j * x), atol=1e-13)
    assert np.allclose(g_exp.derivative(x), 1j * np.exp(1j * x), atol=1e-13)
    assert np.allclose(g_exp.derivative(x, order=2), -np.exp(1j * x), atol=1e-12)


def test_even_grid_is_rejected():
    with pytest.raises(ConfigError):
        PeriodicFunction.from_values(np.ones(4))


def test_resample_below_bandwidth_fails(g_exp):
    assert g_exp.resample(2).grid_size == 5
    with pytest.raises(NumericalError):
        PeriodicFunction.from_callable(lambda x: np.cos(3 * x), K=4).resample(2)


def test_vanishing_leading_coefficient_is_not_elliptic(g_exp):
    with pytest.raises(HypothesisViolation):
        Symbol1D([g_exp, PeriodicFunction.constant(0.0, g_exp.order)])


def test_eval_symbol(exp_symbol):
    assert eval_symbol(exp_symbol, 0.0, 2.0) == pytest.approx(3.0)
    assert eval_symbol(exp_symbol, np.pi / 2, 0.0) == pytest.approx(1j)


def test_bracket_sign_at_the_two_crossings(exp_symbol):
    assert bracket(exp_symbol, 5 * np.pi / 6, np.sqrt(3) / 2) == pytest.approx(np.sqrt(3), rel=1e-10)
    assert bracket(exp_symbol, np.pi / 6, -np.sqrt(3) / 2) == pytest.approx(-np.sqrt(3), rel=1e-10)


def test_weyl_volume_of_exponential_symbol(exp_symbol, weyl_region):
    assert weyl_volume(exp_symbol, weyl_region) == pytest.approx(4 * np.pi / 3, rel=1e-2)


def test_weyl_volume_cutoff_too_small(exp_symbol, weyl_region):
    with pytest.raises(VolumeCutoffError):
        weyl_volume(exp_symbol, weyl_region, xi_cut=0.5)


def test_symbol_config_roundtrip_keeps_coefficients(exp_symbol):
    rebuilt = symbol_from_config(exp_symbol.to_config())
    assert rebuilt.order == 1
    assert np.allclose(rebuilt.coeffs[0].fourier, exp_symbol.coeffs[0].fourier, atol=1e-14)


def test_unknown_builtin_names_the_key():
    with pytest.raises(ConfigError) as info:
        symbol_from_config({"name": "airy"})
    assert info.value.key_path == "symbol.name"


def test_builtin_parameters_pass_through():
    g = periodic_from_config({"name": "exp_ix", "amplitude": 0.5, "offset": 0.25})
    assert g(np.array([0.0]))[0] == pytest.approx(0.75)


def test_combination_cancels_to_order_zero(exp_symbol):
    diff = exp_symbol.combine(exp_ix(), 1.0, -1.0)
    assert diff.order == 0
    assert np.max(np.abs(diff.coeffs[0].values)) < 1e-14


def test_significant_coefficient_drops_roundoff(g_exp):
    n = np.arange(-4, 5)
    raw = g_exp.coefficient(n)
    clean = g_exp.significant_coefficient(n)
    assert np.count_nonzero(clean) == 1
    assert clean[n == 1][0] == raw[n == 1][0] == pytest.approx(1.0)
    assert np.max(np.abs(raw[n != 1])) <= 1e-13
