import numpy as np
import pandas as pd
import pytest

from spectral.errors import ConfigError, DimensionError
from spectral.grushin import perturbation_projection, singular_pair
from spectral.operators import assemble
from spectral.random_weyl import (ExperimentConfig, chi_square_exceedance, count_in_region,
                                  effective_function_count, effective_variance, lower_bound_check,
                                  lower_bound_sample, perturbation_cutoff, run_weyl_experiment,
                                  sample_perturbation, tail_bound, truncation_order,
                                  window_parameters)
from spectral.regions import RegionSpec
from spectral.symbols import exp_ix


def test_tail_bound_values():
    assert tail_bound([1.0], 10.0) == pytest.approx(np.exp(-4.0))
    assert tail_bound([1.0, 1.0], 0.0) == 1.0
    with pytest.raises(ValueError):
        tail_bound([], 1.0)


def test_empirical_tail_stays_below_bound():
    frame = chi_square_exceedance([1.0] * 5, [5.0, 10.0, 20.0], 100000, seed=3)
    assert (frame["empirical"] <= frame["bound"]).all()
    assert frame["empirical"].is_monotonic_decreasing


def test_parameter_helpers():
    assert perturbation_cutoff(0.02, 2.0) == 100
    assert truncation_order(0.02, 2.0, 2.0) == 200
    eps, scale = window_parameters(0.01, 1e-8)
    assert eps == pytest.approx(0.01 * np.log(1e8))
    assert scale == pytest.approx(np.sqrt(eps) / 0.01)
    assert np.isnan(window_parameters(0.01, 0.0)[0])


def test_perturbation_is_reproducible_and_embeds():
    a = sample_perturbation(0.1, 2.0, seed=11)
    b = sample_perturbation(0.1, 2.0, seed=11)
    assert a.cutoff == 20
    assert a.alpha.shape == (41, 41)
    assert np.array_equal(a.alpha, b.alpha)
    assert not np.array_equal(a.alpha, sample_perturbation(0.1, 2.0, seed=12).alpha)
    Q = a.embed(25)
    assert np.array_equal(Q[5:46, 5:46], a.alpha)
    assert np.count_nonzero(Q[:5]) == 0
    with pytest.raises(DimensionError):
        a.embed(10)
    with pytest.raises(ConfigError):
        sample_perturbation(0.5, 0.4, seed=0)


def test_closed_region_counts_with_ring(weyl_region):
    ev = np.array([0.0, 1.0, 0.99 + 0.2j, 1.2, -0.5 + 0.5j])
    count, ring = count_in_region(ev, weyl_region, 0.05)
    assert (count, ring) == (4, 3)


def test_effective_variance_is_a_product_of_masses(first_order_operator):
    op = first_order_operator(0.05, 80)
    sigma2 = effective_variance(op, 0.5j, 2.0)
    assert 0.99 <= sigma2 <= 1.0 + 1e-12
    assert effective_variance(op, 0.5j, 0.1) < sigma2


def test_projected_perturbation_has_the_effective_variance(first_order_operator):
    op = first_order_operator(0.05, 80)
    data = singular_pair(op, 0.5j)
    sigma2 = effective_variance(op, 0.5j, 2.0, data=data)
    samples = np.array([perturbation_projection(sample_perturbation(0.05, 2.0, seed=s).embed(80), data)
                        for s in range(4000)])
    assert np.mean(np.abs(samples) ** 2) == pytest.approx(sigma2, rel=0.05)


def test_hilbert_schmidt_norm_concentrates():
    draws = [sample_perturbation(0.05, 2.0, seed=s) for s in range(500)]
    block = 2 * draws[0].cutoff + 1
    hs = np.array([d.hs_norm for d in draws])
    assert np.mean(hs <= 1.2 * block) >= 0.99
    assert np.mean(hs ** 2) == pytest.approx(block ** 2, rel=0.05)


def test_lower_bound_on_the_perturbed_effective_function(first_order_operator):
    op = first_order_operator(0.1, 40)
    values = lower_bound_sample(op, 0.5j, 1e-4, 20, seed=2, C1=2.0)
    assert values.shape == (20,)
    assert np.all(values > 0)
    assert np.array_equal(values, lower_bound_sample(op, 0.5j, 1e-4, 20, seed=2, C1=2.0))
    samples, verdict = lower_bound_check(op, 0.5j, 1e-4, 500, seed=2, C1=2.0)
    assert len(samples) == 500
    assert verdict["threshold"] == pytest.approx(1e-4 ** 3)
    assert verdict["holds"]
    with pytest.raises(ValueError):
        lower_bound_check(op, 0.5j, 0.0, 10, seed=2, C1=2.0)


def test_config_validation(weyl_region):
    symbol = exp_ix()
    with pytest.raises(ConfigError):
        ExperimentConfig(symbol, weyl_region, [0.1], trials=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(symbol, weyl_region, [0.1], delta_exponent=2.0)
    ExperimentConfig(symbol, weyl_region, [0.1], delta_exponent=2.0, unperturbed=True)


def test_unperturbed_baseline_counts_the_real_lattice(weyl_region):
    # hD + e^{ix} truncates to a triangular matrix with eigenvalues h k
    config = ExperimentConfig(exp_ix(), weyl_region, [0.04], trials=1, unperturbed=True)
    result = run_weyl_experiment(config)
    assert result.frame["count"].tolist() == [51]
    assert result.frame["prediction"].iloc[0] == pytest.approx(2 / (3 * 0.04), rel=1e-2)
    assert result.metadata["truncation_mismatches"] == []


def test_trials_do_not_depend_on_workers(weyl_region):
    base = dict(symbol=exp_ix(), region=weyl_region, h_list=[0.1], trials=3, seed=5)
    serial = run_weyl_experiment(ExperimentConfig(**base, workers=1)).frame
    threaded = run_weyl_experiment(ExperimentConfig(**base, workers=3)).frame
    pd.testing.assert_frame_equal(serial, threaded)
    assert serial["seed"].nunique() == 3


@pytest.mark.slow
def test_unperturbed_baseline_at_small_h(weyl_region):
    config = ExperimentConfig(exp_ix(), weyl_region, [0.01], trials=1, unperturbed=True)
    assert run_weyl_experiment(config).frame["count"].iloc[0] == 201


@pytest.mark.slow
def test_perturbed_counts_follow_weyl(weyl_region):
    config = ExperimentConfig(exp_ix(), weyl_region, [0.02], trials=20, seed=1)
    result = run_weyl_experiment(config)
    assert result.summary["median_relative_deviation"].iloc[0] <= 0.25
    baseline = run_weyl_experiment(ExperimentConfig(exp_ix(), weyl_region, [0.02], trials=1, unperturbed=True))
    prediction = 2 / (3 * 0.02)
    baseline_deviation = abs(baseline.frame["count"].iloc[0] - prediction)
    perturbed_deviation = float(np.median(np.abs(result.frame["count"] - prediction)))
    assert baseline_deviation >= 3 * perturbed_deviation


@pytest.mark.slow
def test_weyl_deviation_shrinks_with_h(weyl_region):
    coarse = run_weyl_experiment(ExperimentConfig(exp_ix(), weyl_region, [0.02, 0.01], trials=20, seed=4))
    fine = run_weyl_experiment(ExperimentConfig(exp_ix(), weyl_region, [0.005], trials=5, seed=4))
    medians = pd.concat([coarse.summary, fine.summary]).set_index("h")["median_relative_deviation"]
    assert medians.loc[0.01] <= medians.loc[0.02] + 0.02
    assert medians.loc[0.005] <= medians.loc[0.01] + 0.02


@pytest.mark.slow
def test_effective_function_winding_matches_eigenvalues():
    op = assemble(exp_ix(), 0.2, 20)
    region = RegionSpec.rectangle(-0.5, 0.5, -0.4, 0.4)
    pert = sample_perturbation(0.2, 2.0, seed=1)
    out = effective_function_count(op, region, 0.2 ** 4, pert)
    assert out["winding_count"] == out["eig_count"]
