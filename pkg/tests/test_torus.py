import numpy as np
import pytest

from spectral.errors import ConfigError, DimensionError, HypothesisViolation
from spectral.regions import RegionSpec
from spectral.torus import (TorusConfig, TorusPotential, assemble_torus, cos_sum,
                            multiplicative_perturbation, potential_from_config, torus2d_demo,
                            torus_modes, torus_volume)


def test_volume_of_full_imaginary_band():
    region = RegionSpec.rectangle(0.5, 1.5, -3.0, 3.0)
    assert torus_volume(cos_sum(), region) == pytest.approx(4 * np.pi ** 3, rel=1e-12)


def test_volume_polygon_agrees_with_rectangle():
    rect = RegionSpec.rectangle(0.5, 1.5, -3.0, 3.0)
    poly = RegionSpec.polygon(rect.vertices)
    assert torus_volume(cos_sum(), poly, resolution=20) == pytest.approx(
        torus_volume(cos_sum(), rect, resolution=20), rel=2e-3)


def test_assembly_layout():
    h, K2 = 0.2, 3
    M = assemble_torus(cos_sum(), h, K2)
    modes = torus_modes(K2)
    assert M.shape == (49, 49)
    k = 24  # mode (0, 0)
    assert tuple(modes[k]) == (0, 0)
    assert M[k, k] == 0
    j = int(np.flatnonzero((modes[:, 0] == 1) & (modes[:, 1] == 0))[0])
    assert M[j, j] == pytest.approx(h ** 2)
    assert M[j, k] == pytest.approx(0.5j)
    with pytest.raises(DimensionError):
        assemble_torus(cos_sum(), h, 13)


def test_perturbation_is_a_convolution():
    Q = multiplicative_perturbation(0.5, 3, 1.0, seed=4)
    modes = torus_modes(3)
    a = int(np.flatnonzero((modes[:, 0] == 1) & (modes[:, 1] == 1))[0])
    b = int(np.flatnonzero((modes[:, 0] == 0) & (modes[:, 1] == 1))[0])
    c = int(np.flatnonzero((modes[:, 0] == 0) & (modes[:, 1] == 0))[0])
    d = int(np.flatnonzero((modes[:, 0] == -1) & (modes[:, 1] == 0))[0])
    assert Q[a, b] == Q[c, d]
    assert np.array_equal(Q, multiplicative_perturbation(0.5, 3, 1.0, seed=4))


def test_odd_potential_is_rejected():
    region = RegionSpec.rectangle(0.5, 1.5, -0.5, 0.5)
    with pytest.raises(HypothesisViolation):
        TorusConfig(TorusPotential({(1, 0): 1.0}), region)
    with pytest.raises(ConfigError):
        potential_from_config({"name": "bessel"})


def test_demo_reports_baseline_and_counts():
    config = TorusConfig(cos_sum(), RegionSpec.rectangle(0.5, 1.5, -0.5, 0.5), h=0.3, K2=6, trials=2)
    result = torus2d_demo(config)
    assert len(result.frame) == 2
    assert result.metadata["dimension"] == 169
    assert result.metadata["baseline_count"] >= 0
    assert (result.frame["prediction"] > 0).all()


@pytest.mark.slow
def test_perturbed_torus_counts_track_the_volume():
    config = TorusConfig(cos_sum(), RegionSpec.rectangle(0.5, 1.5, -0.5, 0.5), h=0.15, K2=10, trials=10, seed=2)
    result = torus2d_demo(config)
    assert result.metadata["dimension"] == 441
    assert result.summary["median_relative_deviation"].iloc[0] <= 0.35
    assert result.frame["count"].mean() == pytest.approx(result.frame["prediction"].iloc[0], rel=0.35)
