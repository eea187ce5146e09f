import numpy as np
import pytest

from spectral.errors import RefinementLimitError, ZeroNearContourError
from spectral.regions import RegionSpec
from spectral.zero_count import (ContourSpec, HolomorphicSampler, argument_count, boundary_flux,
                                 delta_phi_mass, hager_verify, jensen_bound, lattice_product)


def test_argument_principle_counts_zeros():
    sampler = HolomorphicSampler(lambda z: (z - 0.3) * (z + 0.4j) * np.exp(1j * z))
    report = argument_count(sampler, ContourSpec.circle(0.0, 1.0, 64))
    assert report.count == 2
    assert report.winding_total == pytest.approx(2.0, abs=1e-9)


def test_polygon_contour_with_refinement():
    sampler = HolomorphicSampler(lambda z: z ** 7)
    report = argument_count(sampler, ContourSpec.polygon([1, 1j, -1, -1j]))
    assert report.count == 7
    assert report.refinement_used >= 1


def test_zero_on_the_contour():
    with pytest.raises(ZeroNearContourError):
        argument_count(HolomorphicSampler(lambda z: z - 1.0), ContourSpec.circle(0.0, 1.0, 16))


def test_refinement_limit():
    contour = ContourSpec.circle(0.0, 1.0, 3, refinement_limit=0)
    with pytest.raises(RefinementLimitError):
        argument_count(HolomorphicSampler(lambda z: z ** 5), contour)


def test_contour_validation():
    with pytest.raises(ValueError):
        ContourSpec.polygon([0, 1, 1, 1j])
    with pytest.raises(ValueError):
        ContourSpec.circle(0.0, -1.0)


def test_jensen_bound_for_a_triple_zero():
    bound = jensen_bound(lambda z: (z - 0.5) ** 3, 0.0, 1.0, 2.0)
    assert bound == pytest.approx(np.log(125.0) / np.log(2.0), rel=1e-6)
    assert bound >= 3
    with pytest.raises(ZeroNearContourError):
        jensen_bound(lambda z: z, 0.0, 1.0, 2.0)
    with pytest.raises(ValueError):
        jensen_bound(lambda z: 1.0, 0.0, 2.0, 1.0)


def test_holomorphy_check():
    assert HolomorphicSampler(np.exp).check_holomorphy(0.0, 1.0)
    assert not HolomorphicSampler(np.conj).check_holomorphy(0.0, 1.0)


def test_flux_and_mass_of_quadratic_weight(unit_square):
    phi = lambda z: 0.5 * np.abs(z) ** 2  # noqa: E731
    assert boundary_flux(phi, unit_square, 1e-3) == pytest.approx(2.0, rel=1e-6)
    assert delta_phi_mass(phi, unit_square) == pytest.approx(2.0, rel=1e-6)


def test_lattice_zero_count_against_subharmonic_mass(unit_square):
    h = 0.01
    window = RegionSpec.rectangle(-0.5, 1.5, -0.5, 1.5)
    sampler, zeros = lattice_product(h, window)
    inside = int(np.sum(unit_square.contains(zeros)))
    report = hager_verify(sampler, lambda z: 0.5 * np.abs(z) ** 2, unit_square, h, h)
    assert report.count == inside == 36
    assert report.weyl_compare["mass"] == pytest.approx(2.0 / (2 * np.pi * h), rel=1e-6)
    assert report.weyl_compare["bound"] == pytest.approx(50.0)
    assert "deviation" not in report.flags
    assert "coverage" not in report.flags
    assert list(report.to_frame().columns) == ["count", "winding", "mass", "bound", "deviation", "flags"]


@pytest.mark.parametrize("power", [3, 7, 9])
def test_coarse_circle_resolves_large_phase_turns(power):
    # each of the four arcs turns the phase by power * pi / 2
    report = argument_count(HolomorphicSampler(lambda z: z ** power), ContourSpec.circle(0.0, 1.0, 4))
    assert report.count == power


@pytest.mark.parametrize("h", [0.04, 0.02, 0.01])
def test_lattice_counts_stay_within_the_calibrated_bound(unit_square, h):
    window = RegionSpec.rectangle(-0.5, 1.5, -0.5, 1.5)
    sampler, zeros = lattice_product(h, window)
    report = hager_verify(sampler, lambda z: 0.5 * np.abs(z) ** 2, unit_square, h, h)
    assert report.count == int(np.sum(unit_square.contains(zeros)))
    assert report.weyl_compare["deviation"] <= report.weyl_compare["bound"]
    assert "deviation" not in report.flags


def test_zero_free_exponential_factor_leaves_the_count(unit_square):
    sampler, _ = lattice_product(0.02, RegionSpec.rectangle(-0.5, 1.5, -0.5, 1.5))
    scaled = HolomorphicSampler(log_func=lambda z: sampler.log_value(z) + 2.0 * z ** 2 - 3j * z)
    contour = ContourSpec.from_region(unit_square, 0.05)
    assert argument_count(scaled, contour).count == argument_count(sampler, contour).count


def test_contour_refinement_leaves_the_count(unit_square):
    sampler, zeros = lattice_product(0.02, RegionSpec.rectangle(-0.5, 1.5, -0.5, 1.5))
    inside = int(np.sum(unit_square.contains(zeros)))
    for spacing in (0.2, 0.1, 0.05, 0.025):
        assert argument_count(sampler, ContourSpec.from_region(unit_square, spacing)).count == inside
