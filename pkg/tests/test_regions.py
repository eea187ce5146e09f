import numpy as np
import pytest

from spectral.errors import ConfigError
from spectral.regions import RegionSpec, winding_numbers


def test_rectangle_is_closed(unit_square):
    pts = np.array([0.5 + 0.5j, 0.0, 1.0 + 1.0j, 0.5, 1.0001 + 0.5j, -0.1j])
    assert list(unit_square.contains(pts)) == [True, True, True, True, False, False]


def test_rectangle_needs_ordered_bounds():
    with pytest.raises(ConfigError):
        RegionSpec.rectangle(1.0, 0.0, 0.0, 1.0)


def test_clockwise_polygon_is_reoriented():
    region = RegionSpec.polygon([0, 1j, 1 + 1j, 1])
    assert region.area == pytest.approx(1.0)
    assert winding_numbers(region.vertices, np.array([0.5 + 0.5j]))[0] == 1


def test_bowtie_is_rejected():
    with pytest.raises(ConfigError, match="self-intersecting"):
        RegionSpec.polygon([0, 2 + 2j, 2, 1j])


def test_collinear_polygon_is_rejected():
    with pytest.raises(ConfigError, match="empty interior"):
        RegionSpec.polygon([0, 1, 2])


def test_triangle_membership_includes_edges():
    tri = RegionSpec.polygon([0, 2, 1j])
    assert tri.contains(np.array([0.5 + 0.25j]))[0]
    assert tri.contains(np.array([1.0]))[0]
    assert not tri.contains(np.array([1.5 + 0.5j]))[0]


def test_distance_to_boundary(unit_square):
    d = unit_square.distance_to_boundary(np.array([0.5 + 0.5j, 0.1 + 0.5j, 2.0 + 0.5j]))
    assert np.allclose(d, [0.5, 0.1, 1.0])


def test_boundary_points_spacing(unit_square):
    pts = unit_square.boundary_points(0.25)
    assert len(pts) == 16
    gaps = np.abs(np.diff(np.append(pts, pts[0])))
    assert gaps.max() <= 0.25 + 1e-12


def test_config_roundtrip_and_unknown_kind():
    region = RegionSpec.from_config({"kind": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]],
                                     "boundary_tolerance": 0.01})
    again = RegionSpec.from_config(region.to_config())
    assert np.allclose(again.vertices, region.vertices)
    assert again.boundary_tolerance == 0.01
    with pytest.raises(ConfigError):
        RegionSpec.from_config({"kind": "disk"})
