import numpy as np
import pytest

from spectral.linalg import smallest_singular
from spectral.pseudospectrum import (GridSpec, PseudospecField, components_without_eigenvalues,
                                     instability_witness, level_contours, scan)


def test_normal_matrix_field_is_distance_to_spectrum():
    grid = GridSpec(-1.0, 2.0, -1.0, 1.0, 4, 3)
    field_ = scan(np.diag([0.0, 1.0]).astype(complex), grid)
    nodes = grid.nodes
    expected = np.minimum(np.abs(nodes), np.abs(nodes - 1.0))
    assert np.allclose(field_.values, expected, atol=1e-12)
    assert field_.failed_nodes == ()
    assert list(field_.to_frame().columns) == ["re", "im", "smin"]


def test_scan_is_independent_of_workers(ladder_operator):
    grid = GridSpec(-1.0, 1.0, -0.5, 0.5, 5, 4)
    serial = scan(ladder_operator, grid).values
    threaded = scan(ladder_operator, grid, workers=3).values
    assert np.array_equal(serial, threaded)


def test_failed_nodes_become_nan():
    grid = GridSpec(0.0, 1.0, 0.0, 1.0, 2, 2)
    bad = np.array([[np.inf, 0], [0, 1]], dtype=complex)
    field_ = scan(bad, grid)
    assert np.isnan(field_.values).all()
    assert field_.failed_nodes == (0, 1, 2, 3)


def test_contour_of_a_point_spectrum_is_a_closed_circle():
    grid = GridSpec(-1.0, 1.0, -1.0, 1.0, 41, 41)
    field_ = scan(np.zeros((1, 1), dtype=complex), grid)
    lines = level_contours(field_, [0.5])[0.5]
    assert len(lines) == 1
    loop = lines[0]
    assert loop[0] == pytest.approx(loop[-1])
    assert np.allclose(np.abs(loop), 0.5, atol=5e-3)


def test_witness_moves_an_eigenvalue_onto_z(ladder_operator):
    z = 0.25 + 0.3j
    Q, norm = instability_witness(ladder_operator, z)
    assert norm == pytest.approx(smallest_singular(ladder_operator.shifted(z)).s_min, rel=1e-10)
    assert np.linalg.norm(Q, 2) == pytest.approx(norm, rel=1e-10)
    perturbed = ladder_operator.matrix + Q - z * np.eye(ladder_operator.dimension)
    assert smallest_singular(perturbed).s_min < 1e-10


def test_witness_at_an_eigenvalue_is_zero(ladder_operator):
    Q, norm = instability_witness(ladder_operator, 0.5)
    assert norm == 0.0
    assert not Q.any()


def test_component_without_eigenvalue_is_reported():
    grid = GridSpec(0.0, 4.0, 0.0, 4.0, 5, 5)
    values = np.ones((5, 5))
    values[2, 2] = 0.01
    field_ = PseudospecField(grid, values)
    assert components_without_eigenvalues(field_, [], 0.1) == [1]
    assert components_without_eigenvalues(field_, [2.0 + 2.0j], 0.1) == []


def test_witness_on_random_matrices():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(3, 9))
        P = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        z = complex(rng.standard_normal(), rng.standard_normal())
        Q, norm = instability_witness(P, z)
        assert np.linalg.norm(Q, 2) == pytest.approx(smallest_singular(P - z * np.eye(n)).s_min, rel=1e-10)
        assert smallest_singular(P + Q - z * np.eye(n)).s_min <= 1e-10 * np.linalg.norm(P)
