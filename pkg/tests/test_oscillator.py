import numpy as np
import pytest

from spectral import oscillator
from spectral.errors import NumericalError, TruncationError
from spectral.linalg import eig
from spectral.oscillator import (boundary_curve, boundary_growth, build_rotated_oscillator, contrast_ratio,
                                 ladder_matrices, rescaling_check, resolvent_norm, resolvent_scan)


def test_hermite_compressions():
    op = build_rotated_oscillator(8)
    assert np.allclose(np.diag(op.matY2), np.arange(8) + 0.5)
    assert np.allclose(op.matY2 + op.kinetic, np.diag(2 * np.arange(8) + 1.0))
    assert op.matY2[0, 2] == pytest.approx(np.sqrt(2) / 2)
    assert op.kinetic[0, 2] == pytest.approx(-np.sqrt(2) / 2)
    a, ad = ladder_matrices(8)
    assert np.allclose((ad @ a).diagonal(), np.arange(8))


def test_low_eigenvalues_lie_on_the_rotated_ray():
    op = build_rotated_oscillator(64)
    values = eig(op.matQ).eigenvalues
    low = values[np.argsort(np.abs(values))][:3]
    assert np.allclose(low, np.exp(1j * np.pi / 4) * np.array([1, 3, 5]), atol=1e-6)


def test_boundary_curve():
    assert boundary_curve(np.e, C1=1.0) == pytest.approx(np.e ** (1 / 3))


def test_scan_guards_truncation():
    with pytest.raises(TruncationError):
        resolvent_scan(build_rotated_oscillator(40), [20.0], [0.0])


def test_resolvent_scan_frame_and_decay_on_the_imaginary_axis():
    op = build_rotated_oscillator(64)
    frame = resolvent_scan(op, [5.0, 10.0], [0.0, 2.0])
    assert list(frame.columns) == ["lambda", "mu", "norm", "flag"]
    assert len(frame) == 4
    assert resolvent_norm(op, 10j) < resolvent_norm(op, 5j)


@pytest.mark.parametrize("C1", [None, 1.0])
def test_boundary_curve_growth_is_polynomial(C1):
    op = build_rotated_oscillator(320)
    frame, slope = boundary_growth(op, [10.0, 20.0, 40.0, 80.0], C1=C1)
    assert list(frame.columns) == ["lambda", "mu", "norm"]
    assert np.all(np.isfinite(frame["norm"]))
    assert slope <= 3.0


def test_resolvent_contrast_inside_the_numerical_range():
    op = build_rotated_oscillator(320)
    assert contrast_ratio(op, 40.0) >= 1e3


def test_boundary_growth_guards_truncation():
    with pytest.raises(TruncationError):
        boundary_growth(build_rotated_oscillator(100), [10.0, 80.0])


def test_mismatched_compressions_are_refused(monkeypatch):
    real = oscillator._hermite_squares

    def skewed(n):
        y2, kin = real(n)
        y2[0, 0] += 1e-3
        return y2, kin

    monkeypatch.setattr(oscillator, "_hermite_squares", skewed)
    with pytest.raises(NumericalError):
        build_rotated_oscillator(8)


def test_rescaling_identity_small_lambda():
    lhs, rhs = rescaling_check(5.0, 1.0, 200)
    assert lhs == pytest.approx(rhs, rel=1e-5)


@pytest.mark.slow
def test_rescaling_identity():
    lhs, rhs = rescaling_check(20.0, 3.0, 600)
    assert lhs == pytest.approx(rhs, rel=1e-4)
