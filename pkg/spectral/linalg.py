"""Dense complex linear algebra with explicit accuracy contracts.

All routines are pure functions of their inputs and may run concurrently.
Tolerances come from `config.TOLERANCES`.
"""
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np
import pandas as pd
import scipy.linalg as sla
from loguru import logger

from config import TOLERANCES
from spectral.errors import (DimensionError, EigenSolverError, HermitianCheckError,
                             NumericalError, SingularMatrixError)


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray = field(repr=False)
    max_residual: float


@dataclass(frozen=True)
class SingularTriplet:
    s_min: float
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)


def as_dense(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 1:
        raise NumericalError(f"expected a non-empty square matrix, got shape {A.shape}")
    if A.shape[0] > TOLERANCES["max_dimension"]:
        raise DimensionError(f"dimension {A.shape[0]} exceeds {TOLERANCES['max_dimension']}")
    if not np.all(np.isfinite(A)):
        raise NumericalError("matrix has non-finite entries")
    return A


def eig(A) -> SpectrumResult:
    """All eigenvalues with multiplicity, certified by eigenvector residuals.

    Triangular input returns its diagonal exactly.
    """
    A = as_dense(A)
    if is_triangular(A):
        return _sorted_spectrum(np.diag(A).copy(), 0.0)
    try:
        values, vectors = sla.eig(A, check_finite=False)
    except sla.LinAlgError as exc:
        raise EigenSolverError(f"QR iteration failed: {exc}", index=_unconverged_index(exc)) from exc
    norms = np.linalg.norm(vectors, axis=0)
    norms[norms == 0] = 1.0
    residuals = np.linalg.norm(A @ vectors - vectors * values[None, :], axis=0) / norms
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    worst = int(np.argmax(residuals))
    if residuals[worst] > TOLERANCES["tol_eig"] * scale:
        raise EigenSolverError(f"eigenpair {worst} residual {residuals[worst]:.3e} above tolerance",
                               index=worst)
    return _sorted_spectrum(values, float(residuals.max()))


def is_triangular(A) -> bool:
    """Exact zeros strictly above or strictly below the diagonal"""
    A = np.asarray(A)
    return not np.any(np.triu(A, 1)) or not np.any(np.tril(A, -1))


def _sorted_spectrum(values, max_residual) -> SpectrumResult:
    order = np.lexsort((values.imag, values.real))
    values = values[order]
    values.setflags(write=False)
    return SpectrumResult(values, max_residual)


def _unconverged_index(exc) -> int:
    digits = "".join(ch for ch in str(exc) if ch.isdigit())
    return int(digits) if digits else -1


def smallest_singular(A) -> SingularTriplet:
    """Smallest singular value with unit left/right vectors, A @ right = s_min * left"""
    A = as_dense(A)
    n = A.shape[0]
    if n <= TOLERANCES["dense_svd_limit"]:
        return _svd_triplet(A)
    triplet = _inverse_iteration(A)
    if triplet is None:
        logger.debug(f"inverse iteration stagnated at n={n}; falling back to full SVD")
        return _svd_triplet(A)
    return triplet


def smallest_singular_pairs(A, count: int = 2):
    """The `count` smallest singular values (ascending) with right and left vectors as columns"""
    A = as_dense(A)
    U, s, Vh = sla.svd(A, check_finite=False, lapack_driver="gesdd")
    idx = np.arange(len(s) - 1, len(s) - 1 - count, -1)
    return s[idx], Vh[idx].conj().T, U[:, idx]


def _svd_triplet(A) -> SingularTriplet:
    try:
        U, s, Vh = sla.svd(A, check_finite=False, lapack_driver="gesdd")
    except sla.LinAlgError:
        U, s, Vh = sla.svd(A, check_finite=False, lapack_driver="gesvd")
    return SingularTriplet(float(s[-1]), U[:, -1].copy(), Vh[-1].conj().copy())


def _inverse_iteration(A):
    """Inverse iteration on A^H A through one LU factorization; None on stagnation"""
    n = A.shape[0]
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(A, check_finite=False)
        except (sla.LinAlgError, sla.LinAlgWarning):
            return None
    x = np.ones(n, dtype=complex) / np.sqrt(n)
    best = np.inf
    stale = 0
    for _ in range(TOLERANCES["max_inverse_iterations"]):
        y = sla.lu_solve(lu, x, trans=2, check_finite=False)
        x_new = sla.lu_solve(lu, y, check_finite=False)
        x_new /= np.linalg.norm(x_new)
        Ax = A @ x_new
        s = np.linalg.norm(Ax)
        residual = np.linalg.norm(A.conj().T @ Ax - s ** 2 * x_new)
        if residual <= TOLERANCES["tol_svd"] * max(s, 1e-300) * np.linalg.norm(A):
            left = Ax / s if s > 0 else x_new
            return SingularTriplet(float(s), left, x_new)
        if residual < 0.999 * best:
            best = residual
            stale = 0
        else:
            stale += 1
            if stale >= TOLERANCES["stagnation_steps"]:
                return None
        x = x_new
    return None


def hermitian_smallest_two(A) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """Two smallest eigenpairs of a Hermitian matrix (symmetrized after the check)"""
    A = as_dense(A)
    if A.shape[0] < 2:
        raise NumericalError("need dimension >= 2 for two eigenpairs")
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    asym = np.linalg.norm(A - A.conj().T)
    if asym > TOLERANCES["tol_hermitian"] * scale:
        raise HermitianCheckError(f"matrix is not Hermitian (defect {asym / scale:.2e})")
    H = 0.5 * (A + A.conj().T)
    values, vectors = sla.eigh(H, subset_by_index=[0, 1], check_finite=False)
    residual = np.linalg.norm(H @ vectors - vectors * values[None, :], axis=0).max()
    if residual > TOLERANCES["tol_hermitian_residual"] * scale:
        raise NumericalError(f"Hermitian eigen-residual {residual:.2e} above tolerance")
    return float(values[0]), float(values[1]), vectors[:, 0], vectors[:, 1]


def solve(A, b) -> np.ndarray:
    """Solve A x = b, refusing when the 1-norm condition estimate exceeds max_condition"""
    A = as_dense(A)
    b = np.asarray(b, dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        try:
            lu = sla.lu_factor(A, check_finite=False)
        except sla.LinAlgError as exc:
            raise SingularMatrixError("exactly singular matrix", condition=np.inf) from exc
    anorm = np.linalg.norm(A, 1)
    rcond = _rcond(lu, anorm)
    condition = np.inf if rcond == 0 else 1.0 / rcond
    if condition > TOLERANCES["max_condition"]:
        raise SingularMatrixError(f"numerically singular (condition ~ {condition:.2e})",
                                  condition=condition)
    x = sla.lu_solve(lu, b, check_finite=False)
    residual = np.linalg.norm(A @ x - b)
    bound = TOLERANCES["tol_solve"] * condition * (np.linalg.norm(A) * np.linalg.norm(x) + np.linalg.norm(b))
    if residual > bound:
        raise NumericalError(f"solve residual {residual:.2e} exceeds {bound:.2e}")
    return x


def _rcond(lu, anorm: float) -> float:
    lu_matrix, _ = lu
    gecon = sla.get_lapack_funcs("gecon", (lu_matrix,))
    rcond, info = gecon(lu_matrix, anorm, norm="1")
    if info != 0:
        return 0.0
    return float(rcond)


def dump_matrix_csv(A, path) -> Path:
    """Debug dump: one row per entry with columns row, col, re, im"""
    A = np.asarray(A, dtype=complex)
    rows, cols = np.indices(A.shape)
    frame = pd.DataFrame({
        "row": rows.ravel(),
        "col": cols.ravel(),
        "re": A.real.ravel(),
        "im": A.imag.ravel(),
    })
    path = Path(path)
    frame.to_csv(path, index=False, float_format="%.17g")
    return path
