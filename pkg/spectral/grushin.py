"""Rank-one Grushin reduction of P - z and the effective function E_-+(z).

With (P - z) e0 = alpha0 f0, |alpha0| = t0, the bordered matrix
[[P - z, f0], [e0^H, 0]] is invertible as long as t1 > 0, and the corner of
its inverse is E_-+(z) = -alpha0. The phases of e0 and f0 are fixed by a gauge
so that z -> (e0, f0) is smooth where t0 < t1.
"""
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from loguru import logger

from config import GRUSHIN_CONFIG
from spectral.errors import DomainError, GaugeError, HypothesisViolation, NumericalError, SingularMatrixError
from spectral.linalg import hermitian_smallest_two, smallest_singular_pairs, solve
from spectral.operators import FourierOperator
from spectral.parallel import ordered_map
from spectral.quasimode import adjoint_quasimode, build_quasimode, find_crossings


@dataclass(frozen=True)
class GrushinData:
    z: complex
    t0: float
    t1: float
    e0: np.ndarray = field(repr=False)
    f0: np.ndarray = field(repr=False)
    alpha0: complex = 0j
    E_mp: Optional[complex] = None
    block_residual: Optional[float] = None


@dataclass(frozen=True)
class DbarSample:
    z: complex
    step: float
    f_estimate: complex
    identity_residual: float
    scale: float
    dbar_E: complex = 0j
    E_mp: complex = 0j

    @property
    def relative_residual(self) -> float:
        return self.identity_residual / self.scale if self.scale > 0 else np.inf


# Gauges ------------------------------------------------------------------

def _unit_phase(c: complex) -> complex:
    return np.conj(c) / abs(c) if abs(c) > 0 else 1.0


class MaxEntryGauge:
    """Largest-magnitude entry made real positive, for e0 and f0 separately"""

    name = "max_entry"

    def __init__(self, index_e: Optional[int] = None, index_f: Optional[int] = None):
        self.index_e = index_e
        self.index_f = index_f

    def fix(self, e0, f0, z):
        ie = int(np.argmax(np.abs(e0))) if self.index_e is None else self.index_e
        jf = int(np.argmax(np.abs(f0))) if self.index_f is None else self.index_f
        return e0 * _unit_phase(e0[ie]), f0 * _unit_phase(f0[jf])

    def frozen_at(self, e0, f0) -> "MaxEntryGauge":
        """Same gauge with the entry indices pinned, for stencils"""
        return MaxEntryGauge(int(np.argmax(np.abs(e0))), int(np.argmax(np.abs(f0))))


class ReferenceGauge:
    """Overlaps (e_ref | e0) and (f_ref | f0) made real positive"""

    name = "reference"

    def __init__(self, e_ref, f_ref, min_overlap: Optional[float] = None):
        self.e_ref = np.asarray(e_ref, dtype=complex)
        self.f_ref = np.asarray(f_ref, dtype=complex)
        self.min_overlap = min_overlap

    def fix(self, e0, f0, z):
        oe = np.vdot(self.e_ref, e0)
        of = np.vdot(self.f_ref, f0)
        if self.min_overlap is not None and min(abs(oe), abs(of)) < self.min_overlap:
            raise GaugeError(
                f"gauge discontinuity at z={z:.6g}: overlaps {abs(oe):.3f}, {abs(of):.3f} "
                f"below {self.min_overlap}", z=z)
        return e0 * _unit_phase(oe), f0 * _unit_phase(of)


class WkbGauge:
    """Overlaps with the WKB quasimodes of P - z and (P - z)* made real positive"""

    name = "wkb"

    def __init__(self, g, h: float, K: int):
        self.g = g
        self.h = h
        self.K = K

    @classmethod
    def for_operator(cls, op: FourierOperator) -> "WkbGauge":
        return cls(_first_order_g(op), op.h, op.K)

    def fix(self, e0, f0, z):
        e_ref = build_quasimode(self.g, z, self.h, self.K).vector
        f_ref = adjoint_quasimode(self.g, z, self.h, self.K).vector
        return ReferenceGauge(e_ref, f_ref).fix(e0, f0, z)


def _first_order_g(op: FourierOperator):
    symbol = op.symbol
    if symbol is None or symbol.order != 1 or np.max(np.abs(symbol.coeffs[1].values - 1.0)) > 1e-14:
        raise HypothesisViolation("operator is not of the form hD + g")
    return symbol.coeffs[0]


# Core operations -----------------------------------------------------------

def singular_pair(op: FourierOperator, z: complex, gauge=None) -> GrushinData:
    """t0 <= t1 and the gauge-fixed singular vectors of P - z"""
    gauge = MaxEntryGauge() if gauge is None else gauge
    z = complex(z)
    A = op.shifted(z)
    s, right, left = smallest_singular_pairs(A, 2)
    t0, t1 = float(s[0]), float(s[1])
    e0, f0 = gauge.fix(right[:, 0], left[:, 0], z)

    scale = op.frobenius_norm
    if t1 ** 2 > 1e-8 * scale ** 2:
        lam0, lam1, _, _ = hermitian_smallest_two(A.conj().T @ A)
        if abs(np.sqrt(max(lam1, 0.0)) - t1) > 1e-6 * max(t1, 1.0):
            logger.warning(f"t1 cross-check mismatch at z={z:.4g}: {t1:.6g} vs {np.sqrt(lam1):.6g}")
    if t0 <= GRUSHIN_CONFIG["degenerate_t0"] * scale:
        logger.debug(f"z={z:.4g} is numerically an eigenvalue (t0={t0:.2e})")

    alpha0 = complex(np.vdot(f0, A @ e0))
    return GrushinData(z, t0, t1, e0, f0, alpha0)


def bordered_matrix(A: np.ndarray, e0: np.ndarray, f0: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    B = np.zeros((n + 1, n + 1), dtype=complex)
    B[:n, :n] = A
    B[:n, n] = f0
    B[n, :n] = e0.conj()
    return B


def _corner(B: np.ndarray):
    n = B.shape[0] - 1
    rhs = np.zeros(n + 1, dtype=complex)
    rhs[n] = 1.0
    x = solve(B, rhs)
    return complex(x[n]), float(np.linalg.norm(B @ x - rhs))


def effective_function(op: FourierOperator, z: complex, gauge=None) -> GrushinData:
    """E_-+(z) from one bordered solve, checked against |E_-+| = t0"""
    data = singular_pair(op, z, gauge)
    scale = op.frobenius_norm
    if data.t1 <= GRUSHIN_CONFIG["degenerate_t0"] * scale:
        raise SingularMatrixError(f"bordered system singular at z={data.z:.4g} (t1 = {data.t1:.2e})")
    B = bordered_matrix(op.shifted(data.z), data.e0, data.f0)
    E_mp, block_residual = _corner(B)
    if block_residual > GRUSHIN_CONFIG["block_residual"] * max(scale, 1.0):
        raise NumericalError(f"bordered residual {block_residual:.2e} at z={data.z:.4g}")
    floor = GRUSHIN_CONFIG["degenerate_t0"] * scale
    if abs(abs(E_mp) - data.t0) > GRUSHIN_CONFIG["modulus_tolerance"] * data.t0 + floor:
        raise NumericalError(f"|E_-+| = {abs(E_mp):.6e} differs from t0 = {data.t0:.6e}")
    data = replace(data, E_mp=E_mp, block_residual=block_residual)
    if data.t0 > GRUSHIN_CONFIG["schur_min_t0"] * scale:
        _compare_schur(op, data)
    return data


def schur_check(op: FourierOperator, data: GrushinData) -> complex:
    """E_-+ recomputed as -1 / (e0^H (P - z)^{-1} f0); z must stay off the spectrum"""
    x = solve(op.shifted(data.z), data.f0)
    return complex(-1.0 / np.vdot(data.e0, x))


def _compare_schur(op, data) -> Optional[float]:
    """Relative gap between the bordered and the Schur-complement E_-+; logged, never raised"""
    try:
        E_schur = schur_check(op, data)
    except NumericalError as exc:
        logger.debug(f"schur cross-check skipped at z={data.z:.4g}: {exc}")
        return None
    gap = abs(E_schur - data.E_mp) / abs(data.E_mp)
    if gap > GRUSHIN_CONFIG["schur_tolerance"]:
        logger.warning(f"schur cross-check at z={data.z:.4g}: E_-+ {data.E_mp:.6g} vs {E_schur:.6g}")
    return gap


def perturbation_projection(Q: np.ndarray, data: GrushinData) -> complex:
    """(Q e0 | f0); E_-+^delta = E_-+ - delta (Q e0 | f0) + O(delta^2)"""
    return complex(np.vdot(data.f0, np.asarray(Q) @ data.e0))


def perturbed_effective_function(op: FourierOperator, z: complex, Q: np.ndarray, delta: float,
                                 base: Optional[GrushinData] = None, gauge=None) -> complex:
    """E_-+^delta(z) for P + delta Q, bordered with the unperturbed e0, f0"""
    z = complex(z)
    base = singular_pair(op, z, gauge) if base is None else base
    A = op.shifted(z) + delta * np.asarray(Q)
    E, _ = _corner(bordered_matrix(A, base.e0, base.f0))
    return E


def grushin_map(op: FourierOperator, nodes, gauge=None, workers: int = 1) -> pd.DataFrame:
    """re, im, t0, t1, reEmp, imEmp over a list of z nodes; failed nodes are NaN"""
    nodes = np.asarray(nodes, dtype=complex).ravel()

    def one(z):
        try:
            d = effective_function(op, z, gauge)
            return d.t0, d.t1, d.E_mp
        except (NumericalError, HypothesisViolation) as exc:
            logger.warning(f"grushin node z={z:.4g} failed: {exc}")
            return np.nan, np.nan, complex(np.nan, np.nan)

    rows = ordered_map(one, nodes, workers)
    return pd.DataFrame({
        "re": nodes.real,
        "im": nodes.imag,
        "t0": [r[0] for r in rows],
        "t1": [r[1] for r in rows],
        "reEmp": [np.real(r[2]) for r in rows],
        "imEmp": [np.imag(r[2]) for r in rows],
    })


# d-bar identity --------------------------------------------------------------

def _stencil(op, z, step, gauge):
    points = {
        "c": z,
        "xp": z + step, "xm": z - step,
        "yp": z + 1j * step, "ym": z - 1j * step,
    }
    return {k: effective_function(op, p, gauge) for k, p in points.items()}


def _check_continuity(stencil, min_overlap):
    centre = stencil["c"]
    for key, data in stencil.items():
        overlap = min(abs(np.vdot(centre.e0, data.e0)), abs(np.vdot(centre.f0, data.f0)))
        if overlap < min_overlap:
            raise GaugeError(f"gauge discontinuity between z={centre.z:.6g} and z={data.z:.6g}: "
                             f"overlap {overlap:.3f} below {min_overlap}", z=data.z)


def dbar_residual(op: FourierOperator, z: complex, step: Optional[float] = None,
                  gauge=None) -> DbarSample:
    """Check d/dzbar E_-+ + f E_-+ = 0 with f = (d_z e0 | e0) + (f0 | d_zbar f0).

    The gauge must be smooth in z; the default is the WKB gauge of hD + g.
    """
    z = complex(z)
    step = GRUSHIN_CONFIG["default_step"] if step is None else float(step)
    if step <= 0:
        raise DomainError("step must be positive")
    gauge = WkbGauge.for_operator(op) if gauge is None else gauge
    s = _stencil(op, z, step, gauge)
    _check_continuity(s, GRUSHIN_CONFIG["gauge_overlap"])

    def d_x(attr):
        return (getattr(s["xp"], attr) - getattr(s["xm"], attr)) / (2 * step)

    def d_y(attr):
        return (getattr(s["yp"], attr) - getattr(s["ym"], attr)) / (2 * step)

    E = s["c"].E_mp
    dbar_E = 0.5 * (d_x("E_mp") + 1j * d_y("E_mp"))
    dz_e0 = 0.5 * (d_x("e0") - 1j * d_y("e0"))
    dzbar_f0 = 0.5 * (d_x("f0") + 1j * d_y("f0"))
    f = complex(np.vdot(dz_e0, s["c"].e0) + np.vdot(s["c"].f0, dzbar_f0))

    residual = abs(dbar_E + f * E)
    scale = max(abs(dbar_E), abs(f * E))
    return DbarSample(z, step, f, float(residual), float(scale), complex(dbar_E), complex(E))


def symplectic_density_check(op: FourierOperator, z: complex, step: Optional[float] = None, gauge=None):
    """(lhs, rhs) with lhs = Re 4 d_z f by differences and rhs = (2/h)(1/B+ - 1/B-)"""
    z = complex(z)
    step = GRUSHIN_CONFIG["default_step"] if step is None else float(step)
    g = _first_order_g(op)
    crossing = find_crossings(g, z)
    gauge = WkbGauge.for_operator(op) if gauge is None else gauge

    def f_at(w):
        return dbar_residual(op, w, step, gauge).f_estimate

    fx = (f_at(z + step) - f_at(z - step)) / (2 * step)
    fy = (f_at(z + 1j * step) - f_at(z - 1j * step)) / (2 * step)
    lhs = float(np.real(2.0 * (fx - 1j * fy)))
    rhs = float((2.0 / op.h) * (1.0 / crossing.bracket_plus - 1.0 / crossing.bracket_minus))
    logger.debug(f"symplectic density at z={z:.4g}: lhs={lhs:.6g}, rhs={rhs:.6g}")
    return lhs, rhs
