"""Rotated harmonic oscillator Q = -d^2/dy^2 + i y^2 in the Hermite basis, with
resolvent scans along E = i lambda + mu and the semiclassical rescaling identity.
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import pandas as pd
from loguru import logger
from scipy import stats

from config import RESOLVENT_CONFIG
from spectral.errors import DomainError, NumericalError, TruncationError
from spectral.linalg import smallest_singular
from spectral.parallel import ordered_map


@dataclass(frozen=True)
class HermiteOperator:
    n: int
    matY2: np.ndarray = field(repr=False)
    matD2: np.ndarray = field(repr=False)
    matQ: np.ndarray = field(repr=False)

    @property
    def kinetic(self) -> np.ndarray:
        return -self.matD2


def ladder_matrices(n: int):
    """Lowering and raising operators a, a^dagger truncated to the first n Hermite functions"""
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    return a, a.conj().T


def _hermite_squares(n: int):
    """Compressions of y^2 and -d^2/dy^2 onto the first n Hermite functions.

    Entries of (a + a^+)^2 / 2 and -(a - a^+)^2 / 2 written out directly; both are PSD.
    """
    k = np.arange(n)
    diag = (2 * k + 1) / 2.0
    off = np.sqrt((k[:-2] + 1) * (k[:-2] + 2)) / 2.0
    y2 = np.diag(diag).astype(complex)
    kin = np.diag(diag).astype(complex)
    y2 += np.diag(off, 2) + np.diag(off, -2)
    kin -= np.diag(off, 2) + np.diag(off, -2)
    return y2, kin


def _ladder_squares(n: int):
    """Same compressions from products of ladders truncated at n + 2 (the products couple k to k +- 2)"""
    a, ad = ladder_matrices(n + 2)
    x = a + ad
    p = a - ad
    return (x @ x)[:n, :n] / 2.0, -(p @ p)[:n, :n] / 2.0


def build_rotated_oscillator(n: int) -> HermiteOperator:
    if n < 4:
        raise DomainError("n must be at least 4")
    y2, kin = _hermite_squares(n)
    y2_ladder, kin_ladder = _ladder_squares(n)
    gap = max(np.max(np.abs(y2 - y2_ladder)), np.max(np.abs(kin - kin_ladder)))
    if gap > 1e-12 * n:
        raise NumericalError(f"Hermite compressions disagree with the ladder products ({gap:.2e})")
    Q = kin + 1j * y2
    for mat in (y2, kin, Q):
        mat.setflags(write=False)
    return HermiteOperator(n, y2, -kin, Q)


def boundary_curve(lam, C1: float = None) -> np.ndarray:
    """mu = C1 lambda^{1/3} (ln lambda)^{2/3}"""
    C1 = RESOLVENT_CONFIG["C1"] if C1 is None else C1
    lam = np.asarray(lam, dtype=float)
    return C1 * lam ** (1.0 / 3.0) * np.log(lam) ** (2.0 / 3.0)


def resolvent_norm(op: HermiteOperator, E: complex) -> float:
    s = smallest_singular(op.matQ - E * np.eye(op.n)).s_min
    return np.inf if s == 0 else 1.0 / s


def resolvent_scan(op: HermiteOperator, lambdas: Sequence[float], mus: Sequence[float],
                   guard: float = None, workers: int = 1) -> pd.DataFrame:
    """||(Q - (i lambda + mu))^{-1}|| on the lambda x mu grid; truncation-sensitive cells flagged"""
    guard = RESOLVENT_CONFIG["guard"] if guard is None else guard
    if op.n < guard * max(lambdas):
        raise TruncationError(f"n={op.n} is below {guard:g} * max(lambda) = {guard * max(lambdas):g}")
    cells = [(float(lam), float(mu)) for lam in lambdas for mu in mus]
    norms = ordered_map(lambda c: resolvent_norm(op, 1j * c[0] + c[1]), cells, workers)

    big = build_rotated_oscillator(int(np.ceil(RESOLVENT_CONFIG["sensitivity_factor"] * op.n)))
    flags = [False] * len(cells)
    stride = RESOLVENT_CONFIG["sensitivity_stride"]
    for idx in range(0, len(cells), stride):
        lam, mu = cells[idx]
        other = resolvent_norm(big, 1j * lam + mu)
        change = abs(other - norms[idx]) / max(norms[idx], 1e-300)
        if change > RESOLVENT_CONFIG["sensitivity_threshold"]:
            flags[idx] = True
            logger.warning(f"resolvent cell lambda={lam:g}, mu={mu:g} changes {change:.1%} at n={big.n}")
    return pd.DataFrame({"lambda": [c[0] for c in cells], "mu": [c[1] for c in cells],
                         "norm": norms, "flag": flags})


def boundary_growth(op: HermiteOperator, lambdas: Sequence[float], C1: float = None,
                    guard: float = None, workers: int = 1):
    """Resolvent norm along the boundary curve and its log-log slope in lambda"""
    guard = RESOLVENT_CONFIG["guard"] if guard is None else guard
    lambdas = np.asarray(lambdas, dtype=float)
    if len(lambdas) < 2 or np.any(lambdas <= 1.0):
        raise DomainError("need at least two lambdas above 1")
    if op.n < guard * lambdas.max():
        raise TruncationError(f"n={op.n} is below {guard:g} * max(lambda) = {guard * lambdas.max():g}")
    mus = boundary_curve(lambdas, C1)
    norms = ordered_map(lambda c: resolvent_norm(op, 1j * c[0] + c[1]), list(zip(lambdas, mus)), workers)
    fit = stats.linregress(np.log(lambdas), np.log(norms))
    frame = pd.DataFrame({"lambda": lambdas, "mu": mus, "norm": norms})
    logger.info(f"boundary curve slope {fit.slope:.3f} over lambda {lambdas.min():g}..{lambdas.max():g}")
    return frame, float(fit.slope)


def contrast_ratio(op: HermiteOperator, lam: float, mu_ratio: float = None, C1: float = None) -> float:
    """||R(i lam + mu_ratio lam)|| / ||R(i lam + boundary_curve(lam))||"""
    mu_ratio = RESOLVENT_CONFIG["contrast_mu_ratio"] if mu_ratio is None else mu_ratio
    if lam <= 1.0:
        raise DomainError("lambda must exceed 1")
    inside = resolvent_norm(op, 1j * lam + mu_ratio * lam)
    on_curve = resolvent_norm(op, 1j * lam + float(boundary_curve(lam, C1)))
    return inside / on_curve


def rescaling_check(lam: float, mu: float, K: int) -> tuple:
    """(s_min(Q - (i lam + mu)), lam * s_min(P_h - (i + mu/lam))) with P_h = -h^2 d^2 + i x^2, h = 1/lam"""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    op = build_rotated_oscillator(K)
    lhs = smallest_singular(op.matQ - (1j * lam + mu) * np.eye(K)).s_min
    h = 1.0 / lam
    P_h = h ** 2 * op.kinetic + 1j * op.matY2
    rhs = lam * smallest_singular(P_h - (1j + mu / lam) * np.eye(K)).s_min
    logger.debug(f"rescaling check lambda={lam:g}, mu={mu:g}: {lhs:.6g} vs {rhs:.6g}")
    return float(lhs), float(rhs)
