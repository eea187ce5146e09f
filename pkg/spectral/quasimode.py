"""WKB quasimodes for the first-order model P = hD + g(x) on the circle.

At an interior point z the equation Im g(x) = Im z has two roots x+ and x-,
with Im g'(x+) < 0 < Im g'(x-). The quasimode is a cut-off WKB exponential
concentrated at x+.
"""
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger
from scipy import optimize, stats

from config import QUASIMODE_CONFIG
from spectral.errors import DomainError, GridMismatchError, HypothesisViolation, OutOfRangeError
from spectral.operators import FourierOperator, grid_to_coefficients
from spectral.symbols import TWO_PI, PeriodicFunction, Symbol1D, bracket, grid_nodes


@dataclass(frozen=True)
class CrossingPair:
    z: complex
    x_plus: float
    x_minus: float
    xi_plus: float
    xi_minus: float
    bracket_plus: float
    bracket_minus: float

    @property
    def shorter_arc(self) -> float:
        d = abs(self.x_plus - self.x_minus)
        return min(d, TWO_PI - d)


@dataclass(frozen=True)
class WkbQuasimode:
    z: complex
    h: float
    K: int
    crossing: CrossingPair
    cutoff_radius: float
    x: np.ndarray = field(repr=False)
    phase: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)
    vector: np.ndarray = field(repr=False)

    @property
    def x_plus(self) -> float:
        return self.crossing.x_plus

    def offsets(self) -> np.ndarray:
        """Signed distance x - x+ wrapped to (-pi, pi]"""
        return _wrap(self.x - self.x_plus)

    def peak(self) -> float:
        return float(self.x[np.argmax(np.abs(self.samples))])

    def spread(self) -> float:
        """Variance of |e|^2 about x+"""
        w = np.abs(self.samples) ** 2
        return float(np.sum(w * self.offsets() ** 2) / np.sum(w))

    def tail_mass(self, radius: float) -> float:
        """Fraction of ||e||^2 outside |x - x+| <= radius"""
        w = np.abs(self.samples) ** 2
        return float(np.sum(w[np.abs(self.offsets()) > radius]) / np.sum(w))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "x": self.x,
            "re": self.samples.real,
            "im": self.samples.imag,
            "abs": np.abs(self.samples),
        })


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float

    @property
    def rate(self) -> float:
        """c in r(h) ~ exp(-c/h)"""
        return -self.slope


def _wrap(d):
    return np.mod(np.asarray(d) + np.pi, TWO_PI) - np.pi


def _roots(func, deriv, xs, values):
    """Roots of a periodic function from sign changes of its samples, polished by Newton"""
    nxt = np.roll(values, -1)
    idx = np.nonzero(np.sign(values) != np.sign(nxt))[0]
    roots = []
    for i in idx:
        a = xs[i]
        b = xs[i + 1] if i + 1 < len(xs) else xs[0] + TWO_PI
        r = optimize.brentq(func, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        for _ in range(3):
            d = deriv(r)
            if d == 0:
                break
            r -= func(r) / d
        roots.append(float(np.mod(r, TWO_PI)))
    return roots


def find_crossings(g: PeriodicFunction, z: complex) -> CrossingPair:
    """Roots x+/x- of Im g(x) = Im z with xi = Re z - Re g(x) so that p(x, xi) = z"""
    z = complex(z)
    M = QUASIMODE_CONFIG["crossing_samples"]
    xs = TWO_PI * (np.arange(M) + 0.5) / M
    im_g = g(xs).imag
    if not (im_g.min() < z.imag < im_g.max()):
        raise OutOfRangeError(
            f"Im z = {z.imag:g} outside the open range ({im_g.min():g}, {im_g.max():g}) of Im g",
            z=z)

    slope = g.derivative(xs).imag
    if np.count_nonzero(np.sign(slope) != np.sign(np.roll(slope, -1))) != 2:
        raise HypothesisViolation("Im g must have exactly one maximum and one minimum")

    def f(x):
        return float(np.real(g(x).imag) - z.imag)

    def df(x):
        return float(g.derivative(x).imag)

    roots = _roots(f, df, xs, im_g - z.imag)
    if len(roots) != 2:
        raise HypothesisViolation(f"expected two crossings, found {len(roots)}", z=z)

    plus = [r for r in roots if df(r) < 0]
    minus = [r for r in roots if df(r) > 0]
    if len(plus) != 1 or len(minus) != 1:
        raise HypothesisViolation("degenerate crossing (Im g' vanishes at a root)", z=z)
    x_p, x_m = plus[0], minus[0]

    tol = QUASIMODE_CONFIG["crossing_tolerance"]
    for r in (x_p, x_m):
        if abs(f(r)) > tol * max(1.0, abs(z)):
            raise HypothesisViolation(f"crossing at x={r:.6g} not resolved ({f(r):.2e})", z=z)

    xi_p = float(z.real - g(x_p).real)
    xi_m = float(z.real - g(x_m).real)
    p = Symbol1D.first_order(g)
    b_p = float(bracket(p, x_p, xi_p))
    b_m = float(bracket(p, x_m, xi_m))
    return CrossingPair(z, x_p, x_m, xi_p, xi_m, b_p, b_m)


def _smooth_step(u):
    """0 for u <= 0, 1 for u >= 1, C-infinity in between"""
    u = np.asarray(u, dtype=float)
    a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    v = 1.0 - u
    b = np.where(v > 0, np.exp(-1.0 / np.where(v > 0, v, 1.0)), 0.0)
    return a / (a + b)


def cutoff(d, radius: float):
    """Flat-top bump: 1 on |d| <= flat * radius, 0 on |d| >= radius"""
    flat = QUASIMODE_CONFIG["flat_fraction"]
    t = np.abs(np.asarray(d)) / radius
    return _smooth_step((1.0 - t) / (1.0 - flat))


def phase_function(g: PeriodicFunction, z: complex, x_plus: float, d) -> np.ndarray:
    """phi+(x+ + d) = integral of (z - g) from x+ to x+ + d, evaluated spectrally"""
    d = np.asarray(d, dtype=float)
    K = g.order
    n = np.arange(-K, K + 1)
    coeffs = g.fourier.copy()
    g0 = coeffs[K]
    coeffs[K] = 0.0
    nz = n != 0
    weights = np.zeros_like(coeffs)
    weights[nz] = coeffs[nz] / (1j * n[nz])
    waves = np.exp(1j * np.multiply.outer(x_plus + d, n)) - np.exp(1j * n * x_plus)
    return (z - g0) * d - waves @ weights


def build_quasimode(g: PeriodicFunction, z: complex, h: float, K: Optional[int] = None,
                    cutoff_radius: Optional[float] = None) -> WkbQuasimode:
    """Unit-norm cut-off WKB state chi(x - x+) exp(i phi+(x) / h) in Fourier coefficients"""
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    crossing = find_crossings(g, z)
    arc = crossing.shorter_arc
    if cutoff_radius is None:
        cutoff_radius = QUASIMODE_CONFIG["cutoff_arc_fraction"] * arc
    if not 0 < cutoff_radius < arc / 2:
        raise HypothesisViolation(
            f"cutoff radius {cutoff_radius:g} must lie in (0, {arc / 2:g})", z=z)
    if K is None:
        K = int(np.ceil(QUASIMODE_CONFIG["modes_per_inverse_h"] / h))

    x = grid_nodes(K)
    d = _wrap(x - crossing.x_plus)
    chi = cutoff(d, cutoff_radius)
    support = chi > 0
    phase = np.full(len(x), np.nan, dtype=complex)
    phase[support] = phase_function(g, complex(z), crossing.x_plus, d[support])

    worst = float(phase[support].imag.min()) if support.any() else 0.0
    if worst < -1e-10:
        raise HypothesisViolation(f"Im phi+ = {worst:.2e} < 0 on the cutoff support", z=z)

    samples = np.zeros(len(x), dtype=complex)
    samples[support] = chi[support] * np.exp(1j * phase[support] / h)
    coeffs = grid_to_coefficients(samples)
    norm = np.linalg.norm(coeffs)
    coeffs /= norm
    samples /= norm
    coeffs.setflags(write=False)
    logger.debug(f"quasimode at z={complex(z):.4g}, h={h:g}, K={K}, radius={cutoff_radius:.3g}")
    return WkbQuasimode(complex(z), float(h), int(K), crossing, float(cutoff_radius),
                        x, phase, samples, coeffs)


def adjoint_quasimode(g: PeriodicFunction, z: complex, h: float, K: Optional[int] = None,
                      cutoff_radius: Optional[float] = None) -> WkbQuasimode:
    """Quasimode of P* - conj(z) = hD + conj(g) - conj(z), concentrated at x-"""
    return build_quasimode(g.conj(), np.conj(complex(z)), h, K, cutoff_radius)


def residual(op: FourierOperator, qm: WkbQuasimode) -> float:
    """||(P_N - z) e||"""
    if not np.isclose(op.h, qm.h, rtol=1e-12, atol=0.0) or op.K != qm.K:
        raise GridMismatchError(f"operator (h={op.h}, K={op.K}) vs quasimode (h={qm.h}, K={qm.K})")
    return float(np.linalg.norm(op.matrix @ qm.vector - qm.z * qm.vector))


def fit_decay_rate(hs: Sequence[float], residuals: Sequence[float]) -> DecayFit:
    """Least-squares line through (1/h, log r)"""
    hs = np.asarray(hs, dtype=float)
    rs = np.asarray(residuals, dtype=float)
    if len(hs) < 2:
        raise DomainError("need at least two h values")
    fit = stats.linregress(1.0 / hs, np.log(rs))
    return DecayFit(float(fit.slope), float(fit.intercept), float(fit.rvalue ** 2))
