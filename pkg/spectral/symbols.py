"""Periodic symbols p(x, xi) = sum_k c_k(x) xi^k on the cotangent bundle of the circle."""
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from loguru import logger

from config import SYMBOL_CONFIG
from spectral.errors import ConfigError, HypothesisViolation, NumericalError, VolumeCutoffError
from spectral.regions import RegionSpec

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PeriodicFunction:
    """Samples on the 2K+1 uniform nodes x_j = 2 pi j / (2K+1) with cached Fourier coefficients.

    `fourier[n + K]` is the coefficient of e^{inx}, n = -K..K.
    """

    grid_size: int
    values: np.ndarray = field(repr=False)
    fourier: np.ndarray = field(repr=False)

    @property
    def order(self) -> int:
        return (self.grid_size - 1) // 2

    @property
    def nodes(self) -> np.ndarray:
        return grid_nodes(self.order)

    @classmethod
    def from_values(cls, values) -> "PeriodicFunction":
        values = np.asarray(values, dtype=complex)
        n = len(values)
        if n % 2 == 0 or n < 1:
            raise ConfigError(f"grid size must be odd, got {n}", key_path="grid_size")
        coeffs = np.fft.fftshift(np.fft.fft(values)) / n
        values = values.copy()
        values.setflags(write=False)
        coeffs.setflags(write=False)
        return cls(n, values, coeffs)

    @classmethod
    def from_callable(cls, func: Callable, K: Optional[int] = None) -> "PeriodicFunction":
        K = SYMBOL_CONFIG["grid_order"] if K is None else K
        return cls.from_values(func(grid_nodes(K)))

    @classmethod
    def from_fourier(cls, coeffs: Sequence[complex]) -> "PeriodicFunction":
        """Build from coefficients indexed -K..K (odd length)"""
        coeffs = np.asarray(coeffs, dtype=complex)
        n = len(coeffs)
        if n % 2 == 0:
            raise ConfigError("Fourier coefficient list must have odd length", key_path="fourier")
        values = np.fft.ifft(np.fft.ifftshift(coeffs)) * n
        return cls.from_values(values)

    @classmethod
    def constant(cls, c: complex, K: int = 0) -> "PeriodicFunction":
        return cls.from_values(np.full(2 * K + 1, c, dtype=complex))

    def coefficient(self, n):
        """Fourier coefficient(s) for integer index array n; zero outside -K..K"""
        n = np.asarray(n)
        K = self.order
        out = np.zeros(n.shape, dtype=complex)
        mask = np.abs(n) <= K
        out[mask] = self.fourier[n[mask] + K]
        return out

    def significant_coefficient(self, n, threshold: Optional[float] = None):
        """coefficient(n) with entries below the bandwidth threshold set to exact zeros"""
        threshold = SYMBOL_CONFIG["bandwidth_threshold"] if threshold is None else threshold
        out = self.coefficient(n)
        scale = max(np.max(np.abs(self.fourier)), 1e-300)
        out[np.abs(out) <= threshold * scale] = 0.0
        return out

    def __call__(self, x) -> np.ndarray:
        """Trigonometric interpolation"""
        x = np.asarray(x, dtype=float)
        n = np.arange(-self.order, self.order + 1)
        return np.exp(1j * np.multiply.outer(x, n)) @ self.fourier

    def derivative(self, x, order: int = 1) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        n = np.arange(-self.order, self.order + 1)
        return np.exp(1j * np.multiply.outer(x, n)) @ (self.fourier * (1j * n) ** order)

    def bandwidth(self, threshold: Optional[float] = None) -> int:
        threshold = SYMBOL_CONFIG["bandwidth_threshold"] if threshold is None else threshold
        scale = max(np.max(np.abs(self.fourier)), 1e-300)
        significant = np.nonzero(np.abs(self.fourier) > threshold * scale)[0]
        if len(significant) == 0:
            return 0
        return int(np.max(np.abs(significant - self.order)))

    def resample(self, K: int) -> "PeriodicFunction":
        """Same trigonometric polynomial on a 2K+1 grid (K >= bandwidth)"""
        if K < self.bandwidth():
            raise NumericalError(f"cannot resample bandwidth {self.bandwidth()} onto K={K}")
        n = np.arange(-K, K + 1)
        return PeriodicFunction.from_fourier(self.coefficient(n))

    def conj(self) -> "PeriodicFunction":
        return PeriodicFunction.from_values(np.conj(self.values))

    def scaled(self, alpha: complex) -> "PeriodicFunction":
        return PeriodicFunction.from_values(alpha * self.values)

    def roundtrip_error(self) -> float:
        back = np.fft.ifft(np.fft.ifftshift(self.fourier)) * self.grid_size
        scale = max(np.max(np.abs(self.values)), 1e-300)
        return float(np.max(np.abs(back - self.values)) / scale)


def grid_nodes(K: int) -> np.ndarray:
    n = 2 * K + 1
    return TWO_PI * np.arange(n) / n


@dataclass(frozen=True)
class Symbol1D:
    """p(x, xi) = sum_k coeffs[k](x) xi^k with coefficients on one shared grid"""

    coeffs: List[PeriodicFunction]
    analytic_hint: bool = True
    name: str = "custom"

    def __post_init__(self):
        if not self.coeffs:
            raise ConfigError("symbol needs at least one coefficient", key_path="symbol.order")
        sizes = {c.grid_size for c in self.coeffs}
        if len(sizes) != 1:
            raise ConfigError("all coefficient functions must share one grid", key_path="symbol.coeff")
        if self.order >= 1 and np.min(np.abs(self.coeffs[-1].values)) == 0.0:
            raise HypothesisViolation("leading coefficient vanishes on the grid (not elliptic)")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def grid_size(self) -> int:
        return self.coeffs[0].grid_size

    @classmethod
    def first_order(cls, g: PeriodicFunction, analytic_hint=True, name="first_order") -> "Symbol1D":
        """p = xi + g(x), the quantization of hD + g"""
        return cls([g, PeriodicFunction.constant(1.0, g.order)], analytic_hint, name)

    def bandwidth(self) -> int:
        return max(c.bandwidth() for c in self.coeffs)

    def combine(self, other: "Symbol1D", alpha: complex = 1.0, beta: complex = 1.0) -> "Symbol1D":
        """alpha * self + beta * other on a common grid"""
        K = max(self.coeffs[0].order, other.coeffs[0].order)
        m = max(self.order, other.order)
        zero = PeriodicFunction.constant(0.0, K)
        out = []
        for k in range(m + 1):
            a = self.coeffs[k].resample(K) if k <= self.order else zero
            b = other.coeffs[k].resample(K) if k <= other.order else zero
            out.append(PeriodicFunction.from_values(alpha * a.values + beta * b.values))
        while len(out) > 1 and np.max(np.abs(out[-1].values)) == 0.0:
            out.pop()
        return Symbol1D(out, self.analytic_hint and other.analytic_hint, "combination")

    def to_config(self) -> dict:
        return {
            "order": self.order,
            "coeff": [{"fourier": [[c.real, c.imag] for c in f.fourier]} for f in self.coeffs],
        }


# Named built-ins ---------------------------------------------------------

def exp_ix(amplitude=1.0, offset=0.0, K=None) -> Symbol1D:
    """p = xi + offset + amplitude * e^{ix}"""
    g = PeriodicFunction.from_callable(lambda x: offset + amplitude * np.exp(1j * x), K)
    return Symbol1D.first_order(g, name="exp_ix")


def shifted_cos(amplitude=1.0, shift=0.0, offset=0.0, K=None) -> Symbol1D:
    """p = xi + offset + i * amplitude * cos(x - shift)"""
    g = PeriodicFunction.from_callable(lambda x: offset + 1j * amplitude * np.cos(x - shift), K)
    return Symbol1D.first_order(g, name="shifted_cos")


def schrodinger_iv(amplitude=1.0, K=None) -> Symbol1D:
    """p = xi^2 + i V(x), V = amplitude * cos x"""
    V = PeriodicFunction.from_callable(lambda x: 1j * amplitude * np.cos(x), K)
    zero = PeriodicFunction.constant(0.0, V.order)
    one = PeriodicFunction.constant(1.0, V.order)
    return Symbol1D([V, zero, one], name="schrodinger_iv")


BUILTINS = {
    "exp_ix": exp_ix,
    "shifted_cos": shifted_cos,
    "schrodinger_iv": schrodinger_iv,
}


def symbol_from_config(tree: dict) -> Symbol1D:
    """Named built-in ({"name": ..., params}) or explicit {"order", "coeff": [{"fourier": [[re, im], ...]}]}"""
    if "name" in tree:
        name = tree["name"]
        if name not in BUILTINS:
            raise ConfigError(f"unknown built-in symbol '{name}'", key_path="symbol.name")
        params = {k: v for k, v in tree.items() if k != "name"}
        try:
            return BUILTINS[name](**params)
        except TypeError as exc:
            raise ConfigError(str(exc), key_path="symbol") from exc
    if "coeff" not in tree:
        raise ConfigError("symbol needs 'name' or 'coeff'", key_path="symbol")
    coeffs = []
    for k, entry in enumerate(tree["coeff"]):
        pairs = entry.get("fourier")
        if pairs is None:
            raise ConfigError("missing fourier list", key_path=f"symbol.coeff[{k}].fourier")
        coeffs.append(PeriodicFunction.from_fourier([complex(re, im) for re, im in pairs]))
    order = tree.get("order", len(coeffs) - 1)
    if order != len(coeffs) - 1:
        raise ConfigError(f"order {order} does not match {len(coeffs)} coefficients", key_path="symbol.order")
    width = max(c.grid_size for c in coeffs)
    K = (width - 1) // 2
    coeffs = [c.resample(K) for c in coeffs]
    return Symbol1D(coeffs, tree.get("analytic_hint", True), "explicit")


def periodic_from_config(tree: dict) -> PeriodicFunction:
    """g(x) for first-order models: the c_0 coefficient of a symbol config"""
    return symbol_from_config(tree).coeffs[0]


# Symbol-level quantities ---------------------------------------------------

def eval_symbol(symbol: Symbol1D, x, xi) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    total = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
    for k, c in enumerate(symbol.coeffs):
        total = total + c(x) * xi ** k
    return total


def bracket(symbol: Symbol1D, x, xi, check: float = 1e-12) -> np.ndarray:
    """(1/i){p, conj p}(x, xi) = 2 Im(p_xi * conj(p_x))"""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    p_xi = np.zeros(np.broadcast(x, xi).shape, dtype=complex)
    p_x = np.zeros_like(p_xi)
    for k, c in enumerate(symbol.coeffs):
        if k >= 1:
            p_xi = p_xi + k * c(x) * xi ** (k - 1)
        p_x = p_x + c.derivative(x) * xi ** k
    pb = p_xi * np.conj(p_x) - p_x * np.conj(p_xi)
    value = pb / 1j
    scale = max(float(np.max(np.abs(value))), 1.0)
    if np.max(np.abs(value.imag)) > check * scale:
        raise NumericalError("bracket has a non-negligible imaginary residue")
    return value.real


def default_xi_cut(symbol: Symbol1D, region: RegionSpec) -> float:
    total = np.zeros(symbol.grid_size)
    for c in symbol.coeffs:
        total = total + np.abs(c.values)
    return 2.0 * (region.max_modulus + float(np.max(total)))


def weyl_volume(symbol: Symbol1D, region: RegionSpec, xi_cut: Optional[float] = None,
                resolution: Optional[int] = None) -> float:
    """Midpoint-rule measure of p^{-1}(region) in [0, 2pi) x [-xi_cut, xi_cut].

    Cells whose corners disagree on membership are refined by sub-sampling.
    """
    resolution = SYMBOL_CONFIG["volume_resolution"] if resolution is None else resolution
    sub = SYMBOL_CONFIG["volume_subsamples"]
    xi_cut = default_xi_cut(symbol, region) if xi_cut is None else xi_cut

    x_edges = np.linspace(0.0, TWO_PI, resolution + 1)
    xi_edges = np.linspace(-xi_cut, xi_cut, resolution + 1)
    dx = x_edges[1] - x_edges[0]
    dxi = xi_edges[1] - xi_edges[0]

    corner_in = region.contains(eval_symbol(symbol, x_edges[:, None], xi_edges[None, :]))
    c00 = corner_in[:-1, :-1]
    c01 = corner_in[:-1, 1:]
    c10 = corner_in[1:, :-1]
    c11 = corner_in[1:, 1:]
    all_in = c00 & c01 & c10 & c11
    mixed = (c00 | c01 | c10 | c11) & ~all_in

    fraction = all_in.astype(float)
    ix, jx = np.nonzero(mixed)
    if len(ix):
        offsets = (np.arange(sub) + 0.5) / sub
        xs = x_edges[ix][:, None, None] + dx * offsets[None, :, None]
        xis = xi_edges[jx][:, None, None] + dxi * offsets[None, None, :]
        inside = region.contains(eval_symbol(symbol, xs, xis))
        fraction[ix, jx] = inside.reshape(len(ix), -1).mean(axis=1)

    touched = fraction[:, 0].any() or fraction[:, -1].any()
    if touched:
        raise VolumeCutoffError(f"xi_cut={xi_cut:g} too small: preimage reaches the cutoff")
    volume = float(fraction.sum() * dx * dxi)
    logger.debug(f"weyl_volume: {volume:.6g} ({len(ix)} refined cells, xi_cut={xi_cut:.3g})")
    return volume
