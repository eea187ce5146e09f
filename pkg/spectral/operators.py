"""Truncated Fourier-basis matrices of P = sum_k c_k(x) (hD)^k on the circle.

Basis: e^k(x) = (2 pi)^{-1/2} e^{ikx}, k = -K..K. Left quantization: the
coefficient multiplies after (hD)^k acts mode-wise.
"""
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from config import TOLERANCES
from spectral.errors import DimensionError, DomainError, TruncationError
from spectral.symbols import Symbol1D

SQRT_TWO_PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class FourierOperator:
    h: float
    K: int
    matrix: np.ndarray = field(repr=False)
    symbol: Symbol1D = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return 2 * self.K + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.K, self.K + 1)

    @property
    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def shifted(self, z: complex) -> np.ndarray:
        """P - z as a fresh array"""
        return self.matrix - z * np.eye(self.dimension)

    def with_matrix(self, matrix: np.ndarray) -> "FourierOperator":
        matrix = np.array(matrix, dtype=complex)
        matrix.setflags(write=False)
        return FourierOperator(self.h, self.K, matrix, self.symbol)


def assemble(symbol: Symbol1D, h: float, K: int) -> FourierOperator:
    """M[j,k] = sum_r chat_r(j - k) (h k)^r for j, k in -K..K; negligible coefficients are exact zeros"""
    if h <= 0:
        raise DomainError(f"h must be positive, got {h}")
    bandwidth = symbol.bandwidth()
    if K < bandwidth:
        raise TruncationError(f"K={K} is below the coefficient bandwidth {bandwidth}")
    if 2 * K + 1 > TOLERANCES["max_dimension"]:
        raise DimensionError(f"dimension {2 * K + 1} exceeds {TOLERANCES['max_dimension']}")

    modes = np.arange(-K, K + 1)
    diff = modes[:, None] - modes[None, :]
    matrix = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
    for r, coeff in enumerate(symbol.coeffs):
        matrix += coeff.significant_coefficient(diff) * ((h * modes) ** r)[None, :]
    matrix.setflags(write=False)
    logger.debug(f"assembled {symbol.name} with h={h:g}, K={K}, bandwidth={bandwidth}")
    return FourierOperator(float(h), int(K), matrix, symbol)


def grid_to_coefficients(samples: np.ndarray) -> np.ndarray:
    """Coefficients u_k of u = sum u_k e^k from 2K+1 equispaced samples"""
    samples = np.asarray(samples, dtype=complex)
    return SQRT_TWO_PI * np.fft.fftshift(np.fft.fft(samples)) / len(samples)


def coefficients_to_grid(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=complex)
    return np.fft.ifft(np.fft.ifftshift(coeffs)) * len(coeffs) / SQRT_TWO_PI


def apply_pointwise(symbol: Symbol1D, h: float, coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """(P u)(x) evaluated directly: sum_r c_r(x) sum_k (hk)^r u_k e^k(x)"""
    K = (len(coeffs) - 1) // 2
    modes = np.arange(-K, K + 1)
    waves = np.exp(1j * np.multiply.outer(x, modes)) / SQRT_TWO_PI
    out = np.zeros(len(x), dtype=complex)
    for r, c in enumerate(symbol.coeffs):
        out += c(x) * (waves @ (coeffs * (h * modes) ** r))
    return out
