"""Two-dimensional demo: P = -h^2 Laplacian + V(x) on the torus with a random multiplicative perturbation.

Basis e_k(x) = e^{i k.x} / (2 pi), k in [-K2, K2]^2, ordered row-major in (k1, k2).
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd
from loguru import logger

from config import TORUS_CONFIG, WEYL_CONFIG
from spectral.errors import ConfigError, DimensionError, HypothesisViolation
from spectral.linalg import eig
from spectral.parallel import ordered_map
from spectral.random_weyl import (RESULT_COLUMNS, WeylResult, count_in_region, summarize,
                                  window_parameters)
from spectral.regions import RegionSpec
from spectral.rng import complex_normal, derive_seed, make_generator

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class TorusPotential:
    """Trigonometric polynomial V(x) = sum_m coeffs[m] e^{i m.x}"""

    coeffs: Dict[Tuple[int, int], complex] = field(repr=False)
    name: str = "custom"

    def __call__(self, x1, x2) -> np.ndarray:
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        out = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for (m1, m2), c in self.coeffs.items():
            out = out + c * np.exp(1j * (m1 * x1 + m2 * x2))
        return out

    def coefficient(self, m1, m2) -> complex:
        return self.coeffs.get((int(m1), int(m2)), 0j)

    def is_even(self, tol: float = 1e-14) -> bool:
        return all(abs(c - self.coefficient(-m1, -m2)) <= tol for (m1, m2), c in self.coeffs.items())


def cos_sum(amplitude: float = 1.0) -> TorusPotential:
    """V = i * amplitude * (cos x1 + cos x2)"""
    c = 0.5j * amplitude
    return TorusPotential({(1, 0): c, (-1, 0): c, (0, 1): c, (0, -1): c}, "cos_sum")


POTENTIALS = {"cos_sum": cos_sum}


def potential_from_config(tree: dict) -> TorusPotential:
    name = tree.get("name")
    if name in POTENTIALS:
        params = {k: v for k, v in tree.items() if k != "name"}
        try:
            return POTENTIALS[name](**params)
        except TypeError as exc:
            raise ConfigError(str(exc), key_path="potential") from exc
    if "fourier" in tree:
        coeffs = {(int(m1), int(m2)): complex(re, im) for m1, m2, re, im in tree["fourier"]}
        return TorusPotential(coeffs)
    raise ConfigError(f"unknown potential '{name}'", key_path="potential.name")


def torus_modes(K2: int) -> np.ndarray:
    k = np.arange(-K2, K2 + 1)
    k1, k2 = np.meshgrid(k, k, indexing="ij")
    return np.stack([k1.ravel(), k2.ravel()], axis=1)


def assemble_torus(V: TorusPotential, h: float, K2: int) -> np.ndarray:
    """h^2 |k|^2 on the diagonal plus the convolution by V-hat"""
    if K2 > TORUS_CONFIG["max_axis_modes"]:
        raise DimensionError(f"K2={K2} exceeds {TORUS_CONFIG['max_axis_modes']} modes per axis")
    modes = torus_modes(K2)
    diff = modes[:, None, :] - modes[None, :, :]
    M = np.zeros((len(modes), len(modes)), dtype=complex)
    for (m1, m2), c in V.coeffs.items():
        M[(diff[..., 0] == m1) & (diff[..., 1] == m2)] += c
    M[np.diag_indices_from(M)] += h ** 2 * np.sum(modes ** 2, axis=1)
    return M


def multiplicative_perturbation(h: float, K2: int, L: float, seed: int) -> np.ndarray:
    """Matrix of multiplication by sum_{|m| <= L/h} alpha_m e^{i m.x} / (2 pi)"""
    rng = make_generator(seed, "torus-perturbation")
    radius = L / h
    span = int(np.floor(radius))
    m = np.arange(-span, span + 1)
    m1, m2 = np.meshgrid(m, m, indexing="ij")
    keep = m1 ** 2 + m2 ** 2 <= radius ** 2
    alpha = np.zeros(m1.shape, dtype=complex)
    alpha[keep] = complex_normal(rng, int(keep.sum()))

    modes = torus_modes(K2)
    diff = modes[:, None, :] - modes[None, :, :]
    inside = (np.abs(diff[..., 0]) <= span) & (np.abs(diff[..., 1]) <= span)
    Q = np.zeros(diff.shape[:2], dtype=complex)
    Q[inside] = alpha[diff[..., 0][inside] + span, diff[..., 1][inside] + span] / TWO_PI
    return Q


def _line_measure(region: RegionSpec, im: np.ndarray, re_start: np.ndarray, samples: int = 2000) -> np.ndarray:
    """Length of {s >= 0 : s + re_start + i im in region} for each point"""
    if region.kind == "rectangle":
        a, b, c, d = region.bounds
        lo = np.maximum(a - re_start, 0.0)
        hi = b - re_start
        length = np.clip(hi - lo, 0.0, None)
        return np.where((im >= c) & (im <= d), length, 0.0)
    _, x1, _, _ = region.box
    span = np.maximum(x1 - re_start, 0.0)
    t = (np.arange(samples) + 0.5) / samples
    pts = re_start[..., None] + span[..., None] * t + 1j * im[..., None]
    return region.contains(pts).mean(axis=-1) * span


def torus_volume(V: TorusPotential, region: RegionSpec, resolution: Optional[int] = None) -> float:
    """Measure of {(x, xi) in T^2 x R^2 : |xi|^2 + V(x) in region}.

    The xi-integral reduces to pi times a length in s = |xi|^2; x uses the midpoint rule.
    """
    resolution = TORUS_CONFIG["volume_resolution"] if resolution is None else resolution
    x = TWO_PI * (np.arange(resolution) + 0.5) / resolution
    values = V(x[:, None], x[None, :])
    lengths = _line_measure(region, values.imag, values.real)
    return float(np.pi * lengths.sum() * (TWO_PI / resolution) ** 2)


@dataclass(frozen=True)
class TorusConfig:
    potential: TorusPotential
    region: RegionSpec
    h: float = 0.15
    K2: int = 10
    trials: int = 10
    delta_exponent: float = TORUS_CONFIG["delta_exponent"]
    L: float = TORUS_CONFIG["L"]
    seed: int = 0
    calibration: float = WEYL_CONFIG["calibration_constant"]
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", key_path="trials")
        if not self.potential.is_even():
            raise HypothesisViolation("V must be even so that p(x, -xi) = p(x, xi)")

    @classmethod
    def from_config(cls, tree: dict, seed: int = 0, workers: int = 1) -> "TorusConfig":
        return cls(
            potential=potential_from_config(tree["potential"]),
            region=RegionSpec.from_config(tree["region"]),
            h=float(tree["h"]),
            K2=int(tree["K2"]),
            trials=int(tree.get("trials", 10)),
            delta_exponent=float(tree.get("delta_exponent", TORUS_CONFIG["delta_exponent"])),
            L=float(tree.get("L", TORUS_CONFIG["L"])),
            seed=int(seed),
            workers=int(workers),
        )


def torus2d_demo(config: TorusConfig) -> WeylResult:
    """Monte-Carlo counts in the region against vol / (2 pi h)^2, with the delta = 0 baseline"""
    h = config.h
    P = assemble_torus(config.potential, h, config.K2)
    volume = torus_volume(config.potential, config.region)
    prediction = volume / (TWO_PI * h) ** 2
    delta = h ** config.delta_exponent
    eps, bound_scale = window_parameters(h, delta)
    ring_width = config.region.boundary_tolerance or h

    baseline, _ = count_in_region(eig(P).eigenvalues, config.region, ring_width)
    logger.info(f"torus demo h={h:g}, K2={config.K2}: prediction={prediction:.2f}, baseline={baseline}")

    def trial(t):
        seed_t = derive_seed(config.seed, "torus", t)
        Q = multiplicative_perturbation(h, config.K2, config.L, seed_t)
        count, ring = count_in_region(eig(P + delta * Q).eigenvalues, config.region, ring_width)
        return {"h": h, "delta": delta, "trial": t, "count": count, "ring_count": ring,
                "prediction": prediction, "epsilon": eps, "bound_scale": bound_scale, "seed": seed_t}

    frame = pd.DataFrame(ordered_map(trial, range(config.trials), config.workers), columns=RESULT_COLUMNS)
    metadata = {"volume": volume, "baseline_count": baseline, "dimension": P.shape[0],
                "note": "desk-scale consistency demo; asymptotic rates are not resolved"}
    return WeylResult(frame, summarize(frame, config.calibration), config.calibration, metadata)
