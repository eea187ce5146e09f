"""Gaussian random perturbations and Monte-Carlo eigenvalue counts against the Weyl prediction.

P_delta = P + delta Q_w with Q_w u = sum alpha_{j,k} (u | e^k) e^j over |j|, |k| <= floor(C1/h),
alpha_{j,k} independent standard complex Gaussians.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from config import TOLERANCES, WEYL_CONFIG
from spectral.errors import ConfigError, DimensionError, DomainError, TruncationError
from spectral.grushin import WkbGauge, perturbed_effective_function, singular_pair
from spectral.linalg import eig
from spectral.operators import FourierOperator, assemble
from spectral.parallel import ordered_map
from spectral.regions import RegionSpec
from spectral.rng import complex_normal, derive_seed, make_generator
from spectral.symbols import Symbol1D, symbol_from_config, weyl_volume
from spectral.zero_count import ContourSpec, HolomorphicSampler, argument_count

RESULT_COLUMNS = ["h", "delta", "trial", "count", "ring_count", "prediction",
                  "epsilon", "bound_scale", "seed"]


def perturbation_cutoff(h: float, C1: float) -> int:
    return int(np.floor(C1 / h + 1e-9))


def truncation_order(h: float, C1: float, c_K: float) -> int:
    return int(np.ceil(c_K * C1 / h - 1e-9))


@dataclass(frozen=True)
class GaussianPerturbation:
    h: float
    C1: float
    cutoff: int
    alpha: np.ndarray = field(repr=False)
    seed: int = 0
    hs_norm: float = 0.0

    def embed(self, K: int) -> np.ndarray:
        """Zero-padded (2K+1)-square matrix of Q_w in the e^k basis"""
        N = self.cutoff
        if N > K:
            raise DimensionError(f"perturbation block N_c={N} does not embed into K={K}")
        Q = np.zeros((2 * K + 1, 2 * K + 1), dtype=complex)
        Q[K - N:K + N + 1, K - N:K + N + 1] = self.alpha
        return Q


def sample_perturbation(h: float, C1: float, seed: int) -> GaussianPerturbation:
    N = perturbation_cutoff(h, C1)
    if N < 1:
        raise ConfigError(f"floor(C1/h) = {N} < 1", key_path="C1")
    rng = make_generator(seed, "perturbation")
    alpha = complex_normal(rng, (2 * N + 1, 2 * N + 1))
    alpha.setflags(write=False)
    hs = float(np.sqrt(np.sum(np.abs(alpha) ** 2)))
    return GaussianPerturbation(float(h), float(C1), N, alpha, int(seed), hs)


def tail_bound(sigmas: Sequence[float], x: float, C0: float = 2.0) -> float:
    """Bound on P(sum |X_j|^2 >= x) for independent X_j ~ N_C(0, sigma_j^2)"""
    sig2 = np.asarray(sigmas, dtype=float) ** 2
    if sig2.size == 0:
        raise DomainError("sigmas must be non-empty")
    if x < 0:
        raise DomainError("x must be nonnegative")
    s1 = float(sig2.max())
    exponent = C0 / (2 * s1) * float(sig2.sum()) - x / (2 * s1)
    return float(min(1.0, np.exp(exponent)))


def chi_square_exceedance(sigmas: Sequence[float], x_values: Sequence[float], samples: int,
                          seed: int) -> pd.DataFrame:
    """Empirical P(sum |X_j|^2 >= x) next to tail_bound"""
    rng = make_generator(seed, "tail-bound")
    sig = np.asarray(sigmas, dtype=float)
    X = complex_normal(rng, (samples, len(sig))) * sig[None, :]
    sums = np.sum(np.abs(X) ** 2, axis=1)
    rows = [{"x": float(x), "empirical": float(np.mean(sums >= x)), "bound": tail_bound(sig, x)}
            for x in x_values]
    return pd.DataFrame(rows)


def effective_variance(op: FourierOperator, z: complex, C1: float, data=None) -> float:
    """sigma^2 = (sum_{|j|<=N_c} |e0_j|^2)(sum_{|k|<=N_c} |f0_k|^2)"""
    data = singular_pair(op, z) if data is None else data
    mask = np.abs(op.modes) <= perturbation_cutoff(op.h, C1)
    return float(np.sum(np.abs(data.e0[mask]) ** 2) * np.sum(np.abs(data.f0[mask]) ** 2))


# Experiments ---------------------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    symbol: Symbol1D
    region: RegionSpec
    h_list: Sequence[float]
    trials: int = WEYL_CONFIG["trials"]
    seed: int = 0
    delta_exponent: float = WEYL_CONFIG["delta_exponent"]
    C1: float = WEYL_CONFIG["C1"]
    c_K: float = WEYL_CONFIG["c_K"]
    unperturbed: bool = False
    calibration: float = WEYL_CONFIG["calibration_constant"]
    check_truncation: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", key_path="trials")
        if not self.unperturbed and self.delta_exponent <= WEYL_CONFIG["min_delta_exponent"]:
            raise ConfigError(f"delta exponent must exceed {WEYL_CONFIG['min_delta_exponent']}",
                              key_path="delta_exponent")
        if not self.h_list or min(self.h_list) <= 0:
            raise ConfigError("h_list must hold positive values", key_path="h_list")

    @classmethod
    def from_config(cls, tree: dict, seed: int = 0, workers: int = 1) -> "ExperimentConfig":
        return cls(
            symbol=symbol_from_config(tree["symbol"]),
            region=RegionSpec.from_config(tree["region"]),
            h_list=[float(h) for h in tree["h_list"]],
            trials=int(tree.get("trials", WEYL_CONFIG["trials"])),
            seed=int(seed),
            delta_exponent=float(tree.get("delta_exponent", WEYL_CONFIG["delta_exponent"])),
            C1=float(tree.get("C1", WEYL_CONFIG["C1"])),
            c_K=float(tree.get("c_K", WEYL_CONFIG["c_K"])),
            unperturbed=bool(tree.get("unperturbed", False)),
            workers=int(workers),
        )

    def delta(self, h: float) -> float:
        return 0.0 if self.unperturbed else h ** self.delta_exponent


@dataclass
class WeylResult:
    frame: pd.DataFrame
    summary: pd.DataFrame
    calibration: float
    metadata: Dict = field(default_factory=dict)

    def fraction_within(self, h: float) -> float:
        return float(self.summary.set_index("h").loc[h, "fraction_within"])


def window_parameters(h: float, delta: float):
    """(epsilon, bound_scale) = (h ln(1/delta), sqrt(epsilon)/h); NaN without perturbation"""
    if delta <= 0:
        return np.nan, np.nan
    eps = h * np.log(1.0 / delta)
    return float(eps), float(np.sqrt(eps) / h)


def count_in_region(eigenvalues: np.ndarray, region: RegionSpec, ring_width: float):
    """Eigenvalues in the closed region, and those of them within ring_width of the boundary"""
    inside = region.contains(eigenvalues)
    ring = inside & (region.distance_to_boundary(eigenvalues) < ring_width)
    return int(inside.sum()), int(ring.sum())


def _check_trace(M: np.ndarray, eigenvalues: np.ndarray):
    gap = abs(np.trace(M) - np.sum(eigenvalues))
    if gap > TOLERANCES["tol_eig"] * max(np.linalg.norm(M), 1.0) * M.shape[0]:
        logger.warning(f"trace mismatch {gap:.2e} between matrix and eigenvalue sum")


def _assemble_guarded(symbol, h, K):
    try:
        return assemble(symbol, h, K)
    except DimensionError as exc:
        raise DimensionError(f"{exc}; use a larger h or a smaller C1") from exc


def perturbed_matrix(op: FourierOperator, delta: float, pert: Optional[GaussianPerturbation]) -> np.ndarray:
    if pert is None or delta == 0:
        return np.array(op.matrix)
    return op.matrix + delta * pert.embed(op.K)


def run_weyl_experiment(config: ExperimentConfig) -> WeylResult:
    """Counts of eig(P_delta) in the region for every (h, trial)"""
    volume = weyl_volume(config.symbol, config.region)
    ring_width_base = config.region.boundary_tolerance
    rows: List[dict] = []
    truncation_mismatches = []

    for h in config.h_list:
        K = truncation_order(h, config.C1, config.c_K)
        op = _assemble_guarded(config.symbol, h, K)
        delta = config.delta(h)
        eps, bound_scale = window_parameters(h, delta)
        prediction = volume / (2 * np.pi * h)
        ring_width = ring_width_base if ring_width_base > 0 else h
        logger.info(f"weyl experiment h={h:g}: K={K}, delta={delta:.3g}, "
                    f"prediction={prediction:.2f}, trials={config.trials}")

        def trial(t, h=h, op=op, delta=delta):
            seed_t = derive_seed(config.seed, f"weyl-h{h!r}", t)
            pert = None if config.unperturbed else sample_perturbation(h, config.C1, seed_t)
            M = perturbed_matrix(op, delta, pert)
            ev = eig(M).eigenvalues
            _check_trace(M, ev)
            count, ring = count_in_region(ev, config.region, ring_width)
            return count, ring, seed_t, pert

        results = ordered_map(trial, range(config.trials), config.workers)
        for t, (count, ring, seed_t, _) in enumerate(results):
            rows.append({"h": h, "delta": delta, "trial": t, "count": count, "ring_count": ring,
                         "prediction": prediction, "epsilon": eps, "bound_scale": bound_scale,
                         "seed": seed_t})

        if config.check_truncation:
            mismatch = _truncation_check(config, h, K, delta, results[0], ring_width)
            if mismatch is not None:
                truncation_mismatches.append(mismatch)

    frame = pd.DataFrame(rows, columns=RESULT_COLUMNS)
    summary = summarize(frame, config.calibration)
    metadata = {
        "volume": volume,
        "truncation_mismatches": truncation_mismatches,
        "multiplicity": "algebraic multiplicities of the truncated matrix are assumed to track the operator",
    }
    return WeylResult(frame, summary, config.calibration, metadata)


def _truncation_check(config, h, K, delta, first, ring_width):
    K_big = int(np.ceil(WEYL_CONFIG["truncation_factor"] * K))
    try:
        op_big = _assemble_guarded(config.symbol, h, K_big)
    except (DimensionError, TruncationError) as exc:
        logger.warning(f"truncation check skipped at h={h:g}: {exc}")
        return None
    count, _, _, pert = first
    ev = eig(perturbed_matrix(op_big, delta, pert)).eigenvalues
    count_big, _ = count_in_region(ev, config.region, ring_width)
    if count_big != count:
        logger.warning(f"truncation sensitivity at h={h:g}: K={K} gives {count}, K={K_big} gives {count_big}")
        return {"h": h, "K": K, "count": count, "K_big": K_big, "count_big": count_big}
    return None


def summarize(frame: pd.DataFrame, calibration: float) -> pd.DataFrame:
    """Per-h median/mean/deviation of count - prediction and the calibrated in-window fraction"""
    frame = frame.assign(dev=frame["count"] - frame["prediction"])
    frame = frame.assign(rel=frame["dev"].abs() / frame["prediction"].where(frame["prediction"] > 0))
    frame = frame.assign(within=frame["dev"].abs() <= calibration * frame["bound_scale"])
    grouped = frame.groupby("h", sort=False)
    return pd.DataFrame({
        "h": list(grouped.groups.keys()),
        "median_deviation": grouped["dev"].median().values,
        "mean_deviation": grouped["dev"].mean().values,
        "std_deviation": grouped["dev"].std(ddof=1).fillna(0.0).values,
        "median_relative_deviation": grouped["rel"].median().values,
        "mean_count": grouped["count"].mean().values,
        "fraction_within": grouped["within"].mean().values,
    })


# Effective-function counting -------------------------------------------------

def effective_function_count(op: FourierOperator, region: RegionSpec, delta: float,
                             pert: GaussianPerturbation, spacing: Optional[float] = None,
                             gauge=None) -> dict:
    """Winding of E_-+^delta along the region boundary against the eig count of P_delta inside.

    The default gauge follows the WKB quasimodes, which vary continuously over the region.
    """
    gauge = WkbGauge.for_operator(op) if gauge is None else gauge
    spacing = op.h / 4 if spacing is None else spacing
    Q = pert.embed(op.K)

    def E(z):
        return perturbed_effective_function(op, z, Q, delta, gauge=gauge)

    contour = ContourSpec.from_region(region, spacing)
    report = argument_count(HolomorphicSampler(E, name="E_delta"), contour)
    ev = eig(op.matrix + delta * Q).eigenvalues
    eig_count = int(np.sum(region.contains(ev) & (region.distance_to_boundary(ev) > 0)))
    eps, bound_scale = window_parameters(op.h, delta)
    mass = weyl_volume(op.symbol, region) / (2 * np.pi * op.h)
    return {"winding_count": report.count, "eig_count": eig_count, "mass": mass,
            "deviation": abs(report.count - mass), "bound_scale": bound_scale, "epsilon": eps}


def lower_bound_sample(op: FourierOperator, z: complex, delta: float, trials: int, seed: int,
                       C1: float) -> np.ndarray:
    """|E_-+^delta(z)| over independent perturbations at a fixed interior point"""
    base = singular_pair(op, z)
    out = np.empty(trials)
    for t in range(trials):
        pert = sample_perturbation(op.h, C1, derive_seed(seed, "lower-bound", t))
        out[t] = abs(perturbed_effective_function(op, z, pert.embed(op.K), delta, base=base))
    return out


def lower_bound_check(op: FourierOperator, z: complex, delta: float, trials: int, seed: int,
                      C1: float, calibration: float = None, quantile: float = 0.05):
    """Low quantile of |E_-+^delta(z)| against delta e^{-C epsilon/h}, epsilon = h ln(1/delta)"""
    calibration = WEYL_CONFIG["calibration_constant"] if calibration is None else calibration
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    values = lower_bound_sample(op, z, delta, trials, seed, C1)
    eps, _ = window_parameters(op.h, delta)
    threshold = delta * np.exp(-calibration * eps / op.h)
    low = float(np.quantile(values, quantile))
    if low <= threshold:
        logger.warning(f"|E_-+^delta| quantile {low:.3e} at z={z} below {threshold:.3e}")
    frame = pd.DataFrame({"trial": np.arange(trials), "abs_E": values})
    return frame, {"quantile": low, "threshold": float(threshold), "holds": bool(low > threshold)}
