import os
from pathlib import Path

# Application Configuration
APP_CONFIG = {
    "name": "SpecLab",
    "tagline": "Spectral Instability & Random Perturbation Laboratory",
    "version": "1.0.0",
    "description": "Pseudospectra, quasimodes, Grushin problems and Weyl statistics",
    "logo": "∿",
    "colors": {
        "primary": "#2E86AB",
        "secondary": "#A23B72",
        "success": "#F18F01",
        "background": "#F8F9FA"
    },
}


# Paths
BASE_DIR = Path(__file__).parent
DEFAULT_OUTPUT_DIR = BASE_DIR / "runs"

# Numerics kernel tolerances (one record for every accuracy contract)
TOLERANCES = {
    "tol_eig": 1e-9,           # eigen-residual relative to ||A||_F
    "tol_svd": 1e-10,          # singular-triplet residual relative to ||A||_F
    "tol_hermitian": 1e-12,    # Hermitian check relative to ||A||_F
    "tol_hermitian_residual": 1e-10,
    "tol_solve": 1e-10,
    "max_condition": 1e14,
    "max_dimension": 4000,
    "dense_svd_limit": 512,    # full SVD below, inverse iteration above
    "stagnation_steps": 50,
    "max_inverse_iterations": 500,
}

# Symbol and assembly configuration
SYMBOL_CONFIG = {
    "grid_order": 16,           # K of the coefficient grid (2K+1 nodes)
    "bandwidth_threshold": 1e-13,
    "volume_resolution": 400,
    "volume_subsamples": 4,     # boundary cells refined 4x4
}

PSEUDOSPEC_CONFIG = {
    "eigen_tolerance": 1e-12,   # witness returns Q = 0 below this s_min
    "nan_sentinel": float("nan"),
}

QUASIMODE_CONFIG = {
    "modes_per_inverse_h": 8,   # K = ceil(8/h)
    "cutoff_arc_fraction": 0.45,
    "flat_fraction": 0.7,
    "crossing_samples": 4096,
    "crossing_tolerance": 1e-10,
}

GRUSHIN_CONFIG = {
    "degenerate_t0": 1e-13,     # relative to ||P||_F
    "modulus_tolerance": 1e-8,
    "block_residual": 1e-9,
    "gauge_overlap": 0.9,
    "default_step": 1e-3,
    "schur_min_t0": 1e-10,     # Schur cross-check only where cond(P - z) < 1e10
    "schur_tolerance": 1e-6,
}

WEYL_CONFIG = {
    "C1": 2.0,
    "c_K": 2.0,
    "delta_exponent": 4.0,      # delta = h ** 4
    "min_delta_exponent": 2.5,
    "calibration_constant": 2.0,
    "truncation_factor": 1.5,
    "trials": 20,
}

TORUS_CONFIG = {
    "max_axis_modes": 12,
    "L": 1.0,
    "delta_exponent": 4.0,
    "volume_resolution": 200,
}

ZERO_COUNT_CONFIG = {
    "refinement_limit": 12,
    "min_modulus_guard": 1e-300,
    "max_phase_jump": 1.5707963267948966,   # pi / 2
    "phase_rate_mismatch": 0.7853981633974483,  # pi / 4, jump vs trapezoid of the phase rates
    "phase_rate_step": 1e-6,    # in contour parameter units
    "winding_tolerance": 0.1,
    "calibration_constant": 5.0,
    "holomorphy_tolerance": 1e-5,
}

RESOLVENT_CONFIG = {
    "guard": 3.0,
    "sensitivity_factor": 1.5,
    "sensitivity_threshold": 0.05,
    "sensitivity_stride": 3,    # every third cell rechecked at 1.5n
    "C1": 0.5,                  # mu = C1 lambda^{1/3} (ln lambda)^{2/3}
    "contrast_mu_ratio": 0.5,
}

# Performance Configuration
PERFORMANCE_CONFIG = {
    "default_workers": 1,
    "cache_ttl": 300,  # seconds, dashboard caches
}

# Logging Configuration
LOGGING_CONFIG = {
    "level": "INFO",
    "format": "<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {name}:{function} - {message}",
    "file": None,
    "max_file_size": 10 * 1024 * 1024,  # 10MB
    "backup_count": 5
}

# Default parameter trees per CLI subcommand. Unknown keys are rejected
# against these trees, so every accepted key must appear here.
_G_EXP = {"name": "exp_ix", "amplitude": 1.0}

CLI_DEFAULTS = {
    "pseudospec": {
        "symbol": dict(_G_EXP),
        "h": 0.1, "K": 40,
        "grid": {"re_min": -1.5, "re_max": 1.5, "im_min": -1.2, "im_max": 1.2, "nx": 41, "ny": 33},
        "eps_list": [1e-8, 1e-4, 1e-2],
    },
    "quasimode": {
        "g": dict(_G_EXP),
        "z": [0.0, 0.5],
        "h_list": [0.1, 0.05, 0.025, 0.0125],
    },
    "grushin-map": {
        "symbol": dict(_G_EXP),
        "h": 0.1, "K": 40,
        "grid": {"re_min": -0.5, "re_max": 0.5, "im_min": -0.6, "im_max": 0.6, "nx": 20, "ny": 20},
    },
    "dbar-check": {
        "symbol": dict(_G_EXP),
        "h": 0.05, "K": 80,
        "z": [0.1, 0.45],
        "steps": [1e-3, 5e-4],
    },
    "weyl-mc": {
        "symbol": dict(_G_EXP),
        "region": {"kind": "rectangle", "bounds": [-1.0, 1.0, -0.5, 0.5], "boundary_tolerance": 0.0},
        "h_list": [0.02],
        "trials": 20,
        "delta_exponent": 4.0,
        "C1": 2.0,
        "c_K": 2.0,
        "unperturbed": False,
    },
    "weyl-2d": {
        "potential": {"name": "cos_sum", "amplitude": 1.0},
        "region": {"kind": "rectangle", "bounds": [0.5, 1.5, -0.5, 0.5], "boundary_tolerance": 0.0},
        "h": 0.15, "K2": 10,
        "trials": 10,
        "delta_exponent": 4.0,
        "L": 1.0,
    },
    "zero-count": {
        "zeros": [[0.3, 0.0], [0.0, -0.4]],
        "exponential": [0.0, 1.0],
        "contour": {"center": [0.0, 0.0], "radius": 1.0, "nodes": 64},
    },
    "hager-verify": {
        "h": 0.01,
        "eps": None,
        "region": {"kind": "rectangle", "bounds": [0.0, 1.0, 0.0, 1.0], "boundary_tolerance": 0.0},
    },
    "resolvent-scan": {
        "n": 256,
        "lambdas": [10.0, 20.0, 40.0, 80.0],
        "mus": [0.0, 2.0, 4.0, 6.0],
        "contrast_lambda": 40.0,
    },
    "rescale-check": {
        "lam": 20.0, "mu": 3.0, "K": 600,
    },
    "tail-bound-mc": {
        "sigmas": [1.0, 1.0, 1.0, 1.0, 1.0],
        "x_values": [5.0, 10.0, 20.0],
        "samples": 100000,
        "lower_bound": {
            "symbol": dict(_G_EXP),
            "h": 0.1, "K": 40,
            "z": [0.0, 0.5],
            "delta_exponent": 4.0,
            "trials": 500,
            "C1": 2.0,
        },
    },
}


# Environment Variables
def get_env_var(name: str, default=None):
    """Get environment variable with default fallback"""
    return os.getenv(name, default)


def default_worker_count() -> int:
    """Worker count from SPECLAB_WORKERS, falling back to the performance default"""
    raw = get_env_var("SPECLAB_WORKERS")
    if raw is None:
        return PERFORMANCE_CONFIG["default_workers"]
    try:
        return max(1, int(raw))
    except ValueError:
        return PERFORMANCE_CONFIG["default_workers"]
