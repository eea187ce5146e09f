"""Command-line entry: one subcommand per experiment, each writing CSV/SVG artifacts and a manifest.

    python cli.py pseudospec --set h=0.05 --set K=80 --out runs/ps
    python cli.py weyl-mc --config runs/wm/manifest.json
"""
import argparse
import sys
import time
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from config import DEFAULT_OUTPUT_DIR, default_worker_count
from spectral.errors import ConfigError, SpectralLabError
from utils.artifacts import ArtifactWriter
from utils.database import RunRegistry
from utils.logger import setup_logging
from utils.validators import load_config_file, require, resolve_config, validate_h, validate_positive


def _complex(pair):
    if isinstance(pair, (list, tuple)) and len(pair) == 2:
        return complex(float(pair[0]), float(pair[1]))
    raise ConfigError("expected a [re, im] pair", key_path=str(pair))


# Subcommands ------------------------------------------------------------------
# Each takes (cfg, writer, seed, workers) and returns a dict of summary results.

def run_pseudospec(cfg, writer, seed, workers):
    from spectral.linalg import eig
    from spectral.operators import assemble
    from spectral.pseudospectrum import GridSpec, components_without_eigenvalues, level_contours, scan
    from spectral.symbols import symbol_from_config

    require(validate_h(cfg["h"]), "h")
    op = assemble(symbol_from_config(cfg["symbol"]), float(cfg["h"]), int(cfg["K"]))
    grid = GridSpec.from_config(cfg["grid"])
    field_ = scan(op, grid, workers)
    writer.write_csv("pseudospec.csv", field_.to_frame())

    eigenvalues = eig(op.matrix).eigenvalues
    writer.write_csv("eigenvalues.csv", pd.DataFrame({"re": eigenvalues.real, "im": eigenvalues.imag}))
    eps_list = [float(e) for e in cfg["eps_list"]]
    contours = level_contours(field_, eps_list)
    writer.write_svg("contours.svg", {f"{e:g}": contours[e] for e in eps_list},
                     (grid.re_min, grid.re_max, grid.im_min, grid.im_max))
    empty = {f"{e:g}": len(components_without_eigenvalues(field_, eigenvalues, e)) for e in eps_list}
    return {"failed_nodes": len(field_.failed_nodes), "components_without_eigenvalues": empty}


def run_quasimode(cfg, writer, seed, workers):
    from spectral.operators import assemble
    from spectral.linalg import smallest_singular
    from spectral.quasimode import build_quasimode, fit_decay_rate, residual
    from spectral.symbols import Symbol1D, periodic_from_config

    g = periodic_from_config(cfg["g"])
    z = _complex(cfg["z"])
    hs = [float(h) for h in cfg["h_list"]]
    for h in hs:
        require(validate_h(h), "h_list")
    symbol = Symbol1D.first_order(g)
    rows, last = [], None
    for h in hs:
        qm = build_quasimode(g, z, h)
        op = assemble(symbol, h, qm.K)
        r = residual(op, qm)
        smin = smallest_singular(op.shifted(z)).s_min
        rows.append({"h": h, "K": qm.K, "residual": r, "smin": smin, "peak": qm.peak(),
                     "x_plus": qm.x_plus, "spread": qm.spread()})
        last = qm
    frame = pd.DataFrame(rows)
    frame["ratio"] = frame["residual"] / frame["residual"].shift(1)
    writer.write_csv("quasimode_residuals.csv", frame)
    writer.write_csv("quasimode_profile.csv", last.to_frame())
    profile = last.x + 1j * np.abs(last.samples)
    writer.write_svg("quasimode_profile.svg", {f"h={last.h:g}": [profile]},
                     (0.0, 2 * np.pi, 0.0, float(np.abs(last.samples).max()) * 1.05))
    results = {"x_plus": last.x_plus, "bracket_plus": last.crossing.bracket_plus}
    if len(hs) >= 2:
        fit = fit_decay_rate(frame["h"], frame["residual"])
        results.update({"decay_rate": fit.rate, "r_squared": fit.r_squared})
    return results


def run_grushin_map(cfg, writer, seed, workers):
    from spectral.grushin import grushin_map
    from spectral.operators import assemble
    from spectral.pseudospectrum import GridSpec
    from spectral.symbols import symbol_from_config

    op = assemble(symbol_from_config(cfg["symbol"]), float(cfg["h"]), int(cfg["K"]))
    grid = GridSpec.from_config(cfg["grid"])
    frame = grushin_map(op, grid.nodes.ravel(), workers=workers)
    writer.write_csv("grushin_map.csv", frame)
    ok = frame.dropna()
    modulus_gap = float(np.max(np.abs(np.hypot(ok["reEmp"], ok["imEmp"]) - ok["t0"]) / np.maximum(ok["t0"], 1e-300))) \
        if len(ok) else float("nan")
    return {"nodes": len(frame), "failed": int(frame["t0"].isna().sum()), "max_relative_modulus_gap": modulus_gap}


def run_dbar_check(cfg, writer, seed, workers):
    from spectral.grushin import dbar_residual, symplectic_density_check
    from spectral.operators import assemble
    from spectral.symbols import symbol_from_config

    op = assemble(symbol_from_config(cfg["symbol"]), float(cfg["h"]), int(cfg["K"]))
    z = _complex(cfg["z"])
    rows = []
    for step in cfg["steps"]:
        s = dbar_residual(op, z, float(step))
        rows.append({"step": s.step, "f_re": s.f_estimate.real, "f_im": s.f_estimate.imag,
                     "residual": s.identity_residual, "scale": s.scale, "relative": s.relative_residual})
    writer.write_csv("dbar.csv", pd.DataFrame(rows))
    lhs, rhs = symplectic_density_check(op, z, float(cfg["steps"][0]))
    writer.write_csv("symplectic_density.csv", pd.DataFrame([{"h": op.h, "lhs": lhs, "rhs": rhs}]))
    return {"lhs": lhs, "rhs": rhs}


def run_weyl_mc(cfg, writer, seed, workers):
    from spectral.random_weyl import ExperimentConfig, run_weyl_experiment

    result = run_weyl_experiment(ExperimentConfig.from_config(cfg, seed, workers))
    writer.write_csv("weyl.csv", result.frame)
    writer.write_csv("weyl_summary.csv", result.summary)
    return {"calibration": result.calibration, **result.metadata}


def run_weyl_2d(cfg, writer, seed, workers):
    from spectral.torus import TorusConfig, torus2d_demo

    result = torus2d_demo(TorusConfig.from_config(cfg, seed, workers))
    writer.write_csv("weyl2d.csv", result.frame)
    writer.write_csv("weyl2d_summary.csv", result.summary)
    return {"calibration": result.calibration, **result.metadata}


def run_zero_count(cfg, writer, seed, workers):
    from spectral.zero_count import ContourSpec, HolomorphicSampler, argument_count, jensen_bound

    zeros = [_complex(z) for z in cfg["zeros"]]
    c = _complex(cfg["exponential"])

    def f(z):
        return np.prod([z - w for w in zeros]) * np.exp(c * z)

    contour_cfg = cfg["contour"]
    center = _complex(contour_cfg["center"])
    radius = float(contour_cfg["radius"])
    contour = ContourSpec.circle(center, radius, int(contour_cfg["nodes"]))
    report = argument_count(HolomorphicSampler(f), contour, workers)
    results = {"count": report.count}
    try:
        results["jensen_bound"] = jensen_bound(f, center, radius, 2 * radius)
    except SpectralLabError as exc:
        logger.warning(f"jensen bound skipped: {exc}")
    writer.write_csv("zero_count.csv", report.to_frame())
    return results


def run_hager_verify(cfg, writer, seed, workers):
    from spectral.regions import RegionSpec
    from spectral.zero_count import hager_verify, lattice_product

    h = float(cfg["h"])
    require(validate_positive(h, "h"), "h")
    eps = h if cfg.get("eps") is None else float(cfg["eps"])
    region = RegionSpec.from_config(cfg["region"])
    x0, x1, y0, y1 = region.box
    window = RegionSpec.rectangle(x0 - 0.5, x1 + 0.5, y0 - 0.5, y1 + 0.5)
    sampler, _ = lattice_product(h, window)
    report = hager_verify(sampler, lambda z: 0.5 * np.abs(z) ** 2, region, h, eps, workers=workers)
    writer.write_csv("hager.csv", report.to_frame())
    return {"count": report.count, **report.weyl_compare}


def run_resolvent_scan(cfg, writer, seed, workers):
    from spectral.oscillator import boundary_growth, build_rotated_oscillator, contrast_ratio, resolvent_scan

    op = build_rotated_oscillator(int(cfg["n"]))
    lambdas = [float(v) for v in cfg["lambdas"]]
    frame = resolvent_scan(op, lambdas, [float(v) for v in cfg["mus"]], workers=workers)
    writer.write_csv("resolvent.csv", frame)
    curve, slope = boundary_growth(op, lambdas, workers=workers)
    writer.write_csv("boundary_curve.csv", curve)
    return {"flagged": int(frame["flag"].sum()), "boundary_slope": slope,
            "contrast": contrast_ratio(op, float(cfg["contrast_lambda"]))}


def run_rescale_check(cfg, writer, seed, workers):
    from spectral.oscillator import rescaling_check

    lam, mu = float(cfg["lam"]), float(cfg["mu"])
    lhs, rhs = rescaling_check(lam, mu, int(cfg["K"]))
    rel = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    writer.write_csv("rescale.csv", pd.DataFrame([{"lambda": lam, "mu": mu, "lhs": lhs, "rhs": rhs,
                                                   "relative": rel}]))
    return {"relative": rel}


def run_tail_bound_mc(cfg, writer, seed, workers):
    from spectral.operators import assemble
    from spectral.random_weyl import chi_square_exceedance, lower_bound_check
    from spectral.symbols import symbol_from_config

    frame = chi_square_exceedance(cfg["sigmas"], cfg["x_values"], int(cfg["samples"]), seed)
    writer.write_csv("tail_bound.csv", frame)
    lb = cfg["lower_bound"]
    h = float(lb["h"])
    op = assemble(symbol_from_config(lb["symbol"]), h, int(lb["K"]))
    samples, verdict = lower_bound_check(op, _complex(lb["z"]), h ** float(lb["delta_exponent"]),
                                         int(lb["trials"]), seed, float(lb["C1"]))
    writer.write_csv("lower_bound.csv", samples)
    return {"violations": int((frame["empirical"] > frame["bound"]).sum()),
            "lower_bound_quantile": verdict["quantile"], "lower_bound_threshold": verdict["threshold"]}


SUBCOMMANDS = {
    "pseudospec": run_pseudospec,
    "quasimode": run_quasimode,
    "grushin-map": run_grushin_map,
    "dbar-check": run_dbar_check,
    "weyl-mc": run_weyl_mc,
    "weyl-2d": run_weyl_2d,
    "zero-count": run_zero_count,
    "hager-verify": run_hager_verify,
    "resolvent-scan": run_resolvent_scan,
    "rescale-check": run_rescale_check,
    "tail-bound-mc": run_tail_bound_mc,
}


# Argument handling ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run config or a manifest.json of an earlier run")
    common.add_argument("--seed", type=int, default=None, help="64-bit master seed (default 0)")
    common.add_argument("--workers", type=int, default=None, help="worker threads (env SPECLAB_WORKERS)")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key; dotted paths reach nested keys")
    common.add_argument("--log-level", default=None)
    common.add_argument("--registry", default=None, help="sqlite run registry path")

    parser = argparse.ArgumentParser(prog="speclab", description="Spectral instability laboratory")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=f"run {name}")
    runs = sub.add_parser("runs", help="list recorded runs")
    runs.add_argument("--registry", default=None)
    runs.add_argument("--limit", type=int, default=20)
    return parser


def _registry_path(args):
    if args.registry:
        return Path(args.registry)
    return Path(DEFAULT_OUTPUT_DIR) / "speclab_runs.db"


def dispatch(args) -> int:
    """Resolve the config, run the subcommand, write artifacts; returns the exit code"""
    if args.subcommand == "runs":
        registry = RunRegistry(_registry_path(args))
        print(registry.list_runs(limit=args.limit).to_string(index=False))
        return 0

    started = datetime.now()
    clock = time.perf_counter()
    cfg, seed, out_dir, writer = None, 0, None, None
    workers = args.workers if args.workers is not None else default_worker_count()
    try:
        tree, manifest = (None, None)
        if args.config:
            tree, manifest = load_config_file(args.config)
            if manifest is not None and manifest["subcommand"] != args.subcommand:
                raise ConfigError(f"manifest belongs to '{manifest['subcommand']}'", key_path="--config")
        seed = args.seed if args.seed is not None else (manifest or {}).get("seed", 0)
        if not 0 <= int(seed) < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer", key_path="--seed")
        cfg = resolve_config(args.subcommand, tree, args.overrides)
        out_dir = Path(args.out) if args.out else Path(DEFAULT_OUTPUT_DIR) / args.subcommand
        writer = ArtifactWriter(out_dir, args.subcommand, cfg, int(seed), workers)
        logger.info(f"{args.subcommand}: seed={seed}, workers={workers}, out={out_dir}")
        results = SUBCOMMANDS[args.subcommand](cfg, writer, int(seed), workers)
        writer.write_manifest(results)
        code, message = 0, None
    except SpectralLabError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        code, message = exc.exit_code, str(exc)
    except (KeyError, TypeError, ValueError) as exc:  # malformed config values (missing keys, failed casts)
        logger.error(f"invalid configuration: {exc}")
        code, message = ConfigError.exit_code, str(exc)

    registry = RunRegistry(_registry_path(args))
    registry.record_run(args.subcommand, seed, workers, out_dir, cfg, started,
                        time.perf_counter() - clock, code,
                        writer.artifacts if writer else None, message)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, "log_level", None))
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
