import json

import pandas as pd
import pytest

from cli import main
from utils.database import RunRegistry


@pytest.fixture
def run(isolated_env):
    registry = isolated_env / "registry.db"

    def invoke(subcommand, out, *extra):
        argv = [subcommand, "--out", str(isolated_env / out), "--registry", str(registry),
                "--log-level", "WARNING", *extra]
        return main(argv)

    invoke.root = isolated_env
    invoke.registry = registry
    return invoke


def _manifest(root, out):
    return json.loads((root / out / "manifest.json").read_text())


def test_zero_count_writes_artifacts(run):
    assert run("zero-count", "zc") == 0
    manifest = _manifest(run.root, "zc")
    assert manifest["results"]["count"] == 2
    assert set(manifest["artifacts"]) == {"zero_count.csv"}
    assert pd.read_csv(run.root / "zc" / "zero_count.csv")["count"].tolist() == [2]
    assert RunRegistry(run.registry).list_runs()["exit_code"].tolist() == [0]


def test_replay_from_manifest_is_identical(run):
    assert run("tail-bound-mc", "first", "--seed", "9", "--set", "samples=5000") == 0
    first = _manifest(run.root, "first")
    assert run("tail-bound-mc", "second", "--config", str(run.root / "first" / "manifest.json")) == 0
    second = _manifest(run.root, "second")
    assert second["seed"] == 9
    assert second["artifacts"] == first["artifacts"]


def test_weyl_artifacts_do_not_depend_on_workers(run):
    args = ("--seed", "3", "--set", "h_list=[0.1]", "--set", "trials=3")
    assert run("weyl-mc", "w1", *args, "--workers", "1") == 0
    assert run("weyl-mc", "w4", *args, "--workers", "4") == 0
    assert _manifest(run.root, "w1")["artifacts"] == _manifest(run.root, "w4")["artifacts"]


def test_unknown_key_exits_with_config_error(run):
    assert run("zero-count", "bad", "--set", "zeroes=[]") == 1
    runs = RunRegistry(run.registry).list_runs()
    assert runs["exit_code"].tolist() == [1]


def test_manifest_of_another_subcommand_is_rejected(run):
    assert run("zero-count", "zc") == 0
    assert run("tail-bound-mc", "tb", "--config", str(run.root / "zc" / "manifest.json")) == 1


def test_point_outside_the_range_is_a_hypothesis_violation(run):
    assert run("quasimode", "qm", "--set", "z=[0.0, 2.0]", "--set", "h_list=[0.1]") == 3


def test_quasimode_run(run):
    assert run("quasimode", "qm", "--set", "h_list=[0.1, 0.05]") == 0
    results = _manifest(run.root, "qm")["results"]
    assert results["decay_rate"] > 0
    assert (run.root / "qm" / "quasimode_profile.svg").exists()


def test_pseudospec_run(run):
    assert run("pseudospec", "ps", "--set", "grid.nx=9", "--set", "grid.ny=7", "--set", "K=20") == 0
    frame = pd.read_csv(run.root / "ps" / "pseudospec.csv")
    assert len(frame) == 63
    assert (run.root / "ps" / "contours.svg").read_text().startswith("<svg")


def test_domain_error_is_a_numerical_failure(run):
    assert run("rescale-check", "rc", "--set", "lam=-1.0") == 2
    assert RunRegistry(run.registry).list_runs()["exit_code"].tolist() == [2]


def test_tail_bound_run_reports_the_lower_bound(run):
    assert run("tail-bound-mc", "tb", "--set", "samples=2000", "--set", "lower_bound.trials=100") == 0
    results = _manifest(run.root, "tb")["results"]
    assert results["lower_bound_quantile"] > results["lower_bound_threshold"]
    assert len(pd.read_csv(run.root / "tb" / "lower_bound.csv")) == 100
