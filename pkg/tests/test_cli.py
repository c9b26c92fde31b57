import json
import subprocess
import sys

import numpy as np
import pytest

from euler_relax import cli, fieldio, torus
from euler_relax.torus import TorusField, TorusGrid


def run_cli(tmp_path, command, config=None, seed=0, name="out"):
    args = [command, "--out", str(tmp_path / name), "--seed", str(seed)]
    if config is not None:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(config))
        args += ["--config", str(path)]
    code, _ = cli.run(args)
    report = tmp_path / name / "report.json"
    return code, json.loads(report.read_text()) if report.exists() else None


def test_symbols_passes_and_writes_csv(tmp_path):
    code, rep = run_cli(tmp_path, "symbols", {"n_samples": 500})
    assert code == 0 and rep["passed"]
    assert len((tmp_path / "out" / "symbols.csv").read_text().splitlines()) == 501


def test_symbols_tiny_tolerance_is_flagged(tmp_path):
    code, rep = run_cli(tmp_path, "symbols", {"n_samples": 50, "rank_tol": 1e-20})
    assert code == 1
    flagged = [c for c in rep["checks"] if c["name"] == "rank_tolerance_stable"][0]
    assert not flagged["passed"] and "machine epsilon" in flagged["note"]


@pytest.mark.parametrize(
    "command, config",
    [
        ("symbols", {"n_samples": 0}),
        ("symbols", {"unknown": 1}),
        ("shear", {"grid": {"n_t": 5}}),
        ("solve", {}),
        ("solve", {"fixture": "roundtrip", "input": "x.bin"}),
    ],
)
def test_config_errors_exit_2(tmp_path, command, config):
    code, _ = run_cli(tmp_path, command, config)
    assert code == 2


def test_unreadable_config_exits_2(tmp_path):
    (tmp_path / "bad.json").write_text("{not json")
    code, _ = cli.run(["symbols", "--config", str(tmp_path / "bad.json"), "--out", str(tmp_path / "o")])
    assert code == 2


@pytest.mark.parametrize("fixture", ["roundtrip", "shear"])
def test_solve_fixtures_pass(tmp_path, fixture):
    code, rep = run_cli(tmp_path, "solve", {"fixture": fixture, "grid": {"n_t": 8, "n_x": 8, "n_y": 16}})
    assert code == 0
    assert rep["checks"][0]["measured"] <= 1e-8


def test_solve_constant_fixture_is_a_precondition_failure(tmp_path):
    code, rep = run_cli(tmp_path, "solve", {"fixture": "constant"})
    assert code == 3 and rep["error"]["type"] == "MeanNotZero"


def test_solve_non_afree_input_exits_3(tmp_path):
    grid = TorusGrid(8, 8, 8)
    z = TorusField(grid, np.random.default_rng(0).normal(size=grid.shape + (6,)))
    fieldio.write_field(tmp_path / "z.bin", z - z.mean())
    code, rep = run_cli(tmp_path, "solve", {"input": str(tmp_path / "z.bin")})
    assert code == 3 and rep["error"]["measured"]["residual"] > 1e-8


def test_solve_reads_field_file_and_writes_potential(tmp_path):
    grid = TorusGrid(8, 8, 8)
    w = TorusField(grid, np.random.default_rng(1).normal(size=grid.shape + (9,)))
    fieldio.write_field(tmp_path / "z.bin", torus.apply_potential_operator(w))
    code, _ = run_cli(tmp_path, "solve", {"input": str(tmp_path / "z.bin"), "write_potential": True})
    assert code == 0
    w2 = fieldio.read_field(tmp_path / "out" / "potential.bin")
    z = fieldio.read_field(tmp_path / "z.bin")
    assert torus.relative_error(torus.apply_potential_operator(w2), z) <= 1e-8


def test_shear_default_and_degenerate(tmp_path):
    code, rep = run_cli(tmp_path, "shear")
    assert code == 0 and not rep["info"]["degenerate"]
    code, rep = run_cli(tmp_path, "shear", {"alpha": "sin", "beta": "sin"}, name="deg")
    assert code == 0 and rep["info"]["degenerate"]
    assert "skipped" in [c for c in rep["checks"] if c["name"] == "wave_cone"][0]["note"]


def test_shear_samples_profile(tmp_path):
    samples = np.cos(2 * np.pi * np.arange(16) / 16).tolist()
    code, _ = run_cli(tmp_path, "shear", {"alpha": {"kind": "samples", "values": samples}, "beta": "zero"})
    assert code == 0


def test_laminate_small_sweep(tmp_path):
    code, rep = run_cli(tmp_path, "laminate", {"n_values": [4, 16], "grid": {"n_t": 4, "n_x": 4, "n_y": 512}})
    assert code == 0, rep["checks"]
    assert (tmp_path / "out" / "laminate_convergence.csv").exists()


def test_laminate_non_wavecone_pair_exits_3(tmp_path):
    config = {"z1": [1, 0, 0, 0, 0, 1], "z2": [2, 1, 1, 1, 1, 2], "n_values": [4]}
    code, rep = run_cli(tmp_path, "laminate", config)
    assert code == 3 and "distance" in rep["error"]["measured"]


def test_hausdorff_default_and_empty_level(tmp_path):
    code, rep = run_cli(tmp_path, "hausdorff")
    assert code == 0 and rep["passed"]
    bad = {"audits": [{"polytope": "cube", "samples": {"start": 0.5, "stop": 2.0, "count": 3}}]}
    code, rep = run_cli(tmp_path, "hausdorff", bad, name="bad")
    assert code == 3 and rep["error"]["type"] == "EmptySlice"


def test_reports_are_byte_stable(tmp_path):
    config = {"fixture": "roundtrip", "grid": {"n_t": 8, "n_x": 8, "n_y": 8}}
    run_cli(tmp_path, "solve", config, seed=7, name="a")
    run_cli(tmp_path, "solve", config, seed=7, name="b")
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()
    assert (tmp_path / "a" / "timings.json").exists()


def test_format_handles_special_values():
    text = cli._format({"b": float("nan"), "a": [np.float64(0.1), np.int64(2), True, None, float("-inf")]})
    assert text == '{"a": [0.10000000000000001, 2, true, null, "-Infinity"], "b": "NaN"}'


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "euler_relax.cli", "hausdorff", "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "hausdorff: PASS" in proc.stdout
