import hashlib
import json
import subprocess
import sys

BASE_CFG = """
[chart]
topology = torus
n = 32
side = 1.0
window = 0.5

[scenario]
kind = twistor_pushforward
rational_num = 0,1
psi0 = 1,0
psi1 = 0.2,-0.1j

[output]
out_dir = {out}
seed = 7
"""

DISK_CFG = """
[chart]
topology = disk
n = 48

[scenario]
kind = twistor_pushforward
rational_num = 0,1
psi0 = 1,0
psi1 = 0.2,-0.1j

[output]
out_dir = {out}
seed = 7
"""

FLOW_CFG = """
[chart]
topology = torus
n = 32

[scenario]
kind = perturbed_constant
amplitude = 0.05
modes = 2,3

[solver]
max_iters = 150
residual_tol = 1e-8
reproject_every = 50
power_iters = 2
trace_every = 25

[output]
out_dir = {out}
seed = 11
"""


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "diracharmonic.cli", *args],
                          capture_output=True, text=True)


def write_cfg(tmp_path, template, name="run.cfg"):
    out = tmp_path / "out"
    path = tmp_path / name
    path.write_text(template.format(out=out))
    return path, out


def sha(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_exact_writes_fields_and_summary(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    r = run_cli("exact", "--config", str(cfg))
    assert r.returncode == 0, r.stderr
    summary = json.loads((out / "exact_summary.json").read_text())
    assert summary["summary"]["map_residual_sup"] < 1e-2
    assert (out / "phi.dhm").exists() and (out / "psi.dhm").exists()


def test_exact_round_trip_is_bit_identical(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    h1 = sha(out / "phi.dhm"), sha(out / "psi.dhm")
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    assert (sha(out / "phi.dhm"), sha(out / "psi.dhm")) == h1


def test_invalid_config_rejected_with_line_number(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("[chart]\nn = twelve\n")
    r = run_cli("exact", "--config", str(path))
    assert r.returncode == 1
    assert "line 2" in r.stderr and "chart.n" in r.stderr


def test_verify_passes_on_solution_scenario(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    r = run_cli("verify", "--config", str(cfg))
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads((out / "verify_report.json").read_text())
    assert rep["pass"] is True
    ids = {rec["id"] for rec in rep["identities"]}
    assert {"clifford_relations", "dirac_self_adjoint", "weitzenboeck",
            "em_divergence", "hopf_holomorphic"} <= ids


def test_verify_fails_on_non_solution_but_unconditional_hold(tmp_path):
    cfg, out = write_cfg(tmp_path, FLOW_CFG)
    r = run_cli("verify", "--config", str(cfg))
    assert r.returncode == 2
    rep = json.loads((out / "verify_report.json").read_text())
    assert rep["pass"] is False
    for rec in rep["identities"]:
        if rec["kind"] == "unconditional":
            assert rec["pass"], rec["id"]
    failed = {rec["id"] for rec in rep["identities"] if not rec["pass"]}
    assert "em_divergence" in failed or "map_equation" in failed


def test_verify_reports_are_byte_identical(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    assert run_cli("verify", "--config", str(cfg)).returncode == 0
    h1 = sha(out / "verify_report.json")
    assert run_cli("verify", "--config", str(cfg)).returncode == 0
    assert sha(out / "verify_report.json") == h1


def test_flow_trace_and_determinism(tmp_path):
    cfg, out = write_cfg(tmp_path, FLOW_CFG)
    r = run_cli("flow", "--config", str(cfg))
    assert r.returncode == 0, r.stderr
    trace = (out / "flow_trace.csv").read_text().splitlines()
    assert trace[0].startswith("iteration,action,energy")
    assert len(trace) > 3
    h1 = sha(out / "flow_trace.csv"), sha(out / "phi_final.dhm")
    assert run_cli("flow", "--config", str(cfg)).returncode == 0
    assert (sha(out / "flow_trace.csv"), sha(out / "phi_final.dhm")) == h1


def test_probe_emits_monotone_growth(tmp_path):
    cfg, out = write_cfg(tmp_path, DISK_CFG)
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    r = run_cli("probe", "--phi", str(out / "phi.dhm"), "--psi", str(out / "psi.dhm"),
                "--out", str(out))
    assert r.returncode == 0, r.stderr
    rows = [line.split(",") for line in (out / "probe.csv").read_text().splitlines()[1:]]
    growth = [float(r[-1]) for r in rows]
    assert all(b >= a - 1e-13 for a, b in zip(growth, growth[1:]))


def test_probe_requires_disk(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    r = run_cli("probe", "--phi", str(out / "phi.dhm"), "--out", str(out))
    assert r.returncode == 1


def test_dump_prints_header(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    r = run_cli("dump", str(out / "phi.dhm"))
    assert r.returncode == 0
    assert '"kind": "map"' in r.stdout


def test_dump_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.dhm"
    bad.write_bytes(b"NOPE" + b"\0" * 64)
    r = run_cli("dump", str(bad))
    assert r.returncode == 1
    assert "bad_magic" in r.stderr


def test_grid_and_seed_overrides(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG)
    r = run_cli("exact", "--config", str(cfg), "--grid", "16", "--seed", "3")
    assert r.returncode == 0
    rep = json.loads((out / "exact_summary.json").read_text())
    assert rep["grid"] == 16


def test_verify_requires_config_or_files():
    r = run_cli("verify")
    assert r.returncode == 1


def test_verify_resolution_sweep_adds_third_grid(tmp_path):
    cfg, out = write_cfg(tmp_path, BASE_CFG.replace("n = 32", "n = 16"))
    r = run_cli("verify", "--config", str(cfg), "--resolution-sweep")
    assert r.returncode in (0, 2)
    rep = json.loads((out / "verify_report.json").read_text())
    assert rep["grids"] == [16, 32, 64]


def test_verify_file_mode_runs_identity_suite(tmp_path):
    cfg, out = write_cfg(tmp_path, DISK_CFG)
    assert run_cli("exact", "--config", str(cfg)).returncode == 0
    r = run_cli("verify", "--phi", str(out / "phi.dhm"), "--psi", str(out / "psi.dhm"),
                "--out", str(out))
    assert r.returncode == 0, r.stdout + r.stderr
    rep = json.loads((out / "verify_report.json").read_text())
    assert rep["mode"] == "files"
    assert rep["grids"] == [48]
    ids = {rec["id"] for rec in rep["identities"]}
    assert "em_divergence" in ids and "pohozaev_r0.5" in ids
    for rec in rep["identities"]:
        assert rec["refinement_ratio"] is None or rec["id"] == "conformal_invariance"
