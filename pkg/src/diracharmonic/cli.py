"""Command-line surface: exact | verify | flow | probe | dump.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failed, 3 solver divergence.  Outputs are deterministic for a fixed
config and seed; reports embed the package version and a hash of the
config text instead of timestamps.
"""

from __future__ import annotations

import os

# Honor the thread cap before numpy initializes its BLAS backend.
_threads = os.environ.get("DHM_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                 "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(_var, _threads)

import argparse
import json
import sys
from pathlib import Path

import numpy as np

import hashlib

from . import __version__
from .config import ConfigError, RunConfig, build_pair, build_solver_config, load_config
from .fieldio import FieldFileError, read_field, read_header, write_field
from .fields import action, el_residual, energy, field_scale
from .identities import decay_profile
from .solver import solve
from .verify import run_verification, run_verification_on_fields

_EXIT_OK = 0
_EXIT_USAGE = 1
_EXIT_VERIFY_FAILED = 2
_EXIT_DIVERGED = 3


def _json_dump(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.grid is not None:
        cfg.chart["n"] = str(args.grid)
    if args.seed is not None:
        cfg.output["seed"] = str(args.seed)
    if args.out is not None:
        cfg.output["out_dir"] = args.out
    return cfg


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.output.get("out_dir", "runs"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _summary(phi, psi) -> dict:
    res = el_residual(phi, psi)
    return {
        "action": float(action(phi, psi, region=phi.chart.interior_mask)),
        "energy": float(energy(phi, psi, region=phi.chart.interior_mask)),
        "map_residual_sup": res.norms["map_sup"],
        "spinor_residual_sup": res.norms["spinor_sup"],
        "normal_defect_sup": res.norms["normal_sup"],
        "field_scale": field_scale(phi, psi),
    }


def _config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(cfg.source_text.encode()).hexdigest()


def cmd_exact(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    phi, psi = build_pair(cfg)
    write_field(out / "phi.dhm", phi)
    write_field(out / "psi.dhm", psi)
    report = {
        "package_version": __version__,
        "config_sha256": _config_hash(cfg),
        "scenario": cfg.scenario.get("kind", "twistor_pushforward"),
        "grid": phi.chart.n,
        "summary": _summary(phi, psi),
    }
    _json_dump(report, out / "exact_summary.json")
    print(f"wrote {out / 'phi.dhm'}, {out / 'psi.dhm'}, {out / 'exact_summary.json'}")
    return _EXIT_OK


def cmd_verify(cfg: RunConfig, sweep: bool, phi_path=None, psi_path=None) -> int:
    out = _outdir(cfg)
    if phi_path is not None:
        # File mode: single-resolution checks on stored fields (absolute
        # thresholds; refinement ratios need the scenario config).
        phi = read_field(phi_path)
        if psi_path:
            psi = read_field(psi_path, chart=phi.chart)
        else:
            from .fields import TwistedSpinorField
            psi = TwistedSpinorField.zero(phi.chart, phi.target)
        seed = int(cfg.output.get("seed", "1234"))
        report = run_verification_on_fields(phi, psi, seed=seed)
        report["summary"] = _summary(phi, psi)
    else:
        report = run_verification(cfg, sweep=sweep)
    _json_dump(report, out / "verify_report.json")
    for rec in report["identities"]:
        status = "pass" if rec["pass"] else "FAIL"
        print(f"[{status}] {rec['id']}: {rec['statement']}")
    print(f"wrote {out / 'verify_report.json'}")
    return _EXIT_OK if report["pass"] else _EXIT_VERIFY_FAILED


def cmd_flow(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    phi0, psi0 = build_pair(cfg)
    solver_cfg = build_solver_config(cfg)
    phi, psi, rep = solve(phi0, psi0, solver_cfg)
    trace_path = out / "flow_trace.csv"
    with open(trace_path, "w", encoding="utf-8") as fh:
        fh.write("iteration,action,energy,map_residual_sup,spinor_residual_sup,kernel_ratio\n")
        for row in rep.rows():
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    write_field(out / "phi_final.dhm", phi)
    write_field(out / "psi_final.dhm", psi)
    summary = {
        "package_version": __version__,
        "config_sha256": _config_hash(cfg),
        "termination": rep.termination,
        "iterations": rep.iterations[-1] if rep.iterations else 0,
        "initial_combined_residual": (rep.map_residual_trace[0] + rep.spinor_residual_trace[0]
                                      if rep.iterations else None),
        "final_combined_residual": (rep.map_residual_trace[-1] + rep.spinor_residual_trace[-1]
                                    if rep.iterations else None),
    }
    _json_dump(summary, out / "flow_summary.json")
    print(f"wrote {trace_path}, {out / 'phi_final.dhm'}, {out / 'psi_final.dhm'}, "
          f"{out / 'flow_summary.json'}")
    return _EXIT_DIVERGED if rep.termination == "diverged" else _EXIT_OK


def cmd_probe(phi_path, psi_path, out_dir) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    phi = read_field(phi_path)
    if phi.chart.topology != "disk":
        print("probe requires fields on a disk chart", file=sys.stderr)
        return _EXIT_USAGE
    if psi_path:
        psi = read_field(psi_path, chart=phi.chart)
    else:
        from .fields import TwistedSpinorField
        psi = TwistedSpinorField.zero(phi.chart, phi.target)
    prof = decay_profile(phi, psi)
    path = out / "probe.csv"
    cols = ["r", "dphi_weighted", "psi_weighted", "grad_psi_weighted",
            "annulus_energy", "growth"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(len(prof["r"])):
            fh.write(",".join(f"{prof[c][i]:.17g}" for c in cols) + "\n")
    print(f"wrote {path}")
    return _EXIT_OK


def cmd_dump(path) -> int:
    hd = read_header(path)
    print(json.dumps({
        "version": hd.version, "topology": hd.topology, "kind": hd.kind,
        "ambient_dim": hd.ambient_dim, "n": hd.n, "side": hd.side,
        "payload_bytes": hd.payload_bytes, "crc32": hd.crc32,
    }, sort_keys=True, indent=2))
    field = read_field(path)
    vals = field.values
    print(f"max |value| = {float(np.abs(vals).max()):.6g}")
    return _EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dhm",
                                 description="coupled map/spinor field toolkit")
    ap.add_argument("--version", action="version", version=f"dhm {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        p.add_argument("--config", type=str, default=None, required=needs_config,
                       help="path to a key = value config file")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--grid", type=int, default=None, help="override chart.n")
        p.add_argument("--seed", type=int, default=None, help="override output.seed")

    common(sub.add_parser("exact", help="write an exact pair and its summary"))
    pv = sub.add_parser("verify", help="run the identity suite")
    common(pv, needs_config=False)
    pv.add_argument("--resolution-sweep", action="store_true",
                    help="add a third grid at 4n to the suite")
    pv.add_argument("--phi", type=str, default=None, help="verify stored field files")
    pv.add_argument("--psi", type=str, default=None)
    common(sub.add_parser("flow", help="relax from the configured start"))
    pp = sub.add_parser("probe", help="decay/growth diagnostics from field files")
    pp.add_argument("--phi", type=str, required=True)
    pp.add_argument("--psi", type=str, default=None)
    pp.add_argument("--out", type=str, default="runs")
    pd = sub.add_parser("dump", help="print a field file header")
    pd.add_argument("path", type=str)
    return ap


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "dump":
            return cmd_dump(args.path)
        if args.command == "probe":
            return cmd_probe(args.phi, args.psi, args.out)
        if args.command == "verify" and args.config is None and args.phi is None:
            print("verify needs --config or --phi", file=sys.stderr)
            return _EXIT_USAGE
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_overrides(cfg, args)
        if args.command == "exact":
            return cmd_exact(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, sweep=args.resolution_sweep,
                              phi_path=args.phi, psi_path=args.psi)
        if args.command == "flow":
            return cmd_flow(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except FieldFileError as exc:
        print(f"field file error [{exc.code}]: {exc}", file=sys.stderr)
        return _EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return _EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
