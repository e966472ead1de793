"""Line-oriented run configuration: ``key = value`` entries under
``[section]`` headers.  Unknown sections or keys are rejected with the
offending line number; values are validated against documented ranges.

Sections and keys (defaults in parentheses):

    [chart]    topology (torus) | n (64) | side (1.0 torus, 2.2 disk) |
               window (none)
    [target]   kind (sphere) | dim (2)
    [scenario] kind (twistor_pushforward) plus per-kind parameters:
               twistor_pushforward: rational_num (0,1) | rational_den (1) |
                   map_scale (1.0) | map_center (0) | psi0 (1,0) | psi1 (0,0)
               elliptic_pair: map_scale (0.7) | psi0 (1,0.5j)
               harmonic_wrap: winding (1)
               constant_spinor: base_point (0,0,1) | spinor_direction (1,0,0) |
                   spinor_components (1,0)
               perturbed_constant: base_point (0,0,1) | amplitude (0.05) |
                   modes (2,3)
    [solver]   dt (auto) | max_iters (2000) | residual_tol (1e-4) |
               reproject_every (100) | spinor_norm_target (1.0) |
               power_iters (6) | cg_tol (1e-10) | cg_max_iters (600) |
               trace_every (25)
    [output]   out_dir (runs) | seed (1234)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import DomainChart, bandlimited_field
from .fields import MapField, TwistedSpinorField
from .solutions import (RationalMap, conformal_map_field,
                        elliptic_conformal_field, trivial_pair,
                        twistor_pushforward)
from .solver import SolverConfig
from .targets import Sphere, make_target


class ConfigError(Exception):
    pass


_SCHEMA = {
    "chart": {"topology", "n", "side", "window"},
    "target": {"kind", "dim"},
    "scenario": {"kind", "rational_num", "rational_den", "map_scale", "map_center",
                 "psi0", "psi1", "winding", "base_point", "spinor_direction",
                 "spinor_components", "amplitude", "modes"},
    "solver": {"dt", "max_iters", "residual_tol", "reproject_every",
               "spinor_norm_target", "power_iters", "cg_tol", "cg_max_iters",
               "trace_every"},
    "output": {"out_dir", "seed"},
}

_SCENARIOS = ("twistor_pushforward", "elliptic_pair", "harmonic_wrap",
              "constant_spinor", "perturbed_constant")


@dataclass
class RunConfig:
    chart: dict = field(default_factory=dict)
    target: dict = field(default_factory=dict)
    scenario: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    source_text: str = ""
    line_of: dict = field(default_factory=dict)

    def section(self, name) -> dict:
        return getattr(self, name)

    def where(self, section: str, key: str) -> str:
        ln = self.line_of.get(f"{section}.{key}")
        return f"line {ln}: " if ln else ""


def parse_config(text: str) -> RunConfig:
    """Parse and validate; raises ConfigError naming the bad line."""
    cfg = RunConfig(source_text=text)
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{name}]")
            section = name
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: entry before any [section] header")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in [{section}]")
        cfg.section(section)[key] = value
        cfg.line_of[f"{section}.{key}"] = lineno
    _validate(cfg)
    return cfg


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _validate(cfg: RunConfig) -> None:
    topo = cfg.chart.get("topology", "torus")
    if topo not in ("torus", "disk"):
        raise ConfigError(f"{cfg.where('chart', 'topology')}chart.topology must be "
                          f"torus or disk, got {topo!r}")
    n = _as_int(cfg.chart.get("n", "64"), f"{cfg.where('chart', 'n')}chart.n")
    if not (8 <= n <= 4096):
        raise ConfigError(f"{cfg.where('chart', 'n')}chart.n = {n} outside [8, 4096]")
    kind = cfg.scenario.get("kind", "twistor_pushforward")
    if kind not in _SCENARIOS:
        raise ConfigError(f"{cfg.where('scenario', 'kind')}scenario.kind must be one "
                          f"of {_SCENARIOS}, got {kind!r}")
    tkind = cfg.target.get("kind", "sphere")
    if tkind not in ("sphere", "flat"):
        raise ConfigError(f"{cfg.where('target', 'kind')}target.kind must be sphere "
                          f"or flat, got {tkind!r}")
    if "seed" in cfg.output:
        _as_int(cfg.output["seed"], f"{cfg.where('output', 'seed')}output.seed")


def _as_int(text, label) -> int:
    try:
        return int(str(text))
    except ValueError as exc:
        raise ConfigError(f"{label}: not an integer: {text!r}") from exc


def _as_float(text, label) -> float:
    try:
        return float(str(text))
    except ValueError as exc:
        raise ConfigError(f"{label}: not a number: {text!r}") from exc


def _as_complex_list(text, label) -> list[complex]:
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        try:
            out.append(complex(part))
        except ValueError as exc:
            raise ConfigError(f"{label}: not a complex number: {part!r}") from exc
    return out


def build_chart(cfg: RunConfig, n_override: int | None = None) -> DomainChart:
    topo = cfg.chart.get("topology", "torus")
    n = n_override if n_override is not None else _as_int(cfg.chart.get("n", "64"), "chart.n")
    if topo == "torus":
        side = _as_float(cfg.chart.get("side", "1.0"), "chart.side")
        window = cfg.chart.get("window")
        window = None if window in (None, "", "none") else _as_float(window, "chart.window")
        return DomainChart.torus(n, side=side, window=window)
    side = _as_float(cfg.chart.get("side", "2.2"), "chart.side")
    return DomainChart.disk(n, side=side)


def build_target(cfg: RunConfig):
    return make_target(cfg.target.get("kind", "sphere"),
                       _as_int(cfg.target.get("dim", "2"), "target.dim"))


def build_solver_config(cfg: RunConfig) -> SolverConfig:
    s = cfg.solver
    dt_txt = s.get("dt", "auto")
    return SolverConfig(
        dt=None if dt_txt in ("auto", "", None) else _as_float(dt_txt, "solver.dt"),
        max_iters=_as_int(s.get("max_iters", "2000"), "solver.max_iters"),
        residual_tol=_as_float(s.get("residual_tol", "1e-4"), "solver.residual_tol"),
        reproject_every=_as_int(s.get("reproject_every", "100"), "solver.reproject_every"),
        spinor_norm_target=_as_float(s.get("spinor_norm_target", "1.0"),
                                     "solver.spinor_norm_target"),
        power_iters=_as_int(s.get("power_iters", "6"), "solver.power_iters"),
        cg_tol=_as_float(s.get("cg_tol", "1e-10"), "solver.cg_tol"),
        cg_max_iters=_as_int(s.get("cg_max_iters", "600"), "solver.cg_max_iters"),
        trace_every=_as_int(s.get("trace_every", "25"), "solver.trace_every"),
        seed=_as_int(cfg.output.get("seed", "1234"), "output.seed"),
    )


def build_pair(cfg: RunConfig, n_override: int | None = None
               ) -> tuple[MapField, TwistedSpinorField]:
    """Construct the configured scenario fields at the configured (or
    overridden) resolution."""
    chart = build_chart(cfg, n_override)
    target = build_target(cfg)
    sc = cfg.scenario
    kind = sc.get("kind", "twistor_pushforward")
    seed = _as_int(cfg.output.get("seed", "1234"), "output.seed")

    if kind == "twistor_pushforward":
        num = _as_complex_list(sc.get("rational_num", "0,1"), "scenario.rational_num")
        den = _as_complex_list(sc.get("rational_den", "1"), "scenario.rational_den")
        rmap = RationalMap(num, den)
        phi = conformal_map_field(rmap, chart,
                                  center=_as_complex_list(sc.get("map_center", "0"),
                                                          "scenario.map_center")[0],
                                  scale=_as_float(sc.get("map_scale", "1.0"),
                                                  "scenario.map_scale"))
        psi0 = _as_complex_list(sc.get("psi0", "1,0"), "scenario.psi0")
        psi1 = _as_complex_list(sc.get("psi1", "0,0"), "scenario.psi1")
        psi = twistor_pushforward(phi, np.array(psi0), np.array(psi1))
        return phi, psi

    if kind == "elliptic_pair":
        phi = elliptic_conformal_field(chart,
                                       scale=_as_complex_list(sc.get("map_scale", "0.7"),
                                                              "scenario.map_scale")[0])
        psi0 = _as_complex_list(sc.get("psi0", "1,0.5j"), "scenario.psi0")
        psi = twistor_pushforward(phi, np.array(psi0), np.zeros(2, dtype=complex))
        return phi, psi

    if kind == "harmonic_wrap":
        return trivial_pair("harmonic_map", chart,
                            winding=_as_int(sc.get("winding", "1"), "scenario.winding"))

    if kind == "constant_spinor":
        base = [float(t) for t in str(sc.get("base_point", "0,0,1")).split(",")]
        direction = [float(t) for t in str(sc.get("spinor_direction", "1,0,0")).split(",")]
        comps = _as_complex_list(sc.get("spinor_components", "1,0"),
                                 "scenario.spinor_components")
        return trivial_pair("constant_map_harmonic_spinor", chart, target=target,
                            base_point=base, spinor_direction=direction,
                            spinor_components=comps)

    if kind == "perturbed_constant":
        base = [float(t) for t in str(sc.get("base_point", "0,0,1")).split(",")]
        amp = _as_float(sc.get("amplitude", "0.05"), "scenario.amplitude")
        modes = tuple(int(t) for t in str(sc.get("modes", "2,3")).split(","))
        rng = np.random.default_rng(seed)
        sphere = Sphere(2)
        vals = np.zeros(chart.shape + (3,))
        vals[:] = np.asarray(base, dtype=float)
        pert = bandlimited_field(chart, rng, components=(3,), kmax=max(modes),
                                 amplitude=amp, modes=modes)
        phi = MapField(chart, sphere, sphere.project_point(vals + pert))
        psi = TwistedSpinorField.zero(chart, sphere)
        return phi, psi

    raise ConfigError(f"unhandled scenario kind {kind!r}")
