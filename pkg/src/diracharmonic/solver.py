"""Relaxation toward critical pairs: projected heat flow on the map
coupled with near-kernel extraction for the spinor.

The action is unbounded below in the spinor, so no descent is attempted
there; instead the spinor is constrained to the near-kernel of the Dirac
operator along the current map (the spinor equation is linear), extracted
by inverse power iteration on the squared operator, and refreshed every
few map steps.  The map relaxes by explicit Euler on the descent
direction tension - curvature_term, reprojected onto the target
pointwise, which preserves the constraint exactly and never increases
the Dirichlet energy while the spinor is zero and dt <= h^2/8.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import (MapField, TwistedSpinorField, action, curvature_term,
                     el_residual, energy, tension, _tangent_project_spinor)
from .spinors import flat_dirac, spinor_norm2


@dataclass
class SolverConfig:
    dt: float | None = None          # None: stability bound h^2 / 8
    max_iters: int = 2000
    residual_tol: float = 1e-4
    reproject_every: int = 100
    spinor_norm_target: float = 1.0
    power_iters: int = 6
    cg_tol: float = 1e-10
    cg_max_iters: int = 600
    trace_every: int = 25
    seed: int | None = 0

    def step_size(self, h: float) -> float:
        bound = h * h / 8.0
        if self.dt is None:
            return bound
        if not (0.0 < self.dt <= bound):
            raise ValueError(f"dt = {self.dt} violates the stability bound h^2/8 = {bound:.3e}")
        return self.dt


@dataclass
class SolveReport:
    iterations: list = field(default_factory=list)
    action_trace: list = field(default_factory=list)
    energy_trace: list = field(default_factory=list)
    map_residual_trace: list = field(default_factory=list)
    spinor_residual_trace: list = field(default_factory=list)
    kernel_ratio_trace: list = field(default_factory=list)
    termination: str = "max_iters"

    def record(self, it, act, en, map_res, spin_res, ratio):
        self.iterations.append(int(it))
        self.action_trace.append(float(act))
        self.energy_trace.append(float(en))
        self.map_residual_trace.append(float(map_res))
        self.spinor_residual_trace.append(float(spin_res))
        self.kernel_ratio_trace.append(float(ratio))

    def rows(self):
        return zip(self.iterations, self.action_trace, self.energy_trace,
                   self.map_residual_trace, self.spinor_residual_trace,
                   self.kernel_ratio_trace)


def flow_step(phi: MapField, psi: TwistedSpinorField, config: SolverConfig) -> MapField:
    """One explicit Euler step of the map flow, reprojected onto the target.

    The update direction is the map residual tension(phi) - R(phi, psi),
    which is tangent pointwise, so |phi + dt v| >= 1 and the nearest-point
    projection cannot increase the discrete Dirichlet energy at psi = 0.
    """
    dt = config.step_size(phi.chart.h)
    update = tension(phi) - curvature_term(phi, psi)
    if not np.isfinite(update).all():
        raise FloatingPointError("flow step diverged (non-finite update)")
    moved = phi.values + dt * update
    if phi.target.kind == "sphere":
        moved = phi.target.project_point(moved)
    return MapField(phi.chart, phi.target, moved, check=False)


class _DiracKernelOperator:
    """Symmetric positive semidefinite operator on tangency-constrained
    spinor grids whose near-null space is the kernel of the Dirac operator
    along the map.

    T x = P B (B (P x)) + kappa (x - P x), with B = (tangent projection)
    o (flat Dirac) and P the pointwise tangency projection; kappa pushes
    normal junk out of the small-eigenvalue space.
    """

    def __init__(self, phi: MapField, kappa: float = 1.0):
        self.phi = phi
        self.kappa = kappa

    def project(self, x):
        return _tangent_project_spinor(self.phi, x)

    def b_apply(self, x):
        return self.project(flat_dirac(x, self.phi.chart))

    def __call__(self, x):
        px = self.project(x)
        bx = self.b_apply(px)
        bbx = self.project(flat_dirac(bx, self.phi.chart))
        return bbx + self.kappa * (x - px)


def _inner(a, b) -> float:
    return float(np.real(np.conj(a) * b).sum())


def _cg(op, rhs, shift: float, tol: float, max_iters: int):
    """Conjugate gradient for (op + shift I) x = rhs; fixed association
    order, no randomness.  Returns (x, iterations)."""
    x = np.zeros_like(rhs)
    r = rhs.copy()
    p = r.copy()
    rs = _inner(r, r)
    rhs_norm = np.sqrt(rs) + 1e-300
    it = 0
    for it in range(1, max_iters + 1):
        ap = op(p) + shift * p
        denom = _inner(p, ap)
        if denom <= 0:
            raise FloatingPointError(f"CG breakdown at iteration {it}")
        alpha = rs / denom
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = _inner(r, r)
        if np.sqrt(rs_new) <= tol * rhs_norm:
            return x, it
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, it


def dirac_project(phi: MapField, psi_init: TwistedSpinorField | None,
                  config: SolverConfig) -> tuple[TwistedSpinorField, float]:
    """Extract a near-kernel spinor of the Dirac operator along phi.

    Runs ``power_iters`` rounds of inverse power iteration on the squared
    operator from ``psi_init`` (or a seeded random field when the seed is
    set), then rescales to the requested L2 norm.  Returns the field and
    the measured ratio |B psi| / |psi| in L2.
    """
    chart = phi.chart
    K = phi.target.ambient_dim
    op = _DiracKernelOperator(phi)
    if psi_init is not None and float(spinor_norm2(psi_init.values).sum()) > 1e-24:
        x = op.project(psi_init.values.copy())
    else:
        if config.seed is None:
            raise ValueError("zero initial spinor needs a seed to start from")
        rng = np.random.default_rng(config.seed)
        raw = rng.normal(size=chart.shape + (K, 2)) + 1j * rng.normal(size=chart.shape + (K, 2))
        x = op.project(raw)
    # Shift well below the bulk spectrum (~h^-2) but above the h^4-deep
    # near-kernel, so inverse iteration damps the bulk without distorting
    # the kernel directions.
    shift = 1e-4 * 4.0 / chart.h**2
    for _ in range(max(1, config.power_iters)):
        x = x / (np.sqrt(float(spinor_norm2(x).sum())) + 1e-300)
        x, _ = _cg(op, x, shift, config.cg_tol, config.cg_max_iters)
        x = op.project(x)
    l2 = np.sqrt(float(spinor_norm2(x).sum()) * chart.h**2)
    if l2 < 1e-300:
        raise FloatingPointError("inverse power iteration collapsed to zero")
    x = x * (config.spinor_norm_target / l2)
    bx = op.b_apply(x)
    ratio = np.sqrt(float(spinor_norm2(bx).sum()) / float(spinor_norm2(x).sum()))
    return TwistedSpinorField(chart, phi.target, x), float(ratio)


def solve(phi0: MapField, psi0: TwistedSpinorField | None,
          config: SolverConfig) -> tuple[MapField, TwistedSpinorField, SolveReport]:
    """Alternate map flow steps with periodic spinor kernel refreshes.

    Terminates when the combined residual sup falls below residual_tol,
    on max_iters, or on divergence.  Deterministic for fixed inputs and
    seed: reruns produce identical traces bit for bit.
    """
    phi = phi0
    freeze_spinor = psi0 is not None and float(spinor_norm2(psi0.values).sum()) == 0.0
    if freeze_spinor:
        psi, ratio = psi0, 0.0
    else:
        psi, ratio = dirac_project(phi, psi0, config)
    report = SolveReport()

    def measure(it):
        res = el_residual(phi, psi)
        report.record(it, action(phi, psi), energy(phi, psi),
                      res.norms["map_sup"], res.norms["spinor_sup"], ratio)
        return res.combined_sup

    combined = measure(0)
    if combined < config.residual_tol:
        report.termination = "converged"
        return phi, psi, report

    for it in range(1, config.max_iters + 1):
        try:
            phi = flow_step(phi, psi, config)
        except FloatingPointError:
            report.termination = "diverged"
            measure(it)
            return phi, psi, report
        if not freeze_spinor:
            # Transport the spinor with the moving map: pointwise tangent
            # projection keeps the pair admissible between kernel refreshes.
            psi = TwistedSpinorField(phi.chart, phi.target,
                                     _tangent_project_spinor(phi, psi.values))
            if it % config.reproject_every == 0:
                psi, ratio = dirac_project(phi, psi, config)
        if it % config.trace_every == 0 or it == config.max_iters:
            combined = measure(it)
            if not np.isfinite(combined):
                report.termination = "diverged"
                return phi, psi, report
            if combined < config.residual_tol:
                report.termination = "converged"
                return phi, psi, report
    report.termination = "max_iters"
    return phi, psi, report
