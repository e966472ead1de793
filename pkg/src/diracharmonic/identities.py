"""Conserved quantities and identities of the coupled system as defect
functionals.

Every function here measures how far a discrete field pair is from
satisfying an identity that holds exactly in the continuum: either
unconditionally (Weitzenboeck, formal self-adjointness) or on solutions
of the critical-point system (energy-momentum conservation, holomorphy
of the quadratic differential, Pohozaev circle balance, Bochner).
Defects on exact solution families shrink at the stencil order O(h^2);
on generic fields the conditional ones stay bounded away from zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charts import DomainChart, MoebiusMap
from .fields import (MapField, TwistedSpinorField, action, dirac_along_map,
                     energy, field_scale, project_spinor, spinor_gradient)
from .spinors import clifford_e1, clifford_e2, clifford_mul, spinor_norm2


# -- energy-momentum tensor ----------------------------------------------------

@dataclass
class EnergyMomentum:
    """Symmetric 2-tensor of the coupled action; components shape (n, n, 2, 2)."""

    chart: DomainChart
    components: np.ndarray

    def symmetry_defect(self, mask=None) -> float:
        mask = self.chart.interior_mask if mask is None else mask
        gap = np.abs(self.components[..., 0, 1] - self.components[..., 1, 0])
        return float(gap[mask].max())

    def trace(self) -> np.ndarray:
        return self.components[..., 0, 0] + self.components[..., 1, 1]


def _spinor_pair_re(psi_values, other) -> np.ndarray:
    """Re sum_i <psi^i, other^i> over ambient and spinor axes."""
    return np.real(np.conj(psi_values) * other).sum(axis=(-2, -1))


def energy_momentum(phi: MapField, psi: TwistedSpinorField) -> EnergyMomentum:
    """T_ab = 2 <phi_a, phi_b> - delta_ab |dphi|^2 + Re<psi, e_a . grad_b psi>."""
    chart = phi.chart
    d = phi.gradient()
    grad_psi = spinor_gradient(phi, psi)
    e_psi = (clifford_e1(psi.values), clifford_e2(psi.values))
    T = np.zeros(chart.shape + (2, 2))
    dirichlet = (d**2).sum(axis=(-2, -1))
    for a in range(2):
        for b in range(2):
            T[..., a, b] = 2.0 * (d[..., a, :] * d[..., b, :]).sum(axis=-1)
            if a == b:
                T[..., a, b] -= dirichlet
            # Re<psi, e_a . grad_b psi> = -Re<e_a . psi, grad_b psi>.
            T[..., a, b] -= _spinor_pair_re(e_psi[a], grad_psi[..., b, :, :])
    return EnergyMomentum(chart, T)


def em_divergence(em: EnergyMomentum) -> np.ndarray:
    """sum_a D_a T_ab per b; shape (n, n, 2)."""
    c = em.chart
    out = np.zeros(c.shape + (2,))
    for b in range(2):
        out[..., b] = (c.derivative(em.components[..., 0, b], "x")
                       + c.derivative(em.components[..., 1, b], "y"))
    return out


# -- quadratic differential ------------------------------------------------------

@dataclass
class QuadraticDifferential:
    """Coefficient T(z) of the holomorphic quadratic differential."""

    chart: DomainChart
    T: np.ndarray

    def dbar_defect(self, mask=None) -> float:
        c = self.chart
        if mask is None:
            mask = c.interior_mask & c.valid_mask(2)
        dbar = 0.5 * (c.derivative(self.T, "x") + 1j * c.derivative(self.T, "y"))
        return float(np.abs(dbar)[mask].max())


def hopf_differential(phi: MapField, psi: TwistedSpinorField,
                      analytic: bool = False) -> QuadraticDifferential:
    """T(z) = |phi_x|^2 - |phi_y|^2 - 2i <phi_x, phi_y>
             + Re<psi, e1 . grad_x psi> - i Re<psi, e1 . grad_y psi>.

    ``analytic=True`` assembles the map part from the exact gradient, which
    makes it vanish identically for conformal maps.
    """
    d = phi.gradient(analytic=analytic)
    gxx = (d[..., 0, :] ** 2).sum(axis=-1)
    gyy = (d[..., 1, :] ** 2).sum(axis=-1)
    gxy = (d[..., 0, :] * d[..., 1, :]).sum(axis=-1)
    T = (gxx - gyy - 2j * gxy).astype(np.complex128)
    if psi is not None:
        grad_psi = spinor_gradient(phi, psi)
        e1psi = clifford_e1(psi.values)
        sx = -_spinor_pair_re(e1psi, grad_psi[..., 0, :, :])
        sy = -_spinor_pair_re(e1psi, grad_psi[..., 1, :, :])
        T = T + sx - 1j * sy
    return QuadraticDifferential(phi.chart, T)


# -- Weitzenboeck / Bochner -------------------------------------------------------

def _curvature_on_spinor(phi: MapField, X, Y, S) -> np.ndarray:
    """R(X, Y) S for real tangent fields X, Y and a K-spinor array S,
    complex-linear in S.  Sphere: <Y, S> X - <X, S> Y; flat: 0."""
    if phi.target.kind == "flat":
        return np.zeros_like(S)
    ys = (Y[..., :, None] * S).sum(axis=-2)
    xs = (X[..., :, None] * S).sum(axis=-2)
    return X[..., :, None] * ys[..., None, :] - Y[..., :, None] * xs[..., None, :]


def weitzenboeck_defect(phi: MapField, psi: TwistedSpinorField, mask=None) -> float:
    """Unconditional second-order identity

        D^2 psi = -sum_a grad_a grad_a psi + (R_chart/4) psi
                  + (1/2) sum_ab R(dphi_a, dphi_b)(e_a . e_b . psi).

    Returns the sup-norm of LHS - RHS over the interior (or ``mask``).
    """
    chart = phi.chart
    if mask is None:
        mask = chart.interior_mask & chart.valid_mask(2)
    d1, _ = dirac_along_map(phi, psi)
    lhs, _ = dirac_along_map(phi, TwistedSpinorField(chart, phi.target, d1),
                             check_tangency=False)
    grad1 = spinor_gradient(phi, psi)
    lap = np.zeros_like(psi.values)
    for a, ax in enumerate(("x", "y")):
        ga = TwistedSpinorField(chart, phi.target, grad1[..., a, :, :])
        lap = lap + spinor_gradient(phi, ga)[..., a, :, :]
    rhs = -lap + 0.25 * chart.scalar_curvature * psi.values
    d = phi.gradient()
    cops = (clifford_e1, clifford_e2)
    for a in range(2):
        for b in range(2):
            if a == b:
                continue  # R(X, X) = 0
            eab_psi = cops[a](cops[b](psi.values))
            rhs = rhs + 0.5 * _curvature_on_spinor(phi, d[..., a, :], d[..., b, :], eab_psi)
    gap = np.sqrt(spinor_norm2(lhs - rhs).sum(axis=-1))
    return float(gap[mask].max())


def bochner_defect(phi: MapField, psi: TwistedSpinorField, mask=None,
                   dirac_tol: float = 1e-2) -> float:
    """Defect of the Laplacian identity for |psi|^2, valid when D psi = 0:

        (1/2) lap |psi|^2 = |grad psi|^2 + (R_chart/4)|psi|^2
                            - (1/2) sum_ab Re<e_a.psi, R(dphi_a, dphi_b)(e_b.psi)>.

    Raises if the measured Dirac residual exceeds ``dirac_tol`` times the
    field scale (the identity is conditional).
    """
    chart = phi.chart
    if mask is None:
        mask = chart.interior_mask & chart.valid_mask(2)
    spin_res, _ = dirac_along_map(phi, psi)
    measured = float(np.sqrt(spinor_norm2(spin_res).sum(axis=-1))[mask].max())
    scale = field_scale(phi, psi)
    if measured > dirac_tol * scale:
        raise ValueError(f"Dirac residual {measured:.3e} exceeds tolerance "
                         f"{dirac_tol:.1e} x scale {scale:.3e}; the identity "
                         "is only valid on solutions")
    lhs = 0.5 * chart.laplacian(psi.norm2_density())
    grad1 = spinor_gradient(phi, psi)
    rhs = (np.abs(grad1) ** 2).sum(axis=(-3, -2, -1))
    rhs = rhs + 0.25 * chart.scalar_curvature * psi.norm2_density()
    d = phi.gradient()
    e_psi = (clifford_e1(psi.values), clifford_e2(psi.values))
    for a in range(2):
        for b in range(2):
            if a == b:
                continue
            r_on = _curvature_on_spinor(phi, d[..., a, :], d[..., b, :], e_psi[b])
            rhs = rhs - 0.5 * _spinor_pair_re(e_psi[a], r_on)
    return float(np.abs(lhs - rhs)[mask].max())


# -- Pohozaev circle identities ----------------------------------------------------

@dataclass
class CircleBalance:
    """Both defects of the radial/angular circle identity at one radius,
    plus the circle energy E_r and the spinor correction I_r."""

    r: float
    radial_defect: float
    angular_defect: float
    scale: float
    E_r: float
    I_r: float


def pohozaev_defect(phi: MapField, psi: TwistedSpinorField, r: float,
                    n_theta: int | None = None) -> CircleBalance:
    """Circle identity at radius r on a disk chart:

        int |phi_theta|^2 / r^2 dtheta = int |phi_r|^2 dtheta
                                         + int (psi, e_r . grad_r psi) dtheta
    and the same with the angular spinor term; both sides via bilinear
    interpolation and trapezoidal angle quadrature.
    """
    chart = phi.chart
    if chart.topology != "disk":
        raise ValueError("circle identities need a disk chart")
    chart._check_radius(r)
    n_theta = 4 * chart.n if n_theta is None else n_theta
    theta, px, py = chart.circle_points(r, n_theta)
    ct, st = np.cos(theta), np.sin(theta)

    d = phi.gradient()
    dx = chart.interp(d[..., 0, :], px, py)
    dy = chart.interp(d[..., 1, :], px, py)
    phi_r = ct[:, None] * dx + st[:, None] * dy
    phi_t = -st[:, None] * dx + ct[:, None] * dy  # |phi_theta| / r

    grad_psi = spinor_gradient(phi, psi)
    gx = chart.interp(grad_psi[..., 0, :, :], px, py)
    gy = chart.interp(grad_psi[..., 1, :, :], px, py)
    psi_vals = chart.interp(psi.values, px, py)
    grad_r = ct[:, None, None] * gx + st[:, None, None] * gy
    grad_t = -st[:, None, None] * gx + ct[:, None, None] * gy

    er_grad_r = clifford_mul((ct[:, None], st[:, None]), grad_r)
    et_grad_t = clifford_mul((-st[:, None], ct[:, None]), grad_t)
    spin_radial = np.real(np.conj(psi_vals) * er_grad_r).sum(axis=(-2, -1))
    spin_angular = np.real(np.conj(psi_vals) * et_grad_t).sum(axis=(-2, -1))

    w = 2.0 * np.pi / n_theta
    lhs = float((phi_t**2).sum() * w)
    rad = float((phi_r**2).sum() * w)
    s_rad = float(spin_radial.sum() * w)
    s_ang = float(spin_angular.sum() * w)

    E_r = lhs + rad
    I_r = -s_rad
    scale = E_r + abs(s_rad) + abs(s_ang) + 1e-300
    return CircleBalance(r=r,
                         radial_defect=abs(lhs - rad - s_rad),
                         angular_defect=abs(lhs - rad + s_ang),
                         scale=scale, E_r=E_r, I_r=I_r)


# -- conformal invariance -----------------------------------------------------------

def _mapped_points(chart: DomainChart, f: MoebiusMap):
    """Images of the grid nodes, clamped to the interpolable square.

    Clamping only bites outside the unit disk (Moebius maps used here send
    the disk into itself), where masked quadrature never looks.
    """
    z = chart.z
    w = (f.a * z + f.b) / (f.c * z + f.d)
    half = 0.5 * chart.grid.side - 1.5 * chart.h
    return np.clip(w.real, -half, half), np.clip(w.imag, -half, half)


def spinor_pullback(chart: DomainChart, values, f: MoebiusMap,
                    exponent: float) -> np.ndarray:
    """Pull a K-spinor grid back along the Moebius map with graded phases.

    Positive half-spinor components scale by conj(s) |s|^(2 exponent - 1),
    negative by s |s|^(2 exponent - 1), with s the global holomorphic square
    root of f'.  exponent = +1/2 multiplies magnitudes by |f'|^(1/2).
    """
    wx, wy = _mapped_points(chart, f)
    pulled = chart.interp(values, wx, wy)
    s = f.sqrt_derivative(chart.z)
    mag = np.abs(s) ** (2.0 * exponent - 1.0)
    factor = np.stack([np.conj(s) * mag, s * mag], axis=-1)
    return pulled * factor[..., None, :]


def map_pullback(phi: MapField, f: MoebiusMap) -> MapField:
    """phi o f by bilinear interpolation, re-projected onto the target."""
    chart = phi.chart
    wx, wy = _mapped_points(chart, f)
    vals = chart.interp(phi.values, wx, wy)
    if phi.target.kind == "sphere":
        vals = phi.target.project_point(vals)
    return MapField(chart, phi.target, vals)


_EXPONENTS = {"inverse_fprime": 0.5, "fprime": -0.5}


@dataclass
class ConformalCheck:
    convention: str
    action_defect: float
    energy_defect: float
    dirac_relation_defect: float


def conformal_invariance_defect(phi: MapField, psi: TwistedSpinorField,
                                f: MoebiusMap,
                                convention: str = "inverse_fprime") -> ConformalCheck:
    """Relative change of action and energy under (phi, psi) -> (phi o f,
    lambda^(-1/2) psi o f), plus the pointwise transformation defect of the
    Dirac operator along the map.

    ``convention`` fixes what lambda means: "fprime" reads lambda = |f'|,
    "inverse_fprime" reads lambda = 1/|f'|.  Exactly one of the two leaves
    the discrete action and energy invariant under refinement.
    """
    if convention not in _EXPONENTS:
        raise ValueError(f"unknown lambda convention {convention!r}")
    expo = _EXPONENTS[convention]
    chart = phi.chart
    phi_t = map_pullback(phi, f)
    psi_t_vals = spinor_pullback(chart, psi.values, f, expo)
    # Interpolation and reprojection leave O(h^2) tangency crumbs; clean
    # them up along the pulled-back map before assembling the action.
    psi_t = project_spinor(phi_t, psi_t_vals)

    L0 = action(phi, psi)
    L1 = action(phi_t, psi_t)
    E0 = energy(phi, psi)
    E1 = energy(phi_t, psi_t)

    spin_res, _ = dirac_along_map(phi, psi, check_tangency=False)
    lhs, _ = dirac_along_map(phi_t, psi_t, check_tangency=False)
    rhs = spinor_pullback(chart, spin_res, f, 3.0 * expo)
    mask = chart.interior_mask & chart.valid_mask(2)
    rel_scale = float(np.sqrt(spinor_norm2(rhs).sum(axis=-1))[mask].max()) + 1e-300
    relation = float(np.sqrt(spinor_norm2(lhs - rhs).sum(axis=-1))[mask].max()) / rel_scale

    return ConformalCheck(
        convention=convention,
        action_defect=abs(L0 - L1) / (1.0 + abs(L0)),
        energy_defect=abs(E0 - E1) / (1.0 + abs(E0)),
        dirac_relation_defect=relation,
    )


# -- decay diagnostics -----------------------------------------------------------

def decay_profile(phi: MapField, psi: TwistedSpinorField, radii=None,
                  n_theta: int | None = None) -> dict:
    """Diagnostic table of weighted circle sups and cumulative energies.

    Columns per radius r: sup |dphi| r, sup |psi| r^(1/2), sup |grad psi|
    r^(3/2), the annulus energy on r <= |z| <= 2r, and the growth function
    F(r) = int_{D_r} (|dphi|^2 + |psi|^4 + |grad psi|^(4/3)).
    """
    chart = phi.chart
    if chart.topology != "disk":
        raise ValueError("decay diagnostics need a disk chart")
    h = chart.h
    if radii is None:
        radii = np.linspace(6.0 * h, min(0.9, 1.0 - 5.0 * h), 24)
    n_theta = 4 * chart.n if n_theta is None else n_theta

    d = phi.gradient()
    dmag = np.sqrt((d**2).sum(axis=(-2, -1)))
    psi_mag = np.sqrt(psi.norm2_density())
    gpsi = np.stack([chart.derivative(psi.values, "x"),
                     chart.derivative(psi.values, "y")], axis=-3)
    gpsi_mag = np.sqrt((np.abs(gpsi) ** 2).sum(axis=(-3, -2, -1)))
    growth_density = dmag**2 + psi_mag**4 + gpsi_mag ** (4.0 / 3.0)
    rad = np.abs(chart.z)

    rows = {"r": [], "dphi_weighted": [], "psi_weighted": [], "grad_psi_weighted": [],
            "annulus_energy": [], "growth": []}
    for r in radii:
        _, px, py = chart.circle_points(float(r), n_theta)
        rows["r"].append(float(r))
        rows["dphi_weighted"].append(float(chart.interp(dmag, px, py).max() * r))
        rows["psi_weighted"].append(float(chart.interp(psi_mag, px, py).max() * r**0.5))
        rows["grad_psi_weighted"].append(float(chart.interp(gpsi_mag, px, py).max() * r**1.5))
        ann = (rad >= r) & (rad <= min(2.0 * r, 1.0))
        e_dens = dmag**2 + psi_mag**4
        rows["annulus_energy"].append(float((e_dens[ann]).sum() * h**2))
        disk = rad <= r
        rows["growth"].append(float((growth_density[disk]).sum() * h**2))
    return {k: np.asarray(v) for k, v in rows.items()}


def growth_function(phi: MapField, psi: TwistedSpinorField, radii) -> np.ndarray:
    """F(r) alone, for monotonicity checks."""
    return decay_profile(phi, psi, radii=radii)["growth"]


# -- formal self-adjointness -------------------------------------------------------

def self_adjointness_defect(phi: MapField, psi: TwistedSpinorField,
                            xi: TwistedSpinorField) -> float:
    """|int (psi, D xi) - int (D psi, xi)| / scale on the torus.

    Exact summation by parts plus exact skew-adjointness of the Clifford
    matrices force this to machine precision.
    """
    chart = phi.chart
    if chart.topology != "torus":
        raise ValueError("the exact summation-by-parts identity needs a torus")
    d_xi, _ = dirac_along_map(phi, xi, check_tangency=False)
    d_psi, _ = dirac_along_map(phi, psi, check_tangency=False)
    left = chart.integrate(np.real(np.conj(psi.values) * d_xi).sum(axis=(-2, -1)))
    right = chart.integrate(np.real(np.conj(d_psi) * xi.values).sum(axis=(-2, -1)))
    scale = (np.sqrt(chart.integrate(psi.norm2_density())
                     * chart.integrate(spinor_norm2(d_xi).sum(axis=-1)))
             + np.sqrt(chart.integrate(xi.norm2_density())
                       * chart.integrate(spinor_norm2(d_psi).sum(axis=-1))) + 1e-300)
    return abs(left - right) / scale
