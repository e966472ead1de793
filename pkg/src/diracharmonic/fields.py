"""Coupled map / twisted-spinor fields and their variational operators.

A map field phi samples a map into the target, stored extrinsically as
ambient K-vectors with shape (n, n, K).  A twisted spinor field psi
stores K ambient spinor components with shape (n, n, K, 2) and the
pointwise tangency constraint sum_i phi^i psi^i = 0 (sphere target: phi
itself is the unit normal).

The covariant derivative on twisted spinors is realized extrinsically as
the tangential projection of the componentwise flat derivative.  The
Dirac operator along the map is the tangential projection of the flat
Dirac operator; its normal part reproduces A(dphi(e_a), e_a . psi) up to
O(h^2), which el_residual reports as the normal defect.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .charts import DomainChart
from .spinors import clifford_e1, clifford_e2, flat_dirac, hermitian, spinor_norm2
from .targets import TargetGeometry

ON_MANIFOLD_TOL = 1e-10
TANGENCY_TOL = 1e-8


class MapField:
    """Grid sample of a map into the target, as unit ambient vectors.

    ``analytic_gradient`` optionally carries the exact derivative arrays
    (shape (n, n, 2, K)); constructors of closed-form maps fill it so that
    algebraic identities (pushforward tangency, conformality of the Hopf
    coefficient) hold to machine precision instead of O(h^2).
    """

    def __init__(self, chart: DomainChart, target: TargetGeometry, values,
                 analytic_gradient=None, check: bool = True):
        values = np.asarray(values, dtype=float)
        if values.shape != chart.shape + (target.ambient_dim,):
            raise ValueError(f"map values have shape {values.shape}, expected "
                             f"{chart.shape + (target.ambient_dim,)}")
        if check and target.kind == "sphere":
            defect = np.abs((values**2).sum(axis=-1) - 1.0).max()
            if defect > ON_MANIFOLD_TOL:
                raise ValueError(f"map leaves the sphere by {defect:.3e}")
        self.chart = chart
        self.target = target
        self.values = values
        self.analytic_gradient = None if analytic_gradient is None else np.asarray(analytic_gradient)

    @classmethod
    def constant(cls, chart, target, point) -> "MapField":
        p = target.project_point(np.asarray(point, dtype=float))
        vals = np.broadcast_to(p, chart.shape + (target.ambient_dim,)).copy()
        grad = np.zeros(chart.shape + (2, target.ambient_dim))
        return cls(chart, target, vals, analytic_gradient=grad)

    def gradient(self, analytic: bool = False) -> np.ndarray:
        """d phi as an (n, n, 2, K) array: axis -2 indexes the frame direction."""
        if analytic:
            if self.analytic_gradient is None:
                raise ValueError("map carries no analytic gradient")
            return self.analytic_gradient
        c = self.chart
        return np.stack([c.derivative(self.values, "x"),
                         c.derivative(self.values, "y")], axis=-2)


class TwistedSpinorField:
    """Grid sample of a spinor with values in the pulled-back tangent bundle."""

    def __init__(self, chart: DomainChart, target: TargetGeometry, values):
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != chart.shape + (target.ambient_dim, 2):
            raise ValueError(f"spinor values have shape {values.shape}, expected "
                             f"{chart.shape + (target.ambient_dim, 2)}")
        self.chart = chart
        self.target = target
        self.values = values

    @classmethod
    def zero(cls, chart, target) -> "TwistedSpinorField":
        return cls(chart, target, np.zeros(chart.shape + (target.ambient_dim, 2), dtype=np.complex128))

    def norm2_density(self) -> np.ndarray:
        """|psi|^2 per node (ambient sum of half-spinor moduli)."""
        v = self.values
        return (v.real**2 + v.imag**2).sum(axis=(-2, -1))


# -- scale conventions -------------------------------------------------------

def field_scale(phi: MapField, psi: TwistedSpinorField | None = None) -> float:
    """Energy-density scale 1 + sup|dphi|^2 + sup|psi|^2 used to normalize
    residual tolerances.  Sups are taken over the chart interior so the
    seam of windowed charts cannot inflate the scale."""
    mask = phi.chart.interior_mask
    dphi = phi.gradient()
    s = 1.0 + float((dphi**2).sum(axis=(-2, -1))[mask].max())
    if psi is not None:
        s += float(psi.norm2_density()[mask].max())
    return s


def tangency_defect(phi: MapField, psi: TwistedSpinorField) -> float:
    """Sup of |sum_i phi^i psi^i| relative to the spinor magnitude.

    Zero by definition for flat targets, which carry no normal directions.
    """
    if phi.target.kind == "flat":
        return 0.0
    pairing = (phi.values[..., :, None] * psi.values).sum(axis=-2)
    mag = np.sqrt((np.abs(pairing) ** 2).sum(axis=-1))
    scale = np.sqrt(psi.norm2_density().max()) + 1e-300
    return float(mag.max() / scale)


def project_spinor(phi: MapField, raw) -> TwistedSpinorField:
    """Tangent-project an arbitrary K-spinor array along phi."""
    raw = np.asarray(raw, dtype=np.complex128)
    out = _tangent_project_spinor(phi, raw)
    return TwistedSpinorField(phi.chart, phi.target, out)


def _tangent_project_spinor(phi: MapField, arr) -> np.ndarray:
    """Apply the pointwise tangent projector of the target to each
    half-spinor component of an (n, n, K, 2) array."""
    if phi.target.kind == "flat":
        return np.asarray(arr, dtype=np.complex128)
    p = phi.values
    pairing = (p[..., :, None] * arr).sum(axis=-2)
    return arr - p[..., :, None] * pairing[..., None, :]


# -- first-order operators ----------------------------------------------------

def spinor_gradient(phi: MapField, psi: TwistedSpinorField) -> np.ndarray:
    """Covariant derivative: tangential projection of the flat derivative.

    Returns an (n, n, 2, K, 2) array; axis -3 is the frame direction.
    """
    c = phi.chart
    out = np.stack([c.derivative(psi.values, "x"),
                    c.derivative(psi.values, "y")], axis=-3)
    if phi.target.kind == "sphere":
        p = phi.values
        pairing = (p[..., None, :, None] * out).sum(axis=-2)
        out = out - p[..., None, :, None] * pairing[..., None, :]
    return out


def clifford_frame_contract(dphi, psi_values) -> np.ndarray:
    """sigma = sum_{a,i} d_a phi^i  e_a . psi^i, a plain spinor field.

    This is the contraction through which the whole coupling acts on the
    sphere: A(dphi(e_a), e_a . psi) = -sigma (x) phi.
    """
    e1psi = clifford_e1(psi_values)
    e2psi = clifford_e2(psi_values)
    return ((dphi[..., 0, :, None] * e1psi) + (dphi[..., 1, :, None] * e2psi)).sum(axis=-2)


def tension(phi: MapField) -> np.ndarray:
    """Tension field: tangential projection of the 5-point Laplacian.

    Exactly tangent pointwise; on the unit sphere it agrees with
    lap(phi) + |dphi|^2 phi to O(h^2).
    """
    lap = phi.chart.laplacian(phi.values)
    return phi.target.tangent_project(phi.values, lap)


def dirac_along_map(phi: MapField, psi: TwistedSpinorField,
                    check_tangency: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Dirac operator along the map plus the normal defect.

    Returns (D psi, normal defect).  D psi is the tangential projection of
    the componentwise flat Dirac operator.  The normal defect is the normal
    part of the flat Dirac minus A(dphi(e_a), e_a . psi); it measures how
    well the discrete fields satisfy the exact continuum splitting and is
    O(h^2) for smooth tangent data.
    """
    if check_tangency:
        d = tangency_defect(phi, psi)
        if d > TANGENCY_TOL:
            raise ValueError(f"spinor violates tangency by {d:.3e} (tol {TANGENCY_TOL:.1e})")
    slashed = flat_dirac(psi.values, phi.chart)
    if phi.target.kind == "flat":
        return slashed, np.zeros_like(slashed)
    p = phi.values
    pairing = (p[..., :, None] * slashed).sum(axis=-2)
    tangential = slashed - p[..., :, None] * pairing[..., None, :]
    sigma = clifford_frame_contract(phi.gradient(), psi.values)
    # A(dphi(e_a), e_a . psi) = -sigma (x) phi on the sphere.
    a_term = -p[..., :, None] * sigma[..., None, :]
    normal_defect = p[..., :, None] * pairing[..., None, :] - a_term
    return tangential, normal_defect


def curvature_term(phi: MapField, psi: TwistedSpinorField) -> np.ndarray:
    """Curvature coupling of the map equation, an (n, n, K) tangent field.

    Extrinsic evaluation P(A(dphi(e_a), e_a . psi); psi): on the sphere this
    contracts to Re<psi^m, sigma>.  Vanishes identically for flat targets
    and, pointwise to machine precision, on every twistor pushforward.
    """
    if phi.target.kind == "flat":
        return np.zeros(phi.values.shape)
    sigma = clifford_frame_contract(phi.gradient(), psi.values)
    return np.real(np.conj(psi.values) * sigma[..., None, :]).sum(axis=-1)


# -- Euler-Lagrange residuals ---------------------------------------------------

@dataclass
class ELResidual:
    """Residuals of the coupled critical-point system on one chart."""

    map_residual: np.ndarray
    spinor_residual: np.ndarray
    normal_defect: np.ndarray
    norms: dict = field(default_factory=dict)

    @property
    def combined_sup(self) -> float:
        return self.norms["map_sup"] + self.norms["spinor_sup"]


def _sup(mag, mask) -> float:
    return float(mag[mask].max())


def _l2(mag, chart, mask) -> float:
    return float(np.sqrt((mag[mask] ** 2).sum() * chart.h**2))


def el_residual(phi: MapField, psi: TwistedSpinorField, mask=None) -> ELResidual:
    """Assemble tau(phi) - R(phi, psi), D psi, and the normal defect.

    Norms are taken over the chart interior mask unless ``mask`` overrides
    it (refinement studies pass a fixed physical region).
    """
    chart = phi.chart
    mask = chart.interior_mask if mask is None else mask
    map_res = tension(phi) - curvature_term(phi, psi)
    spin_res, normal = dirac_along_map(phi, psi)
    map_mag = np.sqrt((map_res**2).sum(axis=-1))
    spin_mag = np.sqrt(spinor_norm2(spin_res).sum(axis=-1))
    norm_mag = np.sqrt(spinor_norm2(normal).sum(axis=-1))
    norms = {
        "map_sup": _sup(map_mag, mask),
        "map_l2": _l2(map_mag, chart, mask),
        "spinor_sup": _sup(spin_mag, mask),
        "spinor_l2": _l2(spin_mag, chart, mask),
        "normal_sup": _sup(norm_mag, mask),
        "normal_l2": _l2(norm_mag, chart, mask),
        "scale": field_scale(phi, psi),
    }
    return ELResidual(map_res, spin_res, normal, norms)


# -- action and energy ----------------------------------------------------------

def dirichlet_density(phi: MapField, analytic: bool = False) -> np.ndarray:
    dphi = phi.gradient(analytic=analytic)
    return (dphi**2).sum(axis=(-2, -1))


def action(phi: MapField, psi: TwistedSpinorField, region=None) -> float:
    """L = int |dphi|^2 + Re(psi, D psi)."""
    chart = phi.chart
    dens = dirichlet_density(phi)
    spin, _ = dirac_along_map(phi, psi)
    dens = dens + np.real(hermitian(psi.values, spin)).sum(axis=-1)
    return chart.integrate(dens, region=region)


def energy(phi: MapField, psi: TwistedSpinorField, region=None) -> float:
    """E = int |dphi|^2 + |psi|^4 over the chart (or a boolean region)."""
    dens = dirichlet_density(phi) + psi.norm2_density() ** 2
    return phi.chart.integrate(dens, region=region)
