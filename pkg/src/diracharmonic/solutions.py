"""Closed-form critical pairs of the coupled functional.

Three families:

* (harmonic map, 0) -- here the equator-wrapping geodesic maps of the
  torus and inverse-stereographic images of rational maps;
* (constant map, harmonic spinor) -- constant spinors projected tangent;
* the twistor pushforward psi^i = sum_a (e_a . Psi) d_a phi^i built from a
  (possibly branched) conformal map and an affine twistor spinor, which
  solves the full coupled system.

Rational maps are evaluated projectively as coefficient pairs (P, Q), so
poles never produce non-finite values: the sphere point of p/q is

    ( 2 Re(p conj(q)), 2 Im(p conj(q)), |p|^2 - |q|^2 ) / (|p|^2 + |q|^2).
"""

from __future__ import annotations

import numpy as np

from .charts import DomainChart
from .fields import MapField, TwistedSpinorField, project_spinor
from .spinors import clifford_e1, clifford_e2, flat_dirac, spinor_norm2, twistor_field
from .targets import Sphere, TargetGeometry


class RationalMap:
    """Rational function of z with ascending complex coefficient arrays."""

    def __init__(self, numerator, denominator=(1.0,)):
        self.num = np.trim_zeros(np.asarray(numerator, dtype=np.complex128), "b")
        self.den = np.trim_zeros(np.asarray(denominator, dtype=np.complex128), "b")
        if self.num.size == 0:
            self.num = np.zeros(1, dtype=np.complex128)
        if self.den.size == 0:
            raise ValueError("denominator is identically zero")
        self._check_coprime()

    @property
    def degree(self) -> int:
        return max(self.num.size, self.den.size) - 1

    def _check_coprime(self) -> None:
        if self.num.size < 2 or self.den.size < 2:
            return
        rn = np.polynomial.polynomial.polyroots(self.num)
        rd = np.polynomial.polynomial.polyroots(self.den)
        if rn.size and rd.size:
            gap = np.abs(rn[:, None] - rd[None, :]).min()
            if gap < 1e-9:
                raise ValueError("numerator and denominator share a root")

    def pair(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Homogeneous evaluation (P(z), Q(z))."""
        z = np.asarray(z, dtype=np.complex128)
        return (np.polynomial.polynomial.polyval(z, self.num),
                np.polynomial.polynomial.polyval(z, self.den))

    def derivative_pair(self, z) -> tuple[np.ndarray, np.ndarray]:
        """(P', Q') at z."""
        z = np.asarray(z, dtype=np.complex128)
        dn = np.polynomial.polynomial.polyder(self.num) if self.num.size > 1 else np.zeros(1)
        dd = np.polynomial.polynomial.polyder(self.den) if self.den.size > 1 else np.zeros(1)
        return (np.polynomial.polynomial.polyval(z, dn),
                np.polynomial.polynomial.polyval(z, dd))

    def __call__(self, z):
        p, q = self.pair(z)
        return p / q

    def inverted_chart(self) -> "RationalMap":
        """The map w -> R(1/conj(w)) pre-conjugated: returns S with
        S(conj(w)) = R(1/conj(w)); callers evaluate S at conj(w).

        Implemented by reversing the coefficients up to the common degree.
        """
        d = self.degree
        num = np.zeros(d + 1, dtype=np.complex128)
        den = np.zeros(d + 1, dtype=np.complex128)
        num[d - (self.num.size - 1):] = self.num[::-1]
        den[d - (self.den.size - 1):] = self.den[::-1]
        return RationalMap(num, den)


def inverse_stereographic(z) -> np.ndarray:
    """Point of S^2 under inverse stereographic projection from the north pole.

    z = 0 maps to the south pole (0, 0, -1); |z| -> inf approaches the north
    pole.  Evaluated through the projective pair so large |z| stays stable.
    """
    z = np.asarray(z, dtype=np.complex128)
    return stereo_pair(z, np.ones_like(z))


def stereo_pair(p, q) -> np.ndarray:
    """Sphere point of the homogeneous value p/q (works at poles, q = 0)."""
    p = np.asarray(p, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    pq = p * np.conj(q)
    ap = p.real**2 + p.imag**2
    aq = q.real**2 + q.imag**2
    denom = ap + aq
    if (denom < 1e-300).any():
        raise ValueError("homogeneous pair (0, 0) has no sphere image")
    out = np.stack([2.0 * pq.real, 2.0 * pq.imag, ap - aq], axis=-1)
    return out / denom[..., None]


def _stereo_tangent(w, u) -> np.ndarray:
    """Differential of inverse stereographic projection at w applied to the
    complex increment u, as an ambient 3-vector.

    Chart-form oracle; breaks at poles.  Production gradients go through
    the projective form below.
    """
    a, b = w.real, w.imag
    D = 1.0 + a * a + b * b
    s = 2.0 * (a * u.real + b * u.imag)
    d1 = (2.0 * u.real * D - 2.0 * a * s) / D**2
    d2 = (2.0 * u.imag * D - 2.0 * b * s) / D**2
    d3 = 2.0 * s / D**2
    return np.stack([d1, d2, d3], axis=-1)


def _pair_wirtinger(p, q, dp, dq) -> np.ndarray:
    """Wirtinger derivative d(phi)/d(zeta) of the sphere point of (p, q).

    p, q holomorphic in zeta.  Finite everywhere, poles included, because
    only the homogeneous pair enters.
    """
    N = p.real**2 + p.imag**2 + q.real**2 + q.imag**2
    dN = dp * np.conj(p) + dq * np.conj(q)
    A = 2.0 * (p * np.conj(q)).real
    B = 2.0 * (p * np.conj(q)).imag
    C = p.real**2 + p.imag**2 - (q.real**2 + q.imag**2)
    dA = dp * np.conj(q) + np.conj(p) * dq
    dB = -1j * (dp * np.conj(q) - np.conj(p) * dq)
    dC = dp * np.conj(p) - dq * np.conj(q)
    out = np.stack([(dA * N - A * dN), (dB * N - B * dN), (dC * N - C * dN)], axis=-1)
    return out / (N**2)[..., None]


def conformal_map_field(rmap: RationalMap, chart: DomainChart, center=0.0,
                        scale: float = 1.0, conjugate_input: bool = False) -> MapField:
    """Sample phi = (inverse stereographic) o R(scale (z - center)) on the chart.

    The exact gradient is attached, evaluated projectively so poles of R on
    the grid are harmless (the sphere map is smooth through them).
    ``conjugate_input`` evaluates R at conj(zeta) instead, used for the
    second chart of whole-sphere quadrature.
    """
    target = Sphere(2)
    zeta = scale * (chart.z - complex(center))
    if conjugate_input:
        zeta = np.conj(zeta)
    p, q = rmap.pair(zeta)
    values = stereo_pair(p, q)
    dp, dq = rmap.derivative_pair(zeta)
    wirt = _pair_wirtinger(p, q, dp, dq)
    zeta_x = scale
    zeta_y = -1j * scale if conjugate_input else 1j * scale
    grad_x = 2.0 * (wirt * zeta_x).real
    grad_y = 2.0 * (wirt * zeta_y).real
    grad = np.stack([grad_x, grad_y], axis=-2)
    return MapField(chart, target, values, analytic_gradient=grad)


def conformality_defect(phi: MapField, analytic: bool = True) -> np.ndarray:
    """Complex conformality coefficient |phi_x|^2 - |phi_y|^2 - 2i <phi_x, phi_y>.

    Machine-zero for analytic gradients of conformal maps; O(h^2) through
    stencils.
    """
    d = phi.gradient(analytic=analytic)
    gxx = (d[..., 0, :] ** 2).sum(axis=-1)
    gyy = (d[..., 1, :] ** 2).sum(axis=-1)
    gxy = (d[..., 0, :] * d[..., 1, :]).sum(axis=-1)
    return gxx - gyy - 2j * gxy


def twistor_pushforward(phi: MapField, psi0, psi1) -> TwistedSpinorField:
    """psi^i = sum_a (e_a . Psi) d_a phi^i with Psi the affine twistor spinor.

    Uses the analytic gradient when the map carries one, making the tangency
    constraint an exact algebraic identity.
    """
    chart = phi.chart
    Psi = twistor_field(chart, psi0, psi1)
    e1Psi = clifford_e1(Psi)
    e2Psi = clifford_e2(Psi)
    d = phi.gradient(analytic=phi.analytic_gradient is not None)
    vals = (d[..., 0, :, None] * e1Psi[..., None, :]
            + d[..., 1, :, None] * e2Psi[..., None, :])
    return TwistedSpinorField(chart, phi.target, vals)


def _theta1(v, terms: int = 6):
    """Jacobi theta_1 for the square lattice (nome q = e^-pi) and its
    derivative; five terms already reach machine precision."""
    q = np.exp(-np.pi)
    f = np.zeros_like(v)
    df = np.zeros_like(v)
    for n in range(terms):
        coef = 2.0 * (-1.0) ** n * q ** ((n + 0.5) ** 2)
        f = f + coef * np.sin((2 * n + 1) * v)
        df = df + coef * (2 * n + 1) * np.cos((2 * n + 1) * v)
    return f, df


def _theta2(v, terms: int = 6):
    q = np.exp(-np.pi)
    f = np.zeros_like(v)
    df = np.zeros_like(v)
    for n in range(terms):
        coef = 2.0 * q ** ((n + 0.5) ** 2)
        f = f + coef * np.cos((2 * n + 1) * v)
        df = df - coef * (2 * n + 1) * np.sin((2 * n + 1) * v)
    return f, df


def elliptic_conformal_field(chart: DomainChart, scale: complex = 1.0) -> MapField:
    """Doubly periodic branched conformal map of the square torus into S^2.

    The theta quotient g = theta_2(pi u)/theta_1(pi u) (u = z/side) is
    periodic up to sign, so g^2 is a genuine degree-2 elliptic function;
    phi is the inverse stereographic image of scale * g^2, evaluated
    projectively so the poles on the period lattice are ordinary points.
    This is the exact solution family that lives on the whole torus with
    no seam or window.
    """
    if chart.topology != "torus":
        raise ValueError("the elliptic family lives on the torus")
    L = chart.grid.side
    v = np.pi * (chart.x + 1j * chart.y) / L
    t1, dt1 = _theta1(v)
    t2, dt2 = _theta2(v)
    c = complex(scale)
    p = c * t2**2
    q = t1**2
    dp = 2.0 * c * t2 * dt2 * (np.pi / L)
    dq = 2.0 * t1 * dt1 * (np.pi / L)
    values = stereo_pair(p, q)
    wirt = _pair_wirtinger(p, q, dp, dq)
    grad = np.stack([2.0 * wirt.real, 2.0 * (wirt * 1j).real], axis=-2)
    return MapField(chart, Sphere(2), values, analytic_gradient=grad)


def harmonic_wrap(chart: DomainChart, winding: int = 1) -> MapField:
    """Closed-geodesic map (cos 2 pi k x / side, sin ..., 0) on the torus."""
    target = Sphere(2)
    k = 2.0 * np.pi * winding / chart.grid.side
    phase = k * chart.x
    vals = np.stack([np.cos(phase), np.sin(phase), np.zeros_like(phase)], axis=-1)
    grad = np.zeros(chart.shape + (2, 3))
    grad[..., 0, 0] = -k * np.sin(phase)
    grad[..., 0, 1] = k * np.cos(phase)
    return MapField(chart, target, vals, analytic_gradient=grad)


def trivial_pair(kind: str, chart: DomainChart, target: TargetGeometry | None = None,
                 winding: int = 1, base_point=(0.0, 0.0, 1.0),
                 spinor_components=(1.0 + 0.0j, 0.0j),
                 spinor_direction=(1.0, 0.0, 0.0),
                 spinor_field=None) -> tuple[MapField, TwistedSpinorField]:
    """The two trivial families: a harmonic map with zero spinor, or a
    constant map with a constant (hence harmonic) tangent spinor.

    The provided spinor data must already satisfy the flat Dirac equation;
    constants do, and anything else raises.  ``spinor_field`` overrides the
    constant construction with an explicit (n, n, K, 2) array (projected
    tangent before the harmonicity check).
    """
    target = Sphere(2) if target is None else target
    if kind == "harmonic_map":
        phi = harmonic_wrap(chart, winding=winding)
        return phi, TwistedSpinorField.zero(chart, phi.target)
    if kind == "constant_map_harmonic_spinor":
        phi = MapField.constant(chart, target, base_point)
        K = target.ambient_dim
        if spinor_field is None:
            direction = np.asarray(spinor_direction, dtype=float)
            if direction.shape != (K,):
                raise ValueError(f"spinor direction needs {K} components")
            comp = np.asarray(spinor_components, dtype=np.complex128)
            raw = np.zeros(chart.shape + (K, 2), dtype=np.complex128)
            raw[:] = direction[:, None] * comp[None, :]
        else:
            raw = np.asarray(spinor_field, dtype=np.complex128)
        psi = project_spinor(phi, raw)
        slashed = flat_dirac(psi.values, chart)
        worst = float(np.sqrt(spinor_norm2(slashed).sum(axis=-1))[chart.interior_mask].max())
        scale = float(np.sqrt(psi.norm2_density().max())) + 1e-300
        if worst / scale > 1e-10:
            raise ValueError(f"provided spinor is not harmonic: residual {worst:.3e}")
        return phi, psi
    raise ValueError(f"unknown trivial pair kind {kind!r}")


def sphere_dirichlet_energy(rmap: RationalMap, n: int = 128) -> float:
    """Dirichlet energy of phi = stereo o R over the whole sphere.

    Quadrature in two stereographic charts glued by a smooth partition of
    unity: chart 1 covers |z| <= 1.3, chart 2 the image of |z| >= 0.77
    under z -> 1/conj(z).  Each integrand is smooth with compact support
    inside a periodic square, so the node sum converges at the stencil
    order.  A degree-d map gives 8 pi d.
    """
    side = 2.72
    chart = DomainChart.torus(n, side=side)
    r = np.abs(chart.z)

    def weight(rad):
        # C^1 ramp from 1 (r <= 0.8) to 0 (r >= 1.25).
        t = np.clip((rad - 0.8) / 0.45, 0.0, 1.0)
        return 0.5 * (1.0 + np.cos(np.pi * t))

    w_south = weight(r)
    phi_s = conformal_map_field(rmap, chart)
    dens_s = (phi_s.gradient(analytic=True) ** 2).sum(axis=(-2, -1))
    with np.errstate(divide="ignore"):
        w_north = 1.0 - weight(1.0 / np.where(r > 1e-12, r, 1e-12))
    w_north = np.where(r > 1e-12, w_north, 1.0)
    rinv = rmap.inverted_chart()
    phi_n = conformal_map_field(rinv, chart, conjugate_input=True)
    dens_n = (phi_n.gradient(analytic=True) ** 2).sum(axis=(-2, -1))
    return chart.integrate(dens_s * w_south) + chart.integrate(dens_n * w_north)
