"""Exact 2D Clifford algebra and the flat Dirac operator.

A spinor is a pair of complex numbers (f, g): the positive and negative
half-spinor components.  Grid fields store them in the last axis, so a
spinor field on an (n, n) chart is a complex array of shape (..., 2).

The two frame vectors act by the matrices

    e1 = [[0, 1], [-1, 0]],    e2 = [[0, i], [i, 0]],

which satisfy e_a e_b + e_b e_a = -2 delta_ab and are skew-adjoint for
the Hermitian metric <s, t> = conj(f_s) f_t + conj(g_s) g_t (antilinear
in the first slot).
"""

from __future__ import annotations

import numpy as np

E1 = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=np.complex128)
E2 = np.array([[0.0, 1.0j], [1.0j, 0.0]], dtype=np.complex128)


def spinor(f, g) -> np.ndarray:
    """Pack two complex components into a spinor array."""
    return np.array([f, g], dtype=np.complex128)


def hermitian(s, t) -> np.ndarray:
    """Hermitian pairing <s, t>, antilinear in s; sums only the spinor axis."""
    s = np.asarray(s)
    t = np.asarray(t)
    return (np.conj(s) * t).sum(axis=-1)


def spinor_norm2(s) -> np.ndarray:
    """|s|^2 = |f|^2 + |g|^2 per grid node."""
    s = np.asarray(s)
    return (s.real**2 + s.imag**2).sum(axis=-1)


def clifford_e1(s) -> np.ndarray:
    """e1 . (f, g) = (g, -f)."""
    s = np.asarray(s, dtype=np.complex128)
    return np.stack([s[..., 1], -s[..., 0]], axis=-1)


def clifford_e2(s) -> np.ndarray:
    """e2 . (f, g) = (i g, i f)."""
    s = np.asarray(s, dtype=np.complex128)
    return np.stack([1j * s[..., 1], 1j * s[..., 0]], axis=-1)


def clifford_mul(v, s) -> np.ndarray:
    """Clifford action (v1 e1 + v2 e2) . s.

    ``v`` is a real 2-vector or a pair of arrays broadcastable against the
    grid axes of ``s``.  Writing w = v1 + i v2, the action sends (f, g) to
    (w g, conj(-w) ... ) -- explicitly ((v1 + i v2) g, (-v1 + i v2) f).
    """
    v1, v2 = v
    s = np.asarray(s, dtype=np.complex128)
    f = s[..., 0]
    g = s[..., 1]
    return np.stack([(v1 + 1j * v2) * g, (-v1 + 1j * v2) * f], axis=-1)


def flat_dirac(field, chart, form: str = "frame") -> np.ndarray:
    """Discrete flat Dirac operator on a grid spinor field.

    ``form="frame"`` evaluates e1 . D_x + e2 . D_y with the chart's centered
    stencils; ``form="cauchy_riemann"`` evaluates 2 (dg/dzbar, -df/dz).
    The two agree to machine precision because they are the same linear
    combination of the same stencil outputs.

    On disk charts the output is meaningful only on ``chart.valid_mask(1)``.
    """
    field = np.asarray(field, dtype=np.complex128)
    dx = chart.derivative(field, axis="x")
    dy = chart.derivative(field, axis="y")
    if form == "frame":
        return clifford_e1(dx) + clifford_e2(dy)
    if form == "cauchy_riemann":
        dz = 0.5 * (dx - 1j * dy)
        dzbar = 0.5 * (dx + 1j * dy)
        return np.stack([2.0 * dzbar[..., 1], -2.0 * dz[..., 0]], axis=-1)
    raise ValueError(f"unknown flat_dirac form: {form!r}")


def twistor_eval(psi0, psi1, x) -> np.ndarray:
    """Affine twistor spinor Psi(x) = Psi0 + (x1 e1 + x2 e2) . Psi1 at a point."""
    x1, x2 = x
    psi0 = np.asarray(psi0, dtype=np.complex128)
    psi1 = np.asarray(psi1, dtype=np.complex128)
    return psi0 + clifford_mul((x1, x2), psi1)


def twistor_field(chart, psi0, psi1) -> np.ndarray:
    """Sample the affine twistor spinor on every node of the chart."""
    psi0 = np.asarray(psi0, dtype=np.complex128)
    psi1 = np.asarray(psi1, dtype=np.complex128)
    out = np.empty(chart.shape + (2,), dtype=np.complex128)
    w = chart.x + 1j * chart.y
    # Psi = (f0 + z q, g0 - zbar p) for Psi1 = (p, q): the closed form of
    # Psi0 + x . Psi1 under the e1/e2 matrices.
    out[..., 0] = psi0[0] + w * psi1[1]
    out[..., 1] = psi0[1] - np.conj(w) * psi1[0]
    return out


def twistor_defect(field, chart) -> float:
    """Sup over interior nodes and both frame directions of the twistor residual.

    The residual is D_a Psi + (1/2) e_a . (flat_dirac Psi); it vanishes exactly
    on the affine family because centered differences are exact on degree-1
    fields.
    """
    field = np.asarray(field, dtype=np.complex128)
    slashed = flat_dirac(field, chart)
    mask = chart.interior_mask
    worst = 0.0
    for axis, cliff in (("x", clifford_e1), ("y", clifford_e2)):
        res = chart.derivative(field, axis=axis) + 0.5 * cliff(slashed)
        mag = np.sqrt(spinor_norm2(res))
        worst = max(worst, float(mag[mask].max()))
    return worst
