"""Discrete flat 2D charts: periodic torus and unit disk.

Grids are uniform with n nodes per side.  Arrays are indexed [iy, ix]
(row-major, y outer) and extra trailing axes carry field components.
All derivative stencils are second-order centered differences; there are
no one-sided boundary stencils.  On the disk, fields live on the full
square but only the region |z| <= 1 is the chart; identities are
evaluated on the interior mask |z| <= 1 - 4h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_AXES = {"x": 1, "y": 0}


@dataclass(frozen=True)
class Grid2D:
    """Uniform n x n grid over a square of physical side length ``side``.

    ``topology`` is "torus" (all stencils wrap) or "disk" (unit disk inside
    the square; wrap values outside the disk are never trusted).  ``window``
    optionally restricts the evaluation region of a torus chart to the
    central square of that side fraction, used when sampling non-periodic
    fields whose seam must stay out of every norm.
    """

    n: int
    side: float
    topology: str = "torus"
    window: float | None = None

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("grid needs n >= 8")
        if self.side <= 0:
            raise ValueError("side must be positive")
        if self.topology not in ("torus", "disk"):
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.window is not None and not (0.0 < self.window <= 1.0):
            raise ValueError("window must lie in (0, 1]")

    @property
    def h(self) -> float:
        return self.side / self.n


class DomainChart:
    """A grid plus metric data: conformal factor rho (default 1) and the
    scalar curvature of the chart metric (0 for rho == 1).

    The chart is immutable after construction; all methods are pure.
    """

    def __init__(self, grid: Grid2D, conformal_factor=None, scalar_curvature: float = 0.0):
        self.grid = grid
        n, side = grid.n, grid.side
        h = grid.h
        if grid.topology == "torus":
            coords = -0.5 * side + h * np.arange(n)
        else:
            # Cell-centered: symmetric about 0, no node at the origin or
            # exactly on |z| = 1.
            coords = -0.5 * side + h * (np.arange(n) + 0.5)
        self.x, self.y = np.meshgrid(coords, coords, indexing="xy")
        self.z = self.x + 1j * self.y
        r = np.abs(self.z)
        if grid.topology == "disk":
            if side <= 2.0:
                raise ValueError("disk chart needs side > 2 to contain the unit disk")
            self.domain_mask = r <= 1.0
            self.interior_mask = r <= 1.0 - 4.0 * h
        else:
            self.domain_mask = np.ones((n, n), dtype=bool)
            if grid.window is None:
                self.interior_mask = self.domain_mask
            else:
                half = 0.5 * grid.window * side
                self.interior_mask = (np.abs(self.x) <= half) & (np.abs(self.y) <= half)
        if conformal_factor is None:
            self.conformal_factor = np.ones((n, n))
        else:
            cf = np.broadcast_to(np.asarray(conformal_factor, dtype=float), (n, n)).copy()
            if (cf <= 0).any():
                raise ValueError("conformal factor must be positive")
            self.conformal_factor = cf
        self.scalar_curvature = float(scalar_curvature)

    # -- constructors ------------------------------------------------------

    @classmethod
    def torus(cls, n: int, side: float = 1.0, window: float | None = None) -> "DomainChart":
        return cls(Grid2D(n=n, side=side, topology="torus", window=window))

    @classmethod
    def disk(cls, n: int, side: float = 2.2) -> "DomainChart":
        return cls(Grid2D(n=n, side=side, topology="disk"))

    # -- basic properties ---------------------------------------------------

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def shape(self) -> tuple[int, int]:
        return (self.grid.n, self.grid.n)

    @property
    def topology(self) -> str:
        return self.grid.topology

    def valid_mask(self, stencil_depth: int = 1) -> np.ndarray:
        """Nodes whose value survives ``stencil_depth`` nested centered stencils.

        On the torus every node qualifies (windowed charts keep their window).
        On the disk the trusted region erodes by 2h per derivative; the 4h
        interior margin covers two nested applications.
        """
        if self.topology == "torus":
            return self.interior_mask
        r = np.abs(self.z)
        return r <= 1.0 - 2.0 * stencil_depth * self.h

    def like(self, n: int) -> "DomainChart":
        """Same chart at a different resolution (for refinement studies)."""
        g = self.grid
        return DomainChart(Grid2D(n=n, side=g.side, topology=g.topology, window=g.window),
                           scalar_curvature=self.scalar_curvature)

    # -- stencil calculus ----------------------------------------------------

    def derivative(self, f, axis) -> np.ndarray:
        """Centered O(h^2) first derivative along "x" or "y".

        Stencils always wrap; on disk charts the wrap touches only nodes
        outside the unit disk, which no mask ever selects.
        """
        ax = _AXES[axis] if isinstance(axis, str) else int(axis)
        f = np.asarray(f)
        return (np.roll(f, -1, axis=ax) - np.roll(f, 1, axis=ax)) / (2.0 * self.h)

    def laplacian(self, f) -> np.ndarray:
        """Five-point Laplacian, O(h^2)."""
        f = np.asarray(f)
        out = -4.0 * f
        for ax in (0, 1):
            out = out + np.roll(f, -1, axis=ax) + np.roll(f, 1, axis=ax)
        return out / self.h**2

    # -- quadrature -----------------------------------------------------------

    def integrate(self, f, region=None) -> float | complex:
        """h^2-weighted node sum over the domain (or a boolean ``region``).

        The conformal factor enters as the area density rho, a no-op for the
        flat default.
        """
        f = np.asarray(f)
        mask = self.domain_mask if region is None else region
        vals = (f * self.conformal_factor)[mask]
        total = vals.sum()
        out = total * self.h**2
        return complex(out) if np.iscomplexobj(f) else float(out)

    def interp(self, f, px, py) -> np.ndarray:
        """Bilinear interpolation of a node field at physical points."""
        f = np.asarray(f)
        n, side, h = self.grid.n, self.grid.side, self.h
        x0 = -0.5 * side if self.topology == "torus" else -0.5 * side + 0.5 * h
        gx = (np.asarray(px) - x0) / h
        gy = (np.asarray(py) - x0) / h
        if self.topology == "torus":
            ix0 = np.floor(gx).astype(int)
            iy0 = np.floor(gy).astype(int)
            tx = gx - ix0
            ty = gy - iy0
            ix0 %= n
            iy0 %= n
            ix1 = (ix0 + 1) % n
            iy1 = (iy0 + 1) % n
        else:
            if (gx < 0).any() or (gx > n - 1).any() or (gy < 0).any() or (gy > n - 1).any():
                raise ValueError("interpolation point outside the disk chart square")
            ix0 = np.clip(np.floor(gx).astype(int), 0, n - 2)
            iy0 = np.clip(np.floor(gy).astype(int), 0, n - 2)
            tx = gx - ix0
            ty = gy - iy0
            ix1 = ix0 + 1
            iy1 = iy0 + 1
        if f.ndim > 2:
            tx = tx.reshape(tx.shape + (1,) * (f.ndim - 2))
            ty = ty.reshape(ty.shape + (1,) * (f.ndim - 2))
        return ((1 - tx) * (1 - ty) * f[iy0, ix0] + tx * (1 - ty) * f[iy0, ix1]
                + (1 - tx) * ty * f[iy1, ix0] + tx * ty * f[iy1, ix1])

    def circle_points(self, r: float, n_theta: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Equispaced angles and the corresponding points on |z| = r."""
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        return theta, r * np.cos(theta), r * np.sin(theta)

    def circle_integral(self, f, r: float, n_theta: int = 256) -> float | complex:
        """Line integral of ``f`` over the circle |z| = r (trapezoidal in angle).

        Requires a disk chart and 4h <= r <= 1 - 4h so the bilinear stencil
        never leaves the trusted region.
        """
        self._check_radius(r)
        theta, px, py = self.circle_points(r, n_theta)
        vals = self.interp(f, px, py)
        out = vals.sum(axis=0) * (2.0 * np.pi * r / n_theta)
        return complex(out) if np.iscomplexobj(np.asarray(f)) else float(out)

    def circle_mean_dtheta(self, f, r: float, n_theta: int = 256) -> float | complex:
        """Integral of ``f`` in dtheta over |z| = r (no arclength weight)."""
        self._check_radius(r)
        theta, px, py = self.circle_points(r, n_theta)
        vals = self.interp(f, px, py)
        out = vals.sum(axis=0) * (2.0 * np.pi / n_theta)
        return complex(out) if np.iscomplexobj(np.asarray(f)) else float(out)

    def _check_radius(self, r: float) -> None:
        if self.topology != "disk":
            raise ValueError("circle quadrature requires a disk chart")
        if not (4.0 * self.h <= r <= 1.0 - 4.0 * self.h):
            raise ValueError(f"radius {r} outside [4h, 1 - 4h] = "
                             f"[{4 * self.h:.4f}, {1 - 4 * self.h:.4f}]")


def bandlimited_field(chart: DomainChart, rng, components=(), kmax: int = 3,
                      amplitude: float = 1.0, modes=None) -> np.ndarray:
    """Random smooth field: a real trigonometric polynomial per component.

    Periodic on the chart's square, so it is smooth on the torus.  ``modes``
    optionally restricts which |k| enter (e.g. (2, 3) to exclude the slowest
    heat mode).
    """
    shape = tuple(components)
    out = np.zeros(chart.shape + shape)
    pad = (None,) * len(shape)
    tx = 2.0 * np.pi * (chart.x / chart.grid.side)
    ty = 2.0 * np.pi * (chart.y / chart.grid.side)
    ks = range(-kmax, kmax + 1)
    for kx in ks:
        for ky in ks:
            if kx == 0 and ky == 0:
                continue
            if modes is not None and max(abs(kx), abs(ky)) not in modes:
                continue
            a = rng.normal(size=shape)
            b = rng.normal(size=shape)
            phase = kx * tx + ky * ty
            out += np.cos(phase)[(...,) + pad] * a
            out += np.sin(phase)[(...,) + pad] * b
    peak = np.abs(out).max()
    if peak > 0:
        out *= amplitude / peak
    return out


class MoebiusMap:
    """Fractional linear map f(z) = (a z + b) / (c z + d), normalized ad - bc = 1.

    ``kind`` records the restriction class: "disk_automorphism" maps the unit
    disk onto itself, "plane_similarity" is affine (c = 0).  The holomorphic
    square root of the derivative, s(z) = 1 / (c z + d) with f'(z) = s(z)^2,
    is globally single-valued thanks to the normalization, which is what the
    half-spinor pullback needs.
    """

    def __init__(self, a, b, c, d, kind: str = "plane_similarity"):
        det = a * d - b * c
        if abs(det) < 1e-14:
            raise ValueError("degenerate Moebius coefficients")
        root = np.sqrt(complex(det))
        self.a, self.b, self.c, self.d = (np.complex128(t / root) for t in (a, b, c, d))
        if kind not in ("disk_automorphism", "plane_similarity"):
            raise ValueError(f"unknown Moebius kind {kind!r}")
        self.kind = kind

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def similarity(cls, scale, offset=0.0) -> "MoebiusMap":
        """f(z) = scale * z + offset."""
        return cls(scale, offset, 0.0, 1.0, kind="plane_similarity")

    @classmethod
    def disk_automorphism(cls, a, theta: float = 0.0) -> "MoebiusMap":
        """f(z) = e^{i theta} (z - a) / (1 - conj(a) z) with |a| < 1."""
        a = complex(a)
        if abs(a) >= 1.0:
            raise ValueError("disk automorphism needs |a| < 1")
        w = np.exp(1j * theta)
        return cls(w, -w * a, -np.conj(a), 1.0, kind="disk_automorphism")

    def __call__(self, z):
        return self.apply(z)[0]

    def apply(self, z):
        """Return (f(z), |f'(z)|); raises if z hits the pole."""
        z = np.asarray(z, dtype=np.complex128)
        den = self.c * z + self.d
        if (np.abs(den) < 1e-12).any():
            raise ValueError("Moebius pole inside the evaluation set")
        w = (self.a * z + self.b) / den
        lam = 1.0 / (np.abs(den) ** 2)
        return w, lam

    def sqrt_derivative(self, z) -> np.ndarray:
        """The global holomorphic root s(z) = 1/(c z + d), s^2 = f'."""
        z = np.asarray(z, dtype=np.complex128)
        return 1.0 / (self.c * z + self.d)

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other: (self . other)(z) = self(other(z))."""
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        kind = ("disk_automorphism"
                if self.kind == other.kind == "disk_automorphism" else "plane_similarity")
        return MoebiusMap(a, b, c, d, kind=kind)
