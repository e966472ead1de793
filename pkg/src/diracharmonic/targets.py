"""Extrinsic geometry of the target manifold.

Two targets are implemented: the round unit sphere S^n inside R^{n+1}
and flat R^K.  Everything downstream consumes only this interface:
projection to the manifold, tangent projection, the second fundamental
form A, the shape operator P, and the curvature tensor assembled from A
through the Gauss equation

    R(X, Y) Z = P(A(Y, Z); X) - P(A(X, Z); Y)      (flat ambient space).

Sign convention: on the unit sphere with outward normal p,
A(X, Y) = -<X, Y> p and P(xi; X) = -<xi, p> X, which gives
R(X, Y) Z = <Y, Z> X - <X, Z> Y and sectional curvature +1.

All methods broadcast: points and vectors are arrays with the ambient
index last, and vector slots accept complex arrays (the same formulas
extended complex-linearly), which is how spinor-valued tangent vectors
are handled.
"""

from __future__ import annotations

import numpy as np


def _dot(u, v):
    return (u * v).sum(axis=-1)


class TargetGeometry:
    """Common interface; see Sphere and Flat."""

    ambient_dim: int
    kind: str

    def project_point(self, p):
        raise NotImplementedError

    def tangent_project(self, p, X):
        raise NotImplementedError

    def second_fundamental(self, p, X, Y):
        raise NotImplementedError

    def shape_operator(self, p, xi, X):
        raise NotImplementedError

    def curvature(self, p, X, Y, Z):
        """Gauss-equation curvature from A and P; inputs are projected first."""
        p = np.asarray(p)
        X = self.tangent_project(p, X)
        Y = self.tangent_project(p, Y)
        Z = self.tangent_project(p, Z)
        return (self.shape_operator(p, self.second_fundamental(p, Y, Z), X)
                - self.shape_operator(p, self.second_fundamental(p, X, Z), Y))


class Sphere(TargetGeometry):
    """Round unit sphere S^dim embedded in R^{dim+1}."""

    def __init__(self, dim: int = 2):
        if dim < 1:
            raise ValueError("sphere dimension must be >= 1")
        self.dim = dim
        self.ambient_dim = dim + 1
        self.kind = "sphere"

    def project_point(self, p):
        p = np.asarray(p, dtype=float)
        norm = np.sqrt(_dot(p, p))
        if (norm < 1e-300).any():
            raise ValueError("cannot project the origin to the sphere")
        return p / norm[..., None]

    def tangent_project(self, p, X):
        p = np.asarray(p)
        X = np.asarray(X)
        return X - p * _dot(p, X)[..., None]

    def second_fundamental(self, p, X, Y):
        """A(X, Y) = -<X, Y> p after projecting X, Y tangent."""
        p = np.asarray(p)
        X = self.tangent_project(p, X)
        Y = self.tangent_project(p, Y)
        return -_dot(X, Y)[..., None] * p

    def shape_operator(self, p, xi, X):
        """P(xi; X) = -<xi, p> X; X is projected tangent first."""
        p = np.asarray(p)
        X = self.tangent_project(p, X)
        return -_dot(xi, p)[..., None] * X


class Flat(TargetGeometry):
    """R^K with the identity chart: A, P and the curvature all vanish."""

    def __init__(self, ambient_dim: int):
        if ambient_dim < 1:
            raise ValueError("ambient dimension must be >= 1")
        self.ambient_dim = ambient_dim
        self.kind = "flat"

    def project_point(self, p):
        return np.asarray(p, dtype=float)

    def tangent_project(self, p, X):
        return np.asarray(X)

    def second_fundamental(self, p, X, Y):
        shape = np.broadcast_shapes(np.shape(X), np.shape(Y))
        return np.zeros(shape)

    def shape_operator(self, p, xi, X):
        return np.zeros(np.shape(X))


def make_target(kind: str, dim: int) -> TargetGeometry:
    """Factory used by the config layer: sphere(dim) or flat(dim)."""
    if kind == "sphere":
        return Sphere(dim)
    if kind == "flat":
        return Flat(dim)
    raise ValueError(f"unknown target kind {kind!r}")
