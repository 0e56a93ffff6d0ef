"""Level-set surfaces with normals, normal Jacobians and Newton projection.

All callables act on arrays of points with shape ``(..., 3)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ProjectionError, SingularSurfacePointError

TOL_GRAD = 1e-10


@dataclass(frozen=True)
class LevelSetSurface:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    grad_phi: Callable[[np.ndarray], np.ndarray]
    hess_phi: Callable[[np.ndarray], np.ndarray]
    params: tuple = ()

    def _grad_checked(self, s, tol_grad):
        g = self.grad_phi(s)
        gn = np.linalg.norm(g, axis=-1)
        if np.any(gn <= tol_grad):
            raise SingularSurfacePointError(
                f"gradient of {self.name} level set vanishes (|grad| = {gn.min():.3e})"
            )
        return g, gn

    def normal(self, s, tol_grad: float = TOL_GRAD) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        g, gn = self._grad_checked(s, tol_grad)
        return g / gn[..., None]

    def normal_jacobian(self, s, tol_grad: float = TOL_GRAD) -> np.ndarray:
        """Jacobian d n / d s = (I - n n^T) Hess(phi) / |grad phi|."""
        s = np.asarray(s, dtype=float)
        g, gn = self._grad_checked(s, tol_grad)
        n = g / gn[..., None]
        H = self.hess_phi(s)
        P = np.eye(3) - n[..., :, None] * n[..., None, :]
        return (P @ H) / gn[..., None, None]

    def project(self, s, tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
        """Move points onto the zero level set by gradient-direction Newton steps."""
        p = np.array(s, dtype=float)
        for _ in range(max_iter + 1):
            val = self.phi(p)
            if np.all(np.abs(val) <= tol):
                return p
            g, gn = self._grad_checked(p, TOL_GRAD)
            active = np.abs(val) > tol
            step = (val / gn**2)[..., None] * g
            p = np.where(active[..., None], p - step, p)
        res = float(np.max(np.abs(self.phi(p))))
        raise ProjectionError(f"projection onto {self.name} did not converge (|phi| = {res:.3e})", res)


def sphere() -> LevelSetSurface:
    """Unit sphere as the zero set of |s|^2 - 1."""

    def phi(s):
        return np.sum(np.asarray(s) ** 2, axis=-1) - 1.0

    def grad(s):
        return 2.0 * np.asarray(s, dtype=float)

    def hess(s):
        s = np.asarray(s, dtype=float)
        return np.broadcast_to(2.0 * np.eye(3), s.shape[:-1] + (3, 3)).copy()

    return LevelSetSurface("sphere", phi, grad, hess)


def torus(R: float = 2.0, r: float = 1.0) -> LevelSetSurface:
    """Torus (|s|^2 + R^2 - r^2)^2 - 4 R^2 (|s|^2 - s_3^2) = 0 around the s_3 axis."""
    if not (R > r > 0):
        raise ValueError("torus needs R > r > 0")
    c = R * R - r * r
    planar = np.diag([1.0, 1.0, 0.0])

    def phi(s):
        s = np.asarray(s, dtype=float)
        sq = np.sum(s**2, axis=-1)
        return (sq + c) ** 2 - 4 * R * R * (sq - s[..., 2] ** 2)

    def grad(s):
        s = np.asarray(s, dtype=float)
        q = np.sum(s**2, axis=-1) + c
        return 4 * q[..., None] * s - 8 * R * R * (s @ planar)

    def hess(s):
        s = np.asarray(s, dtype=float)
        q = np.sum(s**2, axis=-1) + c
        return (4 * q[..., None, None] * np.eye(3) + 8 * s[..., :, None] * s[..., None, :]
                - 8 * R * R * planar)

    return LevelSetSurface("torus", phi, grad, hess, params=(R, r))
