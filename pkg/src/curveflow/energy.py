"""Energies and nodal diagnostics of Hermite curves."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .mesh_hermite import HermiteCurve, QuadratureRule, gauss_rule, shape_functions
from .surface import LevelSetSurface

DEFAULT_QUADRATURE = 4


def quadrature_rule(quadrature) -> QuadratureRule:
    if quadrature is None:
        return gauss_rule(DEFAULT_QUADRATURE)
    if isinstance(quadrature, QuadratureRule):
        return quadrature
    return gauss_rule(int(quadrature))


def second_derivative_at_quadrature(u: HermiteCurve, quadrature=None):
    """u'' at quadrature points, shape (J, q, 3), with absolute weights (J, q)."""
    rule = quadrature_rule(quadrature)
    h = u.partition.element_lengths
    N2 = shape_functions(rule.points, 2)
    upp = np.einsum("qi,eik->eqk", N2, u.element_coefficients()) / (h**2)[:, None, None]
    return upp, h[:, None] * rule.weights


def normal_points(u: HermiteCurve, quadrature=None, midpoint_normal: bool = True) -> np.ndarray:
    """Points where n_S is evaluated: element midpoints (J, 1, 3) or quadrature points (J, q, 3)."""
    xi = np.array([0.5]) if midpoint_normal else quadrature_rule(quadrature).points
    return np.einsum("qi,eik->eqk", shape_functions(xi, 0), u.element_coefficients())


@dataclass
class NormalCurvatureTerms:
    """Quadrature data of u'' . n_S shared by the geodesic energy and its derivative."""

    weights: np.ndarray  # (J, q)
    upp: np.ndarray  # (J, q, 3)
    points: np.ndarray  # where n_S is evaluated, (J, q, 3) or (J, 1, 3)
    normal: np.ndarray  # same leading shape as points
    normal_curvature: np.ndarray  # (J, q)


def normal_curvature_terms(u: HermiteCurve, S: LevelSetSurface, quadrature=None,
                           midpoint_normal: bool = True) -> NormalCurvatureTerms:
    upp, w = second_derivative_at_quadrature(u, quadrature)
    pts = normal_points(u, quadrature, midpoint_normal)
    n = S.normal(pts)
    kn = np.einsum("eqk,eqk->eq", upp, np.broadcast_to(n, upp.shape))
    return NormalCurvatureTerms(w, upp, pts, n, kn)


def bending_energy(u: HermiteCurve, quadrature=None) -> float:
    """1/2 int |u''|^2; exact for rules with at least two points."""
    upp, w = second_derivative_at_quadrature(u, quadrature)
    return 0.5 * float(np.sum(w * np.sum(upp**2, axis=-1)))


def normal_part_integral(u: HermiteCurve, S: LevelSetSurface, quadrature=None,
                         midpoint_normal: bool = True) -> float:
    """int |u'' . n_S|^2 with n_S at quadrature points or element midpoints."""
    t = normal_curvature_terms(u, S, quadrature, midpoint_normal)
    return float(np.sum(t.weights * t.normal_curvature**2))


def geodesic_energy(u: HermiteCurve, S: LevelSetSurface, gamma: float, quadrature=None,
                    midpoint_normal: bool = True) -> float:
    """1/2 int |u''|^2 - gamma |u'' . n_S(u)|^2."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    t = normal_curvature_terms(u, S, quadrature, midpoint_normal)
    full = np.sum(t.upp**2, axis=-1)
    return 0.5 * float(np.sum(t.weights * (full - gamma * t.normal_curvature**2)))


def penetration(u: HermiteCurve, delta: float) -> np.ndarray:
    """Nodal negative parts (u_3 - delta)_- (nonpositive)."""
    return np.minimum(u.values[:, 2] - delta, 0.0)


def penalty_energy(u: HermiteCurve, delta: float, eps: float) -> float:
    """(1/2 eps) int I_h (u_3 - delta)_-^2."""
    if not eps > 0:
        raise ValueError("penalty parameter must be positive")
    neg = penetration(u, delta)
    return float(u.partition.node_weights() @ neg**2) / (2.0 * eps)


def indentation_energy(u: HermiteCurve, delta: float, eps: float, quadrature=None) -> float:
    """Penalized bending energy without the constant -pi offset."""
    return bending_energy(u, quadrature) + penalty_energy(u, delta, eps)


def penetration_norm(u: HermiteCurve, delta: float) -> float:
    """||(u_3 - delta)_-||_{L^2_h}."""
    neg = penetration(u, delta)
    return float(np.sqrt(u.partition.node_weights() @ neg**2))


def constraint_violations(u: HermiteCurve, S: LevelSetSurface):
    """Nodal maxima of ||u'|^2 - 1| and |Phi_S(u)|."""
    arclength = np.abs(np.sum(u.derivs**2, axis=1) - 1.0)
    surf = np.abs(S.phi(u.values))
    return float(arclength.max()), float(surf.max())


@dataclass
class Diagnostics:
    bending: float
    geodesic: float = float("nan")
    penalty: float = 0.0
    indentation_total: float = float("nan")
    arclength_violation: float = 0.0
    surface_violation: float = 0.0
    penetration: float = 0.0
    max_penetration: float = 0.0
    step_norm: float = 0.0

    def as_dict(self):
        return asdict(self)


def diagnose(u: HermiteCurve, S: LevelSetSurface, *, gamma=None, delta=None, eps=None,
             quadrature=None, midpoint_normal=True, step_norm=0.0) -> Diagnostics:
    bend = bending_energy(u, quadrature)
    d = Diagnostics(bending=bend, step_norm=step_norm)
    if gamma is not None:
        d.geodesic = geodesic_energy(u, S, gamma, quadrature, midpoint_normal)
    if delta is not None:
        d.penetration = penetration_norm(u, delta)
        d.max_penetration = float(-penetration(u, delta).min())
        if eps is not None:
            d.penalty = penalty_energy(u, delta, eps)
            d.indentation_total = bend + d.penalty - np.pi
    d.arclength_violation, d.surface_violation = constraint_violations(u, S)
    return d
