"""Admissible initial curves: analytic seeds, arclength reparametrization, nodal projection."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DegenerateCurveError
from .mesh_hermite import HermiteCurve, make_uniform_partition
from .surface import LevelSetSurface, sphere

MIN_SPEED = 1e-8


@dataclass(frozen=True)
class ParametricCurve:
    """x -> R^3 on (0, length) with its derivative; both vectorized over x."""

    func: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    length: float = 2 * np.pi
    closed: bool = False

    def speed(self, x):
        return np.linalg.norm(self.deriv(np.atleast_1d(x)), axis=-1)


def torus_seed(a: float, b: float, R: float = 2.0, r: float = 1.0) -> ParametricCurve:
    """x -> (sin(ax)(R + r sin(bx)), cos(ax)(R + r sin(bx)), r cos(bx)) on (0, 2 pi)."""
    if a == 0 and b == 0:
        raise ValueError("torus seed needs (a, b) != (0, 0)")

    def func(x):
        x = np.asarray(x, dtype=float)
        rad = R + r * np.sin(b * x)
        return np.stack([np.sin(a * x) * rad, np.cos(a * x) * rad, r * np.cos(b * x)], axis=-1)

    def deriv(x):
        x = np.asarray(x, dtype=float)
        rad = R + r * np.sin(b * x)
        drad = r * b * np.cos(b * x)
        return np.stack([a * np.cos(a * x) * rad + np.sin(a * x) * drad,
                         -a * np.sin(a * x) * rad + np.cos(a * x) * drad,
                         -r * b * np.sin(b * x)], axis=-1)

    closed = float(a).is_integer() and float(b).is_integer()
    return ParametricCurve(func, deriv, 2 * np.pi, closed)


def reparametrize_arclength(c: ParametricCurve, J: int, periodic: bool | None = None,
                            rtol: float = 1e-10) -> HermiteCurve:
    """Hermite curve with nodes at equal arclength and exact unit nodal tangents."""
    periodic = c.closed if periodic is None else periodic
    probe = np.linspace(0.0, c.length, 64 * J + 1)
    if np.min(c.speed(probe)) < MIN_SPEED:
        raise DegenerateCurveError("parametric curve is not regular")

    def speed(x):
        return float(c.speed(x)[0])

    panels = np.linspace(0.0, c.length, 4 * J + 1)
    pieces = [quad(speed, lo, hi, epsabs=0.0, epsrel=rtol * 1e-2, limit=200)[0]
              for lo, hi in zip(panels[:-1], panels[1:])]
    cum = np.concatenate([[0.0], np.cumsum(pieces)])
    L = cum[-1]
    targets = np.linspace(0.0, L, J + 1)
    xs = np.empty(J + 1)
    xs[0], xs[-1] = 0.0, c.length
    for j in range(1, J):
        k = min(np.searchsorted(cum, targets[j], side="right") - 1, len(pieces) - 1)
        lo, hi = panels[k], panels[k + 1]

        def excess(x, k=k, lo=lo, s=targets[j]):
            return cum[k] + quad(speed, lo, x, epsabs=0.0, epsrel=rtol * 1e-2)[0] - s

        xs[j] = lo if excess(lo) >= 0 else brentq(excess, lo, hi, xtol=1e-15)
    part = make_uniform_partition(L, J, periodic)
    xs = xs[: part.n_nodes]
    d = c.deriv(xs)
    return HermiteCurve(part, c.func(xs), d / np.linalg.norm(d, axis=1)[:, None])


def project_to_admissible(u: HermiteCurve, S: LevelSetSurface, delta: float | None = None
                          ) -> HermiteCurve:
    """Nodal projection into A_h: values onto S, tangents tangent to S with unit length.

    With ``delta`` (sphere only) nodal values below the obstacle are moved to
    the circle u_3 = delta on the sphere.
    """
    vals = S.project(u.values)
    if delta is not None:
        low = vals[:, 2] < delta
        if np.any(low):
            horiz = vals[low, :2]
            hn = np.linalg.norm(horiz, axis=1)
            if np.any(hn == 0.0):
                raise DegenerateCurveError("cannot move a pole point onto the obstacle circle")
            rho = np.sqrt(max(1.0 - delta * delta, 0.0))
            vals[low, :2] = rho * horiz / hn[:, None]
            vals[low, 2] = delta
            vals = S.project(vals)
    n = S.normal(vals)
    t = u.derivs - np.sum(u.derivs * n, axis=1)[:, None] * n
    tn = np.linalg.norm(t, axis=1)
    if np.any(tn < MIN_SPEED):
        raise DegenerateCurveError("nodal tangent is parallel to the surface normal")
    return HermiteCurve(u.partition, vals, t / tn[:, None])


def random_periodic_admissible(seed: int, J: int, delta: float, amplitude: float = 0.3
                               ) -> HermiteCurve:
    """Seeded random closed curve on the unit sphere with nodal values above ``delta``.

    A latitude circle at height max(delta, 0.3) is perturbed by a random
    Fourier series with modes up to J/8 whose sup norm equals ``amplitude``,
    sampled at the nodes of a periodic partition of (0, 2 pi) and corrected
    nodally.
    """
    if J < 8:
        raise ValueError("need J >= 8")
    part = make_uniform_partition(2 * np.pi, J, periodic=True)
    height = max(delta, 0.3)
    rho = np.sqrt(1.0 - height**2)
    rng = np.random.default_rng(seed)
    modes = np.arange(1, max(1, J // 8) + 1)
    ca = rng.standard_normal((modes.size, 3)) / modes[:, None]
    sa = rng.standard_normal((modes.size, 3)) / modes[:, None]

    def pert(x, order):
        kx = np.outer(x, modes)
        if order == 0:
            return np.cos(kx) @ ca + np.sin(kx) @ sa
        return (-np.sin(kx) * modes) @ ca + (np.cos(kx) * modes) @ sa

    fine = np.linspace(0.0, 2 * np.pi, 64 * J, endpoint=False)
    sup = np.max(np.linalg.norm(pert(fine, 0), axis=1))
    scale = amplitude / sup if sup > 0 else 0.0
    z = part.node_coordinates
    base = np.stack([rho * np.cos(z), rho * np.sin(z), np.full_like(z, height)], axis=1)
    dbase = np.stack([-rho * np.sin(z), rho * np.cos(z), np.zeros_like(z)], axis=1)
    raw = HermiteCurve(part, base + scale * pert(z, 0), dbase + scale * pert(z, 1))
    return project_to_admissible(raw, sphere(), delta)


def single_fold_curve(delta: float, seed: int = 0, sharpness: int = 16,
                      roughness: float = 0.05, length: float = 2 * np.pi) -> ParametricCurve:
    """Closed curve of the given length on the unit sphere with one fold above ``delta``.

    The height is delta + A b(x) (1 + eta(x)) with a bump b = ((1 + cos x)/2)^sharpness,
    a seeded random low-mode modulation |eta| <= roughness and the amplitude A
    chosen so that the curve has exactly the requested length.
    """
    rng = np.random.default_rng(seed)
    modes = np.arange(1, 4)
    ca, sa = rng.standard_normal((2, modes.size))
    norm = np.sum(np.abs(ca) + np.abs(sa))
    ca, sa = roughness * ca / norm, roughness * sa / norm
    shift = rng.uniform(0.0, 2 * np.pi)

    def shape(x):
        b = (0.5 * (1 + np.cos(x))) ** sharpness
        db = -0.5 * sharpness * np.sin(x) * (0.5 * (1 + np.cos(x))) ** (sharpness - 1)
        kx = np.multiply.outer(x, modes)
        eta = np.cos(kx) @ ca + np.sin(kx) @ sa
        deta = (-np.sin(kx) * modes) @ ca + (np.cos(kx) * modes) @ sa
        return b * (1 + eta), db * (1 + eta) + b * deta

    def build(A):
        def func(x):
            x = np.asarray(x, dtype=float)
            z = delta + A * shape(x)[0]
            rho = np.sqrt(1 - z * z)
            return np.stack([rho * np.cos(x + shift), rho * np.sin(x + shift), z], axis=-1)

        def deriv(x):
            x = np.asarray(x, dtype=float)
            s, ds = shape(x)
            z, dz = delta + A * s, A * ds
            rho = np.sqrt(1 - z * z)
            drho = -z * dz / rho
            return np.stack([drho * np.cos(x + shift) - rho * np.sin(x + shift),
                             drho * np.sin(x + shift) + rho * np.cos(x + shift), dz], axis=-1)

        return ParametricCurve(func, deriv, 2 * np.pi, closed=True)

    def curve_length(A):
        c = build(A)
        return quad(lambda x: float(c.speed(x)[0]), 0.0, 2 * np.pi, epsrel=1e-13, limit=400)[0]

    top = (1.0 - delta) / (1.0 + roughness) * (1 - 1e-9)
    if curve_length(top) < length:
        raise ValueError("a single fold cannot absorb the excess length; raise sharpness")
    A = brentq(lambda A: curve_length(A) - length, 0.0, top, xtol=1e-15)
    return build(A)


def single_fold_admissible(J: int, delta: float, seed: int = 0, **kwargs) -> HermiteCurve:
    """Arclength-parametrized single-fold start on a periodic partition of (0, 2 pi)."""
    u = reparametrize_arclength(single_fold_curve(delta, seed, **kwargs), J, periodic=True)
    # rescale the parameter domain to exactly 2 pi (length matches to quadrature accuracy)
    part = make_uniform_partition(2 * np.pi, J, periodic=True)
    return project_to_admissible(HermiteCurve(part, u.values, u.derivs), sphere(), delta)
