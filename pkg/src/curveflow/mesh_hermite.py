"""Partitions, C1 cubic Hermite curves, quadrature and lumped inner products.

Degrees of freedom are stored per node as a value ``p_j = u(z_j)`` and a
derivative ``t_j = u'(z_j)``, both in R^3.  The flat dof vector used by the
assembly routines orders them node by node as ``[p_j, t_j]`` so node ``j``
owns entries ``6j .. 6j+5``.  On periodic partitions node ``J`` is the same
dof node as node ``0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DOFS_PER_NODE = 6


@dataclass(frozen=True)
class Partition:
    nodes: np.ndarray
    periodic: bool = False

    def __post_init__(self):
        z = np.asarray(self.nodes, dtype=float)
        if z.ndim != 1 or z.size < 3:
            raise ValueError("a partition needs at least two elements")
        if z[0] != 0.0:
            raise ValueError("partitions start at z_0 = 0")
        if np.any(np.diff(z) <= 0.0):
            raise ValueError("partition nodes must be strictly increasing")
        z.setflags(write=False)
        object.__setattr__(self, "nodes", z)

    @property
    def length(self) -> float:
        return float(self.nodes[-1])

    @property
    def n_elements(self) -> int:
        return self.nodes.size - 1

    @property
    def n_nodes(self) -> int:
        """Number of dof nodes (node J is dropped when periodic)."""
        return self.n_elements if self.periodic else self.n_elements + 1

    @property
    def n_dofs(self) -> int:
        return DOFS_PER_NODE * self.n_nodes

    @property
    def element_lengths(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def mesh_size(self) -> float:
        return float(self.element_lengths.max())

    @property
    def node_coordinates(self) -> np.ndarray:
        """Parameter values of the dof nodes."""
        return self.nodes[: self.n_nodes]

    def element_node_indices(self) -> np.ndarray:
        """(J, 2) array of dof-node indices of the element end points."""
        left = np.arange(self.n_elements)
        right = (left + 1) % self.n_nodes
        return np.stack([left, right], axis=1)

    def element_dof_indices(self) -> np.ndarray:
        """(J, 12) global dof indices in local order [p0, t0, p1, t1]."""
        en = self.element_node_indices()
        offs = np.arange(DOFS_PER_NODE)
        return np.concatenate(
            [DOFS_PER_NODE * en[:, :1] + offs, DOFS_PER_NODE * en[:, 1:] + offs], axis=1
        )

    def node_weights(self) -> np.ndarray:
        """Trapezoidal weights omega_j of the lumped inner product."""
        h = self.element_lengths
        w = np.zeros(self.n_elements + 1)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        if self.periodic:
            w[0] += w[-1]
            w = w[:-1]
        return w

    def locate(self, x):
        """Element index and local coordinate in [0, 1] for parameters ``x``.

        Interior nodes belong to the element on their right; ``x = L`` maps to
        the last element.  Periodic partitions wrap ``x`` into ``[0, L)``.
        """
        x = np.asarray(x, dtype=float)
        L = self.length
        if self.periodic:
            x = np.mod(x, L)
        elif np.any((x < 0.0) | (x > L)):
            raise ValueError(f"parameter outside [0, {L}]")
        e = np.searchsorted(self.nodes, x, side="right") - 1
        e = np.clip(e, 0, self.n_elements - 1)
        h = self.element_lengths[e]
        return e, (x - self.nodes[e]) / h


def make_uniform_partition(L: float, J: int, periodic: bool = False) -> Partition:
    if not L > 0:
        raise ValueError("partition length must be positive")
    if int(J) != J or J < 2:
        raise ValueError("need J >= 2 elements")
    return Partition(np.linspace(0.0, L, int(J) + 1), periodic=periodic)


def shape_functions(xi, order: int = 0) -> np.ndarray:
    """Reference Hermite cubics on [0, 1] and their xi-derivatives.

    Columns are (value_0, slope_0, value_1, slope_1); slope functions are the
    unscaled ones, the element length enters through the coefficients.
    """
    xi = np.asarray(xi, dtype=float)
    if order == 0:
        cols = [1 - 3 * xi**2 + 2 * xi**3, xi - 2 * xi**2 + xi**3,
                3 * xi**2 - 2 * xi**3, -(xi**2) + xi**3]
    elif order == 1:
        cols = [-6 * xi + 6 * xi**2, 1 - 4 * xi + 3 * xi**2,
                6 * xi - 6 * xi**2, -2 * xi + 3 * xi**2]
    elif order == 2:
        cols = [-6 + 12 * xi, -4 + 6 * xi, 6 - 12 * xi, -2 + 6 * xi]
    elif order == 3:
        one = np.ones_like(xi)
        cols = [12 * one, 6 * one, -12 * one, 6 * one]
    else:
        raise ValueError("order must be 0, 1, 2 or 3")
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class HermiteCurve:
    partition: Partition
    values: np.ndarray
    derivs: np.ndarray

    def __post_init__(self):
        n = self.partition.n_nodes
        for name in ("values", "derivs"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (n, 3):
                raise ValueError(f"{name} must have shape ({n}, 3), got {arr.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_vector(cls, partition: Partition, vec) -> "HermiteCurve":
        blocks = np.asarray(vec, dtype=float).reshape(partition.n_nodes, DOFS_PER_NODE)
        return cls(partition, blocks[:, :3], blocks[:, 3:])

    @classmethod
    def zeros(cls, partition: Partition) -> "HermiteCurve":
        return cls(partition, np.zeros((partition.n_nodes, 3)), np.zeros((partition.n_nodes, 3)))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.values, self.derivs], axis=1).ravel()

    def element_coefficients(self) -> np.ndarray:
        """(J, 4, 3) coefficients [p0, h t0, p1, h t1] per element."""
        en = self.partition.element_node_indices()
        h = self.partition.element_lengths[:, None]
        return np.stack([self.values[en[:, 0]], h * self.derivs[en[:, 0]],
                         self.values[en[:, 1]], h * self.derivs[en[:, 1]]], axis=1)

    def eval(self, x, order: int = 0) -> np.ndarray:
        """u, u' or u'' at parameter(s) ``x``; shape ``x.shape + (3,)``."""
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        e, xi = self.partition.locate(x)
        coef = self.element_coefficients()[e]
        N = shape_functions(xi, order)
        h = self.partition.element_lengths[e]
        return np.einsum("...i,...ik->...k", N, coef) / (h**order)[..., None]

    def sample(self, per_element: int = 8):
        """Parameters and points on a uniform sub-sampling of every element."""
        z = self.partition.nodes
        xs = [np.linspace(z[j], z[j + 1], per_element, endpoint=False) for j in range(len(z) - 1)]
        x = np.concatenate(xs + [z[-1:]])
        if self.partition.periodic:
            x = x[:-1]
        return x, self.eval(x, 0)


def interpolate_31(v, dv, partition: Partition) -> HermiteCurve:
    """Hermite interpolant matching ``v`` and ``dv`` at every node.

    ``v`` and ``dv`` map an array of parameters (N,) to points (N, 3).
    """
    z = partition.node_coordinates
    return HermiteCurve(partition, np.asarray(v(z), dtype=float), np.asarray(dv(z), dtype=float))


class PiecewiseLinear:
    """Continuous piecewise-linear function given by nodal values."""

    def __init__(self, partition: Partition, values):
        values = np.asarray(values, dtype=float)
        if values.shape[0] != partition.n_nodes:
            raise ValueError(f"expected {partition.n_nodes} nodal values, got {values.shape[0]}")
        self.partition = partition
        self.values = values

    def __call__(self, x):
        e, xi = self.partition.locate(x)
        en = self.partition.element_node_indices()[e]
        xi = xi.reshape(xi.shape + (1,) * (self.values.ndim - 1))
        return (1 - xi) * self.values[en[..., 0]] + xi * self.values[en[..., 1]]


def nodal_interpolate(values, partition: Partition) -> PiecewiseLinear:
    return PiecewiseLinear(partition, values)


def lumped_inner_product(v_nodal, w_nodal, partition: Partition) -> float:
    """(v, w)_h: integral of the piecewise-linear interpolant of v*w."""
    v = np.asarray(v_nodal, dtype=float)
    w = np.asarray(w_nodal, dtype=float)
    prod = v * w
    if prod.ndim > 1:
        prod = prod.reshape(prod.shape[0], -1).sum(axis=1)
    return float(partition.node_weights() @ prod)


def lumped_norm(v_nodal, partition: Partition, p: float = 2) -> float:
    """Discrete L^p_h norm; ``p = inf`` gives the nodal maximum."""
    v = np.asarray(v_nodal, dtype=float)
    a = np.abs(v) if v.ndim == 1 else np.linalg.norm(v, axis=1)
    if np.isinf(p):
        return float(a.max()) if a.size else 0.0
    return float((partition.node_weights() @ a**p) ** (1.0 / p))


def max_norm(v_nodal) -> float:
    v = np.asarray(v_nodal, dtype=float)
    a = np.abs(v) if v.ndim == 1 else np.linalg.norm(v, axis=1)
    return float(a.max())


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int

    def on_partition(self, partition: Partition):
        """Absolute quadrature points (J, q) and weights (J, q) on all elements."""
        h = partition.element_lengths[:, None]
        return partition.nodes[:-1, None] + h * self.points, h * self.weights


def gauss_rule(points: int = 4) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1], exact up to degree 2*points - 1."""
    if int(points) != points or not 1 <= points <= 10:
        raise ValueError("supported Gauss rules have 1 to 10 points")
    x, w = np.polynomial.legendre.leggauss(int(points))
    return QuadratureRule(0.5 * (x + 1.0), 0.5 * w, 2 * int(points) - 1)
