"""Global matrices, linearized constraints and right-hand sides of one time step."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .energy import normal_curvature_terms, quadrature_rule
from .errors import SingularSurfacePointError
from .mesh_hermite import DOFS_PER_NODE, HermiteCurve, Partition, shape_functions
from .surface import TOL_GRAD, LevelSetSurface

logger = logging.getLogger(__name__)

BC_KINDS = ("clamped", "both-ends-fixed", "periodic")


def element_mass(h: float) -> np.ndarray:
    """Scalar cubic Hermite mass matrix, dof order (v0, s0, v1, s1)."""
    return h / 420.0 * np.array([
        [156.0, 22 * h, 54.0, -13 * h],
        [22 * h, 4 * h * h, 13 * h, -3 * h * h],
        [54.0, 13 * h, 156.0, -22 * h],
        [-13 * h, -3 * h * h, -22 * h, 4 * h * h],
    ])


def element_bending(h: float) -> np.ndarray:
    """Scalar cubic Hermite matrix of int v'' w''."""
    return 1.0 / h**3 * np.array([
        [12.0, 6 * h, -12.0, 6 * h],
        [6 * h, 4 * h * h, -6 * h, 2 * h * h],
        [-12.0, -6 * h, 12.0, -6 * h],
        [6 * h, 2 * h * h, -6 * h, 4 * h * h],
    ])


def _assemble(partition: Partition, element_matrix) -> sp.csr_matrix:
    dofs = partition.element_dof_indices()
    blocks = np.stack([np.kron(element_matrix(h), np.eye(3)) for h in partition.element_lengths])
    rows = np.broadcast_to(dofs[:, :, None], blocks.shape).ravel()
    cols = np.broadcast_to(dofs[:, None, :], blocks.shape).ravel()
    n = partition.n_dofs
    return sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(n, n)).tocsr()


def mass_matrix(partition: Partition) -> sp.csr_matrix:
    """Consistent L^2 mass matrix of the vector Hermite space."""
    return _assemble(partition, element_mass)


def bending_matrix(partition: Partition) -> sp.csr_matrix:
    """Matrix of (u'', v'')."""
    return _assemble(partition, element_bending)


@dataclass(frozen=True)
class BoundaryCondition:
    """Boundary condition kind plus the optional affine target of the state.

    ``target`` holds the prescribed values of the pinned dofs (None when the
    condition is only used in its homogeneous form).
    """

    kind: str
    target: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in BC_KINDS:
            raise ValueError(f"unknown boundary condition {self.kind!r}; expected one of {BC_KINDS}")

    def pinned_dofs(self, partition: Partition) -> np.ndarray:
        if self.kind == "periodic":
            if not partition.periodic:
                raise ValueError("periodic boundary condition needs a periodic partition")
            return np.array([], dtype=int)
        if partition.periodic:
            raise ValueError(f"{self.kind} boundary condition on a periodic partition")
        if self.kind == "clamped":
            return np.arange(DOFS_PER_NODE)
        last = DOFS_PER_NODE * (partition.n_nodes - 1)
        return np.array([0, 1, 2, last, last + 1, last + 2])

    def with_target(self, u: HermiteCurve) -> "BoundaryCondition":
        """Same kind with the target taken from ``u`` (fixes the initial data)."""
        return BoundaryCondition(self.kind, u.vector[self.pinned_dofs(u.partition)].copy())

    def residual(self, u: HermiteCurve) -> float:
        if self.target is None or self.target.size == 0:
            return 0.0
        return float(np.max(np.abs(u.vector[self.pinned_dofs(u.partition)] - self.target)))


@dataclass
class ConstraintSystem:
    matrix: sp.csr_matrix
    labels: list
    dropped: list = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return self.matrix.shape[0]


def _independent(rows, tol):
    """Greedy selection of linearly independent rows (Gram-Schmidt)."""
    basis, keep = [], []
    for i, r in enumerate(rows):
        nr = np.linalg.norm(r)
        if nr == 0.0:
            continue
        q = r / nr
        for b in basis:
            q = q - (q @ b) * b
        if np.linalg.norm(q) > tol:
            basis.append(q / np.linalg.norm(q))
            keep.append(i)
    return keep


def linearized_constraints(u: HermiteCurve, S: LevelSetSurface, bc: BoundaryCondition,
                           tol: float = 1e-10) -> ConstraintSystem:
    """Rows of F_h[u]: nodal surface and tangent orthogonality plus bc rows.

    Every row touches the dofs of a single node, so redundancy (e.g. the
    surface row at a clamped node) is resolved node by node; bc rows win.
    """
    part = u.partition
    n_nodes = part.n_nodes
    grads = S.grad_phi(u.values)
    gnorm = np.linalg.norm(grads, axis=1)
    if np.any(gnorm <= TOL_GRAD):
        j = int(np.argmin(gnorm))
        raise SingularSurfacePointError(f"surface gradient vanishes at node {j}")

    # local candidate rows per node in the 6-dim node space
    cand = {j: [] for j in range(n_nodes)}
    for dof in bc.pinned_dofs(part):
        r = np.zeros(DOFS_PER_NODE)
        r[dof % DOFS_PER_NODE] = 1.0
        cand[dof // DOFS_PER_NODE].append((f"bc:{dof}", r))
    pinned_nodes = {d // DOFS_PER_NODE for d in bc.pinned_dofs(part)}

    data, cols, rowptr, labels, dropped = [], [], [0], [], []

    def push(label, j, local):
        nz = np.flatnonzero(local)
        data.extend(local[nz])
        cols.extend(DOFS_PER_NODE * j + nz)
        rowptr.append(len(data))
        labels.append(label)

    for j in sorted(pinned_nodes):
        for label, r in cand[j]:
            push(label, j, r)
    for j in range(n_nodes):
        surf = np.concatenate([grads[j], np.zeros(3)])
        tang = np.concatenate([np.zeros(3), u.derivs[j]])
        extra = [(f"surface@{j}", surf), (f"tangent@{j}", tang)]
        if j in pinned_nodes:
            rows = [r for _, r in cand[j]] + [r for _, r in extra]
            keep = set(_independent(rows, tol))
            offset = len(cand[j])
            for i, (label, r) in enumerate(extra):
                if offset + i in keep:
                    push(label, j, r)
                else:
                    dropped.append(label)
        else:
            for label, r in extra:
                if np.linalg.norm(r) <= tol:
                    logger.warning("dropping zero constraint row %s", label)
                    dropped.append(label)
                else:
                    push(label, j, r)
    if dropped:
        logger.debug("dropped dependent constraint rows: %s", dropped)
    B = sp.csr_matrix((np.array(data), np.array(cols, dtype=int), np.array(rowptr)),
                      shape=(len(labels), part.n_dofs))
    return ConstraintSystem(B, labels, dropped)


def _scatter(partition: Partition, local: np.ndarray) -> np.ndarray:
    """Sum per-element (J, 4, 3) local vectors into a global dof vector."""
    out = np.zeros(partition.n_dofs)
    np.add.at(out, partition.element_dof_indices().ravel(), local.reshape(-1))
    return out


def geodesic_rhs(u: HermiteCurve, S: LevelSetSurface, gamma: float, quadrature=None,
                 midpoint_normal: bool = True) -> np.ndarray:
    """Vector g with g . v = gamma int (u''.n)(v''.n + u''.n'(u) v) for all v in V_h.

    With midpoint normals, n and n' are frozen at u(element midpoint) and the
    linearization of n sees v at the midpoint, so g is the exact derivative of
    the midpoint-normal functional.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError("gamma must lie in [0, 1]")
    part = u.partition
    if gamma == 0.0:
        return np.zeros(part.n_dofs)
    rule = quadrature_rule(quadrature)
    t = normal_curvature_terms(u, S, rule, midpoint_normal)
    h = part.element_lengths
    # local basis: slope functions carry a factor h, second derivatives 1/h^2
    scale = np.stack([np.ones_like(h), h, np.ones_like(h), h], axis=1)[:, :, None]
    wa = t.weights * t.normal_curvature
    n = np.broadcast_to(t.normal, t.upp.shape)
    N2 = shape_functions(rule.points, 2)
    curv = np.einsum("eq,qi,eqk->eik", wa, N2, n) * scale / (h**2)[:, None, None]
    Jn = S.normal_jacobian(t.points)
    if midpoint_normal:
        JTu = np.einsum("ekl,eqk->eql", Jn[:, 0], t.upp)
        N0 = shape_functions(np.array([0.5]), 0)[0]
        lin = np.einsum("eq,i,eql->eil", wa, N0, JTu) * scale
    else:
        JTu = np.einsum("eqkl,eqk->eql", Jn, t.upp)
        N0 = shape_functions(rule.points, 0)
        lin = np.einsum("eq,qi,eql->eil", wa, N0, JTu) * scale
    return gamma * _scatter(part, curv + lin)


@dataclass(frozen=True)
class PenaltyOperators:
    """Lumped obstacle penalty acting on the third value component."""

    D: sp.csr_matrix
    weights: np.ndarray
    delta: float

    def positive_load(self, u: HermiteCurve) -> np.ndarray:
        """Vector of omega_j (u_3(z_j) - delta)_+ on the u_3 value dofs."""
        return self._load(np.maximum(u.values[:, 2] - self.delta, 0.0), u.partition)

    def negative_load(self, u: HermiteCurve) -> np.ndarray:
        """Vector of omega_j (u_3(z_j) - delta)_- on the u_3 value dofs."""
        return self._load(np.minimum(u.values[:, 2] - self.delta, 0.0), u.partition)

    def _load(self, nodal, partition):
        out = np.zeros(partition.n_dofs)
        out[DOFS_PER_NODE * np.arange(partition.n_nodes) + 2] = self.weights * nodal
        return out

    def energy(self, u: HermiteCurve, eps: float) -> float:
        neg = np.minimum(u.values[:, 2] - self.delta, 0.0)
        return float(self.weights @ neg**2) / (2.0 * eps)


def penalty_operators(partition: Partition, delta: float) -> PenaltyOperators:
    w = partition.node_weights()
    diag = np.zeros(partition.n_dofs)
    diag[DOFS_PER_NODE * np.arange(partition.n_nodes) + 2] = w
    return PenaltyOperators(sp.diags(diag, format="csr"), w, float(delta))
