"""Direct solver for the bordered saddle-point system of one time step.

Solves ``[K B^T; B 0] [d; lam] = [f; 0]`` by a sparse LU factorization of the
bordered matrix, followed by one step of iterative refinement when the
residual is above the target.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import StepSolveError

TARGET_RESIDUAL = 1e-9
FAIL_RESIDUAL = 1e-6


@dataclass
class SaddleSystem:
    K: sp.spmatrix
    B: sp.spmatrix
    f: np.ndarray

    def __post_init__(self):
        self.K = sp.csr_matrix(self.K)
        n = self.K.shape[0]
        if self.B is None:
            self.B = sp.csr_matrix((0, n))
        self.B = sp.csr_matrix(self.B)
        self.f = np.asarray(self.f, dtype=float)
        if self.B.shape[1] != n or self.f.shape != (n,):
            raise ValueError("inconsistent saddle-point system dimensions")

    def bordered(self) -> sp.csc_matrix:
        m = self.B.shape[0]
        if m == 0:
            return self.K.tocsc()
        return sp.bmat([[self.K, self.B.T], [self.B, sp.csr_matrix((m, m))]], format="csc")


@dataclass
class SaddleSolution:
    d: np.ndarray
    multipliers: np.ndarray
    residual: float
    constraint_residual: float


def _residuals(system, d, lam):
    r = system.K @ d + system.B.T @ lam - system.f
    fn = np.linalg.norm(system.f)
    res = np.linalg.norm(r) / fn if fn > 0 else np.linalg.norm(r)
    dn = np.linalg.norm(d)
    Bd = np.linalg.norm(system.B @ d) if system.B.shape[0] else 0.0
    cres = Bd / dn if dn > 0 else Bd
    return float(res), float(cres)


def solve(system: SaddleSystem) -> SaddleSolution:
    n = system.K.shape[0]
    m = system.B.shape[0]
    rhs = np.concatenate([system.f, np.zeros(m)])
    try:
        lu = spla.splu(system.bordered())
        sol = lu.solve(rhs)
    except RuntimeError as exc:  # singular factor
        raise StepSolveError(f"factorization of the saddle-point system failed: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise StepSolveError("saddle-point solve produced non-finite values")
    res, cres = _residuals(system, sol[:n], sol[n:])
    if max(res, cres) > TARGET_RESIDUAL:
        full = system.bordered() @ sol - rhs
        sol = sol - lu.solve(full)
        res, cres = _residuals(system, sol[:n], sol[n:])
    if max(res, cres) > FAIL_RESIDUAL:
        raise StepSolveError(
            f"saddle-point residuals too large (primal {res:.2e}, constraint {cres:.2e})"
        )
    return SaddleSolution(sol[:n], sol[n:], res, cres)
