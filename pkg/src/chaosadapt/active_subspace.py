"""
Gradient covariance matrix of a chaos expansion and its eigendecomposition.

``C = E[grad f grad f^T]`` is assembled without sampling: entry ``C_ij`` is
the quadratic form ``f^T K_ij f`` where the stiffness matrix ``K_ij`` holds
``E[d psi_alpha / d xi_i * d psi_beta / d xi_j]``. The stiffness matrices only
depend on the basis, so they are cached.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .basis import MultiIndexSet, dphi_dphi_table, dphi_phi_table, total_degree_set
from .pce import PCExpansion

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    """Raised when the Jacobi sweeps fail to diagonalize the input."""


@lru_cache(maxsize=1024)
def _stiffness(d: int, Q: int, i: int, j: int) -> np.ndarray:
    idx = total_degree_set(d, Q).indices
    n = idx.shape[0]
    mask = np.ones((n, n), dtype=bool)
    for m in range(d):
        if m != i and m != j:
            mask &= idx[:, m][:, None] == idx[:, m][None, :]
    ai, bi = idx[:, i][:, None], idx[:, i][None, :]
    if i == j:
        K = dphi_dphi_table(Q)[ai, bi]
    else:
        dp = dphi_phi_table(Q)
        aj, bj = idx[:, j][:, None], idx[:, j][None, :]
        # E[psi'_{a_i} psi_{b_i}] * E[psi_{a_j} psi'_{b_j}]
        K = dp[ai, bi] * dp[bj, aj]
    K = np.where(mask, K, 0.0)
    K.setflags(write=False)
    return K


def stiffness_matrix(index_set: MultiIndexSet, i: int, j: int) -> np.ndarray:
    """Stiffness matrix ``K_ij`` for 0-based axes ``i`` and ``j``.

    Off-axis factors contribute Kronecker deltas, the differentiated axes
    contribute the exact derivative inner products of the 1d polynomials.
    """
    d = index_set.d
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"axes ({i}, {j}) out of range for dimension {d}")
    return _stiffness(d, index_set.Q, int(i), int(j))


def gradient_matrix(pce: PCExpansion) -> np.ndarray:
    """``C_ij = f^T K_ij f``; returns a symmetric ``(d, d)`` array."""
    f = pce.coefficients
    d = pce.d
    C = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            C[i, j] = C[j, i] = f @ stiffness_matrix(pce.index_set, i, j) @ f
    return C


def _off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(C, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Returns ``(eigenvalues, vectors)`` unsorted, with ``C = V diag(ev) V^T``.
    Converged once the off-diagonal Frobenius norm drops below
    ``tol * ||C||_F``.
    """
    A = np.array(C, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A)
    threshold = tol * scale
    for _ in range(max_sweeps):
        if _off_norm(A) <= threshold:
            return np.diag(A).copy(), V
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :], A[q, :] = c * rp - s * rq, s * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    if _off_norm(A) <= threshold:
        return np.diag(A).copy(), V
    raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


@dataclass(frozen=True)
class ActiveSubspace:
    eigenvalues: np.ndarray  # descending
    rotation: np.ndarray  # columns are eigenvectors
    active_dim: int = 1

    @property
    def w(self) -> np.ndarray:
        return self.rotation[:, 0]

    @property
    def V(self) -> np.ndarray:
        return self.rotation[:, 1:]

    @property
    def gap_ratio(self) -> float:
        """``lambda_2 / lambda_1``; nan when the leading eigenvalue is zero."""
        if self.eigenvalues.size < 2:
            return 0.0
        if self.eigenvalues[0] <= 0.0:
            return float("nan")
        return float(self.eigenvalues[1] / self.eigenvalues[0])

    def split(self, d_prime: int | None = None):
        return split(self, self.active_dim if d_prime is None else d_prime)


def eig_sym(C) -> ActiveSubspace:
    """Eigendecomposition with eigenvalues sorted in decreasing order.

    Each eigenvector is signed so that its largest-magnitude entry is
    positive (first such entry on ties).
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.allclose(C, C.T, rtol=0.0, atol=1e-10 * max(1.0, np.abs(C).max())):
        raise ValueError("matrix is not symmetric")
    vals, vecs = jacobi_eigh(0.5 * (C + C.T))
    order = np.argsort(-vals, kind="stable")
    vals, vecs = vals[order], vecs[:, order]
    for k in range(vecs.shape[1]):
        lead = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[lead, k] < 0:
            vecs[:, k] = -vecs[:, k]
    return ActiveSubspace(vals, vecs)


def split(subspace: ActiveSubspace, d_prime: int):
    """Return ``(W, V)``: the leading ``d_prime`` eigenvectors and the rest."""
    d = subspace.rotation.shape[0]
    if not 1 <= d_prime <= d:
        raise ValueError(f"active dimension must be in [1, {d}], got {d_prime}")
    return subspace.rotation[:, :d_prime], subspace.rotation[:, d_prime:]


def active_subspace(pce: PCExpansion) -> ActiveSubspace:
    return eig_sym(gradient_matrix(pce))


def write_matrix_csv(path, M) -> None:
    M = np.atleast_2d(M)
    header = ",".join(f"col_{k + 1}" for k in range(M.shape[1]))
    np.savetxt(Path(path), M, fmt="%.17g", delimiter=",", header=header, comments="")


def read_matrix_csv(path) -> np.ndarray:
    return np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)


def write_vector_csv(path, v, name: str) -> None:
    np.savetxt(Path(path), np.asarray(v, dtype=float).reshape(-1, 1), fmt="%.17g", header=name, comments="")


def read_vector_csv(path) -> np.ndarray:
    return np.loadtxt(Path(path), skiprows=1, ndmin=1)
