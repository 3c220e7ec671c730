"""
Multi-index sets and normalized Legendre polynomials.

The polynomials are orthonormal with respect to the uniform density on
[-1, 1], i.e. ``E[psi_a(xi) psi_b(xi)] = delta_ab`` for ``xi ~ U(-1, 1)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb, sqrt
from typing import Sequence

import numpy as np

DOMAIN_TOL = 1e-12

MultiIndex = tuple[int, ...]


@dataclass(frozen=True)
class MultiIndexSet:
    """Total-degree multi-index set in graded lexicographic order.

    Indices are sorted by ascending total degree and, within a degree, in
    descending lexicographic order, so ``e_1`` precedes ``e_2`` and so on.
    """

    d: int
    Q: int
    indices: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        self.indices.setflags(write=False)

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return (tuple(int(v) for v in row) for row in self.indices)

    def total_degrees(self) -> np.ndarray:
        return self.indices.sum(axis=1)

    def position(self, alpha: Sequence[int]) -> int:
        """Row of ``alpha`` in the ordering; raises KeyError if absent."""
        return _positions(self.d, self.Q)[tuple(int(a) for a in alpha)]

    def contains(self, other: "MultiIndexSet") -> bool:
        return other.d == self.d and other.Q <= self.Q


def _enumerate(d: int, total: int):
    """Yield every d-tuple of non-negative ints summing to ``total``."""
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _enumerate(d - 1, total - first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _total_degree_array(d: int, Q: int) -> np.ndarray:
    rows = []
    for q in range(Q + 1):
        rows.extend(sorted(_enumerate(d, q), reverse=True))
    arr = np.array(rows, dtype=np.int64).reshape(-1, d)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _positions(d: int, Q: int) -> dict:
    return {tuple(int(v) for v in row): k for k, row in enumerate(_total_degree_array(d, Q))}


def total_degree_set(d: int, Q: int) -> MultiIndexSet:
    """All multi-indices with ``|alpha| <= Q`` in ``d`` dimensions.

    >>> len(total_degree_set(5, 3))
    56
    """
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d}")
    if int(Q) != Q or Q < 0:
        raise ValueError(f"order must be a non-negative integer, got {Q}")
    d, Q = int(d), int(Q)
    arr = _total_degree_array(d, Q)
    assert arr.shape[0] == comb(d + Q, Q)
    return MultiIndexSet(d, Q, arr)


def _check_domain(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + DOMAIN_TOL) or np.any(~np.isfinite(x)):
        raise ValueError("Legendre argument outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def legendre_table(n_max: int, x) -> np.ndarray:
    """Normalized Legendre values ``psi_0..psi_{n_max}`` at ``x``.

    Returns an array of shape ``x.shape + (n_max + 1,)``.
    """
    x = _check_domain(x)
    out = np.empty(x.shape + (n_max + 1,))
    out[..., 0] = 1.0
    if n_max >= 1:
        out[..., 1] = x
    for n in range(1, n_max):
        out[..., n + 1] = ((2 * n + 1) * x * out[..., n] - n * out[..., n - 1]) / (n + 1)
    out *= np.sqrt(2.0 * np.arange(n_max + 1) + 1.0)
    return out


def legendre_deriv_table(n_max: int, x) -> np.ndarray:
    """Derivatives ``psi'_0..psi'_{n_max}`` at ``x``, same layout as :func:`legendre_table`.

    Uses ``l'_{n+1} = l'_{n-1} + (2n + 1) l_n`` on the classical polynomials.
    """
    x = _check_domain(x)
    ell = legendre_table(n_max, x) / np.sqrt(2.0 * np.arange(n_max + 1) + 1.0)
    out = np.zeros(x.shape + (n_max + 1,))
    if n_max >= 1:
        out[..., 1] = 1.0
    for n in range(1, n_max):
        out[..., n + 1] = out[..., n - 1] + (2 * n + 1) * ell[..., n]
    out *= np.sqrt(2.0 * np.arange(n_max + 1) + 1.0)
    return out


def legendre_eval(n: int, x):
    """``psi_n(x) = sqrt(2n + 1) * l_n(x)``."""
    if n < 0:
        raise ValueError("polynomial degree must be non-negative")
    val = legendre_table(n, x)[..., n]
    return float(val) if val.ndim == 0 else val


def legendre_deriv(n: int, x):
    """Derivative of the normalized polynomial ``psi_n`` at ``x``."""
    if n < 0:
        raise ValueError("polynomial degree must be non-negative")
    val = legendre_deriv_table(n, x)[..., n]
    return float(val) if val.ndim == 0 else val


def multivariate_eval(alpha: Sequence[int], xi) -> float:
    """Tensor-product basis function ``prod_i psi_{alpha_i}(xi_i)``."""
    alpha = np.asarray(alpha, dtype=int)
    xi = np.asarray(xi, dtype=float)
    if alpha.ndim != 1 or xi.shape != alpha.shape:
        raise ValueError(f"dimension mismatch: alpha has {alpha.size} entries, xi has shape {xi.shape}")
    if alpha.size == 0:
        return 1.0
    table = legendre_table(int(alpha.max()), xi)
    return float(np.prod(table[np.arange(alpha.size), alpha]))


def basis_matrix(index_set: MultiIndexSet, X) -> np.ndarray:
    """Evaluate every basis function at every row of ``X``; shape ``(n, N_Q)``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != index_set.d:
        raise ValueError(f"expected {index_set.d} columns, got {X.shape[1]}")
    table = legendre_table(index_set.Q, X)  # (n, d, Q+1)
    out = np.ones((X.shape[0], index_set.size))
    for i in range(index_set.d):
        out *= table[:, i, index_set.indices[:, i]]
    return out


def _odd_offsets(a: int):
    """Degrees ``a-1, a-3, ...`` appearing in ``l'_a = sum (2k+1) l_k``."""
    return range(a - 1, -1, -2)


def _ell_dphi_phi(a: int, b: int) -> float:
    # E[l'_a l_b] = delta_{a-1,b} + delta_{a-3,b} + ...
    return float(sum(1 for k in _odd_offsets(a) if k == b))


def _ell_dphi_dphi(a: int, b: int) -> float:
    # E[l'_a l'_b] = sum over shared k of (2k+1)^2 E[l_k^2] = sum (2k+1)
    shared = set(_odd_offsets(a)).intersection(_odd_offsets(b))
    return float(sum(2 * k + 1 for k in shared))


@lru_cache(maxsize=None)
def dphi_phi(a: int, b: int) -> float:
    """Exact ``E[psi'_a(xi) psi_b(xi)]`` for ``xi ~ U(-1, 1)``."""
    if a < 0 or b < 0:
        raise ValueError("degrees must be non-negative")
    return sqrt((2 * a + 1) * (2 * b + 1)) * _ell_dphi_phi(a, b)


@lru_cache(maxsize=None)
def dphi_dphi(a: int, b: int) -> float:
    """Exact ``E[psi'_a(xi) psi'_b(xi)]`` for ``xi ~ U(-1, 1)``."""
    if a < 0 or b < 0:
        raise ValueError("degrees must be non-negative")
    return sqrt((2 * a + 1) * (2 * b + 1)) * _ell_dphi_dphi(a, b)


def dphi_phi_table(n_max: int) -> np.ndarray:
    return np.array([[dphi_phi(a, b) for b in range(n_max + 1)] for a in range(n_max + 1)])


def dphi_dphi_table(n_max: int) -> np.ndarray:
    return np.array([[dphi_dphi(a, b) for b in range(n_max + 1)] for a in range(n_max + 1)])
