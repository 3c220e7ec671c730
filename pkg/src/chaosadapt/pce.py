"""
Legendre chaos expansions: pseudo-spectral projection, evaluation,
gradients, moments and seeded Monte Carlo sampling.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basis import MultiIndexSet, basis_matrix, legendre_deriv_table, legendre_table, total_degree_set
from .quadrature import QuadratureRule

DEFAULT_BINS = 50


@dataclass(frozen=True)
class PCExpansion:
    index_set: MultiIndexSet
    coefficients: np.ndarray

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        if coef.shape != (self.index_set.size,):
            raise ValueError(f"expected {self.index_set.size} coefficients, got shape {coef.shape}")
        if not np.all(np.isfinite(coef)):
            raise ValueError("coefficients must be finite")
        coef = coef.copy()
        coef.setflags(write=False)
        object.__setattr__(self, "coefficients", coef)

    @property
    def d(self) -> int:
        return self.index_set.d

    @property
    def order(self) -> int:
        return self.index_set.Q

    def __call__(self, X):
        return evaluate(self, X)

    def scaled(self, s: float) -> "PCExpansion":
        return PCExpansion(self.index_set, s * self.coefficients)

    def embed(self, target: MultiIndexSet) -> np.ndarray:
        """Coefficient vector on a larger total-degree set (zeros elsewhere)."""
        if not target.contains(self.index_set):
            raise ValueError("target index set does not contain this expansion's index set")
        out = np.zeros(target.size)
        # graded-lex order makes the smaller set a prefix of the larger one
        out[: self.index_set.size] = self.coefficients
        return out

    def to_csv(self, path) -> None:
        header = ",".join([f"alpha_{i + 1}" for i in range(self.d)] + ["coefficient"])
        lines = [header]
        for alpha, c in zip(self.index_set.indices, self.coefficients):
            lines.append(",".join([str(int(a)) for a in alpha] + [f"{c:.17g}"]))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "PCExpansion":
        text = Path(path).read_text().splitlines()
        if not text or not text[0].startswith("alpha_1") or not text[0].endswith(",coefficient"):
            raise ValueError(f"{path}: not a chaos expansion file (bad header)")
        d = len(text[0].split(",")) - 1
        rows = [line.split(",") for line in text[1:] if line.strip()]
        if any(len(r) != d + 1 for r in rows):
            raise ValueError(f"{path}: ragged rows")
        alphas = np.array([[int(v) for v in r[:d]] for r in rows], dtype=np.int64).reshape(-1, d)
        coefs = np.array([float(r[d]) for r in rows])
        Q = int(alphas.sum(axis=1).max()) if len(alphas) else 0
        index_set = total_degree_set(d, Q)
        if not np.array_equal(alphas, index_set.indices):
            raise ValueError(f"{path}: rows are not the full total-degree set in graded-lex order")
        return cls(index_set, coefs)


def _as_points(X, d: int) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != d:
        raise ValueError(f"dimension mismatch: expected {d} coordinates, got {X.shape[1]}")
    return X, single


def project(values, rule: QuadratureRule, index_set: MultiIndexSet) -> PCExpansion:
    """Pseudo-spectral projection ``f_alpha = sum_i f(x_i) psi_alpha(x_i) w_i``."""
    values = np.asarray(values, dtype=float)
    if rule.dimension != index_set.d:
        raise ValueError(f"rule dimension {rule.dimension} does not match index set dimension {index_set.d}")
    if values.shape != (len(rule),):
        raise ValueError(f"expected {len(rule)} model values, got shape {values.shape}")
    psi = basis_matrix(index_set, rule.nodes)
    return PCExpansion(index_set, psi.T @ (values * rule.weights))


def evaluate(pce: PCExpansion, X):
    """Evaluate the expansion at one point (d-vector) or at rows of ``X``."""
    X, single = _as_points(X, pce.d)
    out = basis_matrix(pce.index_set, X) @ pce.coefficients
    return float(out[0]) if single else out


def eval_gradient(pce: PCExpansion, X) -> np.ndarray:
    """Gradient of the expansion; shape ``(d,)`` for one point, else ``(n, d)``."""
    X, single = _as_points(X, pce.d)
    grad = np.empty((X.shape[0], pce.d))
    for k in range(0, X.shape[0], _GRAD_CHUNK):
        grad[k : k + _GRAD_CHUNK] = _gradient_block(pce, X[k : k + _GRAD_CHUNK])
    return grad[0] if single else grad


_GRAD_CHUNK = 20_000


def _gradient_block(pce: PCExpansion, X: np.ndarray) -> np.ndarray:
    idx = pce.index_set.indices
    vals = legendre_table(pce.order, X)  # (n, d, Q+1)
    ders = legendre_deriv_table(pce.order, X)
    factors = [vals[:, m, idx[:, m]] for m in range(pce.d)]  # each (n, N)
    grad = np.empty((X.shape[0], pce.d))
    for i in range(pce.d):
        prod = ders[:, i, idx[:, i]]
        for m in range(pce.d):
            if m != i:
                prod = prod * factors[m]
        grad[:, i] = prod @ pce.coefficients
    return grad


def mean(pce: PCExpansion) -> float:
    return float(pce.coefficients[0])


def variance(pce: PCExpansion) -> float:
    return float(np.sum(pce.coefficients[1:] ** 2))


def uniform_inputs(n: int, d: int, seed: int) -> np.ndarray:
    """``n`` seeded i.i.d. draws from U(-1, 1)^d."""
    if n < 1:
        raise ValueError("sample count must be at least 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.uniform(-1.0, 1.0, size=(n, d))


def sample(pce: PCExpansion, n: int, seed: int, chunk: int = 100_000) -> np.ndarray:
    X = uniform_inputs(n, pce.d, seed)
    return np.concatenate([evaluate(pce, X[k : k + chunk]) for k in range(0, n, chunk)])


def histogram(values, bin_count: int = DEFAULT_BINS):
    """Equal-width density histogram over ``[min, max]``.

    Returns ``(bin_centers, density)``; the density integrates to 1.
    A constant sample lands in a single unit-width bin centred on the value.
    """
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("cannot histogram an empty sample")
    if bin_count < 1:
        raise ValueError("bin_count must be positive")
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.array([lo]), np.array([1.0])
    density, edges = np.histogram(values, bins=bin_count, range=(lo, hi), density=True)
    return 0.5 * (edges[:-1] + edges[1:]), density
