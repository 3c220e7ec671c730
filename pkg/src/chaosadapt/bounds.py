"""
Truncation-error diagnostics for gradient matrices.

Given a reference expansion ``f`` (order Q) and a lower-order expansion
``f_hat`` (order Q0 <= Q) with gradient error ``eps = f - f_hat``,

    ||C_hat - C|| <= E[||grad eps||^2] + 2 E[||grad f|| ||grad eps||]
                   = d E[gamma^2] + 2 sqrt(d) E[L gamma]

with ``gamma = ||grad eps|| / sqrt(d)`` and ``L = ||grad f||``; the same
quantity bounds every eigenvalue gap ``|lambda_k - theta_k|``. For a black
box the true ``f`` is unknown, so the higher-order expansion stands in for
it and the check becomes a consistency test between quadrature levels.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .active_subspace import eig_sym, gradient_matrix
from .pce import PCExpansion, eval_gradient, uniform_inputs

logger = logging.getLogger(__name__)

DEFAULT_MC_SAMPLES = 100_000


@dataclass(frozen=True)
class BoundReport:
    gamma_sq_mean: float
    gamma_sq_se: float
    l_gamma_mean: float
    l_gamma_se: float
    bound: float
    bound_se: float
    observed_norm: float
    per_eigenvalue_gaps: np.ndarray
    mc_samples: int
    seed: int
    dimension: int

    @property
    def max_gap(self) -> float:
        return float(np.max(self.per_eigenvalue_gaps)) if self.per_eigenvalue_gaps.size else 0.0

    def holds(self, n_se: float = 3.0) -> bool:
        """Bound (plus ``n_se`` standard errors) dominates the observed norm and every gap."""
        slack = self.bound + n_se * self.bound_se
        return self.observed_norm <= slack and self.max_gap <= slack

    def to_csv(self, path) -> None:
        rows = ["key,value"]
        for key, value in asdict(self).items():
            if key == "per_eigenvalue_gaps":
                rows += [f"gap_{k + 1},{v:.17g}" for k, v in enumerate(value)]
            elif isinstance(value, float):
                rows.append(f"{key},{value:.17g}")
            else:
                rows.append(f"{key},{value}")
        rows.append(f"holds,{int(self.holds())}")
        rows.append("estimator,monte_carlo_over_reference_expansion")
        Path(path).write_text("\n".join(rows) + "\n")


def spectral_norm(M) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    if np.abs(M - M.T).max(initial=0.0) > 1e-10:
        raise ValueError("matrix is not symmetric")
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(eig_sym(M).eigenvalues)))


def truncation_bound(reference: PCExpansion, truncated: PCExpansion, n_mc: int = DEFAULT_MC_SAMPLES,
                     seed: int = 0) -> BoundReport:
    if reference.d != truncated.d:
        raise ValueError(f"dimension mismatch: {reference.d} vs {truncated.d}")
    if not reference.index_set.contains(truncated.index_set):
        raise ValueError("truncated index set is not contained in the reference index set")
    if n_mc < 2:
        raise ValueError("n_mc must be at least 2")
    d = reference.d
    error = PCExpansion(reference.index_set, reference.coefficients - truncated.embed(reference.index_set))

    X = uniform_inputs(n_mc, d, seed)
    grad_f = np.linalg.norm(eval_gradient(reference, X), axis=1)
    grad_eps = np.linalg.norm(eval_gradient(error, X), axis=1)
    gamma_sq = grad_eps**2 / d
    l_gamma = grad_f * grad_eps / np.sqrt(d)
    per_sample = d * gamma_sq + 2.0 * np.sqrt(d) * l_gamma

    def se(v):
        return float(np.std(v, ddof=1) / np.sqrt(v.size))

    C = gradient_matrix(reference)
    C_hat = gradient_matrix(truncated)
    lam = eig_sym(C).eigenvalues
    theta = eig_sym(C_hat).eigenvalues
    report = BoundReport(
        gamma_sq_mean=float(gamma_sq.mean()),
        gamma_sq_se=se(gamma_sq),
        l_gamma_mean=float(l_gamma.mean()),
        l_gamma_se=se(l_gamma),
        bound=float(d * gamma_sq.mean() + 2.0 * np.sqrt(d) * l_gamma.mean()),
        bound_se=se(per_sample),
        observed_norm=spectral_norm(C_hat - C),
        per_eigenvalue_gaps=np.abs(lam - theta),
        mc_samples=int(n_mc),
        seed=int(seed),
        dimension=d,
    )
    if not report.holds():
        logger.warning("bound %.6g (se %.2g) below observed %.6g", report.bound, report.bound_se, report.observed_norm)
    return report
