"""The full reduction in one call, with model-evaluation accounting."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .active_subspace import ActiveSubspace, active_subspace
from .adapt1d import (DEFAULT_ADAPTED_ORDER, DEFAULT_CDF_SAMPLES, DEFAULT_CDF_SEED, DEFAULT_RULE_LEVEL,
                      AdaptedExpansion, adapt_1d, empirical_cdf)
from .basis import total_degree_set
from .models import CountingModel
from .pce import PCExpansion, project
from .quadrature import QuadratureRule, cc_1d, smolyak


@dataclass(frozen=True)
class AdaptationResult:
    rule: QuadratureRule
    expansion: PCExpansion
    subspace: ActiveSubspace
    adapted: AdaptedExpansion
    n_full_evaluations: int
    n_adapted_evaluations: int

    @property
    def n_evaluations(self) -> int:
        return self.n_full_evaluations + self.n_adapted_evaluations


def basis_adaptation(
    model: Callable,
    d: int,
    order: int = 2,
    level: int = 2,
    adapted_order: int = DEFAULT_ADAPTED_ORDER,
    rule_level: int = DEFAULT_RULE_LEVEL,
    n_cdf_samples: int = DEFAULT_CDF_SAMPLES,
    cdf_seed: int = DEFAULT_CDF_SEED,
    clamp: bool = False,
) -> AdaptationResult:
    """Sparse-grid expansion, active direction, then the 1d adapted expansion.

    >>> from chaosadapt.models import QuadraticModel
    >>> res = basis_adaptation(QuadraticModel.ridge10(), 10, n_cdf_samples=10_000)
    >>> res.n_full_evaluations, res.n_adapted_evaluations
    (221, 33)
    """
    counter = CountingModel(model)
    rule = smolyak(d, level)
    expansion = project(counter(rule.nodes), rule, total_degree_set(d, order))
    n_full = counter.n_evaluations
    subspace = active_subspace(expansion)
    cdf = empirical_cdf(subspace.w, n_cdf_samples, cdf_seed)
    adapted = adapt_1d(counter, subspace.w, cdf, adapted_order, cc_1d(rule_level), clamp=clamp)
    return AdaptationResult(rule, expansion, subspace, adapted, n_full, counter.n_evaluations - n_full)
