"""
scikit-learn compatible estimators.

``LegendrePCERegressor`` fits a total-degree chaos expansion by
pseudo-spectral projection: pass quadrature weights as ``sample_weight``
(without weights the projection is a plain Monte Carlo average).
``ActiveSubspaceTransformer`` maps inputs onto the dominant eigenvectors of
the gradient matrix of that expansion. ``AdaptedPCERegressor`` runs the
whole reduction: it discovers the direction from a d-dimensional design,
then queries ``model`` on a 1d rule along it.
"""
from __future__ import annotations

from typing import Callable, Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted, column_or_1d

from .active_subspace import eig_sym, gradient_matrix
from .adapt1d import (DEFAULT_ADAPTED_ORDER, DEFAULT_CDF_SAMPLES, DEFAULT_CDF_SEED, DEFAULT_RULE_LEVEL, adapt_1d,
                      adapted_eval, empirical_cdf)
from .basis import basis_matrix, total_degree_set
from .models import CountingModel
from .pce import PCExpansion, eval_gradient, evaluate, mean, variance
from .quadrature import cc_1d
from .validation import check_count, check_points, check_seed


def _fit_expansion(X, y, sample_weight, order: int) -> PCExpansion:
    X = check_points(X)
    y = column_or_1d(y).astype(float)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if sample_weight is None:
        weights = np.full(X.shape[0], 1.0 / X.shape[0])
    else:
        weights = column_or_1d(sample_weight).astype(float)
        if weights.shape != y.shape:
            raise ValueError("sample_weight must align with y")
    index_set = total_degree_set(X.shape[1], check_count(order, "order", minimum=0))
    return PCExpansion(index_set, basis_matrix(index_set, X).T @ (y * weights))


class LegendrePCERegressor(RegressorMixin, BaseEstimator):
    """Total-degree Legendre chaos surrogate on ``[-1, 1]^d``.

    Parameters
    ----------
    order : int
        Maximum total polynomial degree.
    """

    def __init__(self, order: int = 2):
        self.order = order

    def fit(self, X, y, sample_weight=None):
        self.expansion_ = _fit_expansion(X, y, sample_weight, self.order)
        self.n_features_in_ = self.expansion_.d
        self.coef_ = self.expansion_.coefficients
        self.powers_ = self.expansion_.index_set.indices
        return self

    def predict(self, X):
        check_is_fitted(self)
        return evaluate(self.expansion_, check_points(X, self.n_features_in_))

    def gradient(self, X):
        check_is_fitted(self)
        return eval_gradient(self.expansion_, check_points(X, self.n_features_in_))

    @property
    def mean_(self) -> float:
        check_is_fitted(self)
        return mean(self.expansion_)

    @property
    def variance_(self) -> float:
        check_is_fitted(self)
        return variance(self.expansion_)


class ActiveSubspaceTransformer(TransformerMixin, BaseEstimator):
    """Project inputs onto the leading eigenvectors of the gradient matrix.

    Attributes
    ----------
    gradient_matrix_ : ndarray of shape (d, d)
    eigenvalues_ : ndarray of shape (d,), descending
    rotation_ : ndarray of shape (d, d), eigenvectors as columns
    components_ : ndarray of shape (n_components, d)
    """

    def __init__(self, n_components: int = 1, order: int = 2):
        self.n_components = n_components
        self.order = order

    def fit(self, X, y, sample_weight=None):
        return self.fit_expansion(_fit_expansion(X, y, sample_weight, self.order))

    def fit_expansion(self, expansion: PCExpansion):
        """Fit from an already computed chaos expansion."""
        n = check_count(self.n_components, "n_components")
        if n > expansion.d:
            raise ValueError(f"n_components={n} exceeds the input dimension {expansion.d}")
        self.expansion_ = expansion
        self.gradient_matrix_ = gradient_matrix(expansion)
        self.subspace_ = eig_sym(self.gradient_matrix_)
        self.eigenvalues_ = self.subspace_.eigenvalues
        self.rotation_ = self.subspace_.rotation
        self.components_ = self.rotation_[:, :n].T
        self.n_features_in_ = expansion.d
        return self

    @property
    def w_(self) -> np.ndarray:
        check_is_fitted(self)
        return self.subspace_.w

    def transform(self, X):
        check_is_fitted(self)
        return check_points(X, self.n_features_in_) @ self.components_.T


class AdaptedPCERegressor(RegressorMixin, BaseEstimator):
    """One-dimensional Legendre expansion in the germ ``2 F(w^T xi) - 1``.

    ``fit(X, y, sample_weight)`` uses the d-dimensional design (typically a
    sparse grid with its weights) to estimate a low-order expansion and its
    active direction, unless ``direction`` is given, in which case ``X`` and
    ``y`` are ignored. The link function is then sampled through ``model``
    at the nodes of a level-``rule_level`` Clenshaw-Curtis rule.
    """

    def __init__(self, model: Optional[Callable] = None, direction=None, order: int = DEFAULT_ADAPTED_ORDER,
                 full_order: int = 2, rule_level: int = DEFAULT_RULE_LEVEL,
                 n_cdf_samples: int = DEFAULT_CDF_SAMPLES, random_state: int = DEFAULT_CDF_SEED,
                 clamp: bool = False):
        self.model = model
        self.direction = direction
        self.order = order
        self.full_order = full_order
        self.rule_level = rule_level
        self.n_cdf_samples = n_cdf_samples
        self.random_state = random_state
        self.clamp = clamp

    def fit(self, X=None, y=None, sample_weight=None):
        if self.model is None:
            raise ValueError("AdaptedPCERegressor needs a model callable")
        seed = check_seed(self.random_state)
        if self.direction is not None:
            w = np.asarray(self.direction, dtype=float)
            self.active_subspace_ = None
        else:
            if X is None or y is None:
                raise ValueError("without a direction, fit needs a design X, y to discover it")
            self.active_subspace_ = ActiveSubspaceTransformer(1, self.full_order).fit(X, y, sample_weight)
            w = self.active_subspace_.w_
        counter = CountingModel(self.model)
        cdf = empirical_cdf(w, check_count(self.n_cdf_samples, "n_cdf_samples", minimum=2), seed)
        self.adapted_ = adapt_1d(counter, w, cdf, check_count(self.order, "order", minimum=0),
                                 cc_1d(check_count(self.rule_level, "rule_level", minimum=0)), clamp=self.clamp)
        self.n_model_evaluations_ = counter.n_evaluations
        self.coef_ = self.adapted_.coefficients
        self.w_ = self.adapted_.w
        self.n_features_in_ = w.size
        return self

    def predict(self, X):
        check_is_fitted(self)
        return adapted_eval(self.adapted_, check_points(X, self.n_features_in_))

    def transform_germ(self, X):
        """``zeta = 2 F(w^T xi) - 1`` for each row of ``X``."""
        check_is_fitted(self)
        return self.adapted_.germ(check_points(X, self.n_features_in_))
