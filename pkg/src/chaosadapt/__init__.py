"""Reduced-dimensionality Legendre chaos expansions via basis adaptation on 1d active subspaces."""
from .active_subspace import ActiveSubspace, eig_sym, gradient_matrix, split, stiffness_matrix
from .adapt1d import AdaptedExpansion, EmpiricalCDF, adapt_1d, adapted_eval, cdf_eval, empirical_cdf, quantile, validate_scatter
from .basis import MultiIndexSet, dphi_dphi, dphi_phi, legendre_deriv, legendre_eval, multivariate_eval, total_degree_set
from .bounds import BoundReport, spectral_norm, truncation_bound
from .estimators import ActiveSubspaceTransformer, AdaptedPCERegressor, LegendrePCERegressor
from .models import ExternalModel, ModelEvaluationError, QuadraticModel, external_evaluate
from .pce import PCExpansion, eval_gradient, evaluate, histogram, mean, project, sample, variance
from .pipeline import AdaptationResult, basis_adaptation
from .quadrature import QuadratureRule, cc_1d, integrate, smolyak

__version__ = "0.1.0"
