import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.linear_model import LinearRegression

from chaosadapt.estimators import ActiveSubspaceTransformer, AdaptedPCERegressor, LegendrePCERegressor
from chaosadapt.models import RIDGE_W, QuadraticModel
from chaosadapt.pce import mean, uniform_inputs, variance
from chaosadapt.quadrature import smolyak


@pytest.fixture(scope="module")
def design():
    rule = smolyak(10, 2)
    return rule.nodes, QuadraticModel.ridge10()(rule.nodes), rule.weights


def _aligned(u, v, tol):
    return min(np.abs(u - v).max(), np.abs(u + v).max()) < tol


def test_params_and_clone():
    est = AdaptedPCERegressor(model=QuadraticModel.ridge10(), order=7, clamp=True)
    assert est.get_params()["order"] == 7
    twin = clone(est)
    assert twin.get_params()["clamp"] is True
    assert clone(LegendrePCERegressor(order=4)).order == 4
    assert ActiveSubspaceTransformer().set_params(n_components=2).n_components == 2


def test_pce_regressor(design, ridge_expansion):
    X, y, w = design
    reg = LegendrePCERegressor(order=2).fit(X, y, sample_weight=w)
    np.testing.assert_allclose(reg.coef_, ridge_expansion.coefficients, atol=1e-13)
    assert reg.powers_.shape == (66, 10)
    assert reg.mean_ == pytest.approx(mean(ridge_expansion))
    assert reg.variance_ == pytest.approx(variance(ridge_expansion))
    Xt = uniform_inputs(200, 10, 3)
    np.testing.assert_allclose(reg.predict(Xt), QuadraticModel.ridge10()(Xt), atol=1e-10)
    assert reg.score(Xt, QuadraticModel.ridge10()(Xt)) == pytest.approx(1.0)
    assert reg.gradient(Xt).shape == (200, 10)


def test_pce_regressor_unweighted():
    X = uniform_inputs(20_000, 2, 0)
    reg = LegendrePCERegressor(order=1).fit(X, 3.0 + X[:, 0])
    assert reg.coef_[0] == pytest.approx(3.0, abs=0.02)


def test_input_validation(design):
    X, y, w = design
    reg = LegendrePCERegressor()
    with pytest.raises(NotFittedError):
        reg.predict(X)
    with pytest.raises(ValueError, match="\\[-1, 1\\]"):
        reg.fit(2 * X + 0.5, y)
    with pytest.raises(ValueError):
        reg.fit(X, y[:-1])
    reg.fit(X, y, sample_weight=w)
    with pytest.raises(ValueError, match="features"):
        reg.predict(X[:, :3])
    with pytest.raises(ValueError):
        LegendrePCERegressor(order=-1).fit(X, y)


def test_transformer(design):
    X, y, w = design
    tr = ActiveSubspaceTransformer(order=2).fit(X, y, sample_weight=w)
    assert _aligned(tr.w_, RIDGE_W, 1e-6)
    assert tr.eigenvalues_[1] / tr.eigenvalues_[0] < 1e-8
    Z = tr.transform(X)
    assert Z.shape == (X.shape[0], 1)
    np.testing.assert_allclose(np.abs(Z[:, 0]), np.abs(X @ RIDGE_W), atol=1e-6)
    with pytest.raises(ValueError):
        ActiveSubspaceTransformer(n_components=11).fit(X, y, sample_weight=w)


def test_pipeline_composition(design):
    X, y, w = design
    pipe = make_pipeline(ActiveSubspaceTransformer(order=2), LinearRegression())
    pipe.fit(X, y, activesubspacetransformer__sample_weight=w)
    assert pipe.predict(X[:5]).shape == (5,)


def test_adapted_regressor_discovers_direction(design):
    X, y, w = design
    est = AdaptedPCERegressor(model=QuadraticModel.ridge10(), n_cdf_samples=100_000)
    est.fit(X, y, sample_weight=w)
    assert _aligned(est.w_, RIDGE_W, 1e-6)
    assert est.n_model_evaluations_ == 33
    assert est.coef_.shape == (16,)
    Xt = uniform_inputs(1000, 10, 5)
    f = QuadraticModel.ridge10()(Xt)
    assert np.sqrt(np.mean((est.predict(Xt) - f) ** 2)) / f.std() < 0.1
    zeta = est.transform_germ(Xt)
    assert zeta.min() >= -1 and zeta.max() <= 1


def test_adapted_regressor_given_direction():
    est = AdaptedPCERegressor(model=QuadraticModel.ridge10(), direction=RIDGE_W, order=4, rule_level=3,
                              n_cdf_samples=10_000).fit()
    assert est.n_model_evaluations_ == 9
    assert est.active_subspace_ is None


def test_adapted_regressor_errors(design):
    X, y, _ = design
    with pytest.raises(ValueError, match="model"):
        AdaptedPCERegressor().fit(X, y)
    with pytest.raises(ValueError, match="direction"):
        AdaptedPCERegressor(model=QuadraticModel.ridge10()).fit()
    with pytest.raises(ValueError, match="seed"):
        AdaptedPCERegressor(model=QuadraticModel.ridge10(), direction=RIDGE_W, random_state=None).fit()
