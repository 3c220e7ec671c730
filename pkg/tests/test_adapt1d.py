import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from chaosadapt.adapt1d import (AdaptedExpansion, EmpiricalCDF, adapt_1d, adapted_eval, cdf_eval, empirical_cdf,
                                quantile, validate_scatter)
from chaosadapt.models import RIDGE_W, QuadraticModel
from chaosadapt.pce import uniform_inputs
from chaosadapt.quadrature import cc_1d

E1 = np.eye(3)[0]


@pytest.fixture(scope="module")
def cdf_e1():
    return empirical_cdf(E1, 200_000, 7)


@pytest.fixture(scope="module")
def cdf_ridge():
    return empirical_cdf(RIDGE_W, 200_000, 1234)


def test_cdf_of_a_coordinate(cdf_e1):
    assert cdf_eval(cdf_e1, 0.0) == pytest.approx(0.5, abs=5e-3)
    assert quantile(cdf_e1, 0.25) == pytest.approx(-0.5, abs=1e-2)
    x = np.linspace(-1, 1, 41)
    np.testing.assert_allclose(cdf_eval(cdf_e1, x), (x + 1) / 2, atol=5e-3)


def test_cdf_endpoints(cdf_ridge):
    s = cdf_ridge.sorted_samples
    assert cdf_eval(cdf_ridge, s[0] - 1) == 0.0
    assert cdf_eval(cdf_ridge, s[-1] + 1) == 1.0
    assert quantile(cdf_ridge, 0.0) == s[0]
    assert quantile(cdf_ridge, 1.0) == s[-1]
    with pytest.raises(ValueError):
        quantile(cdf_ridge, 1.5)
    with pytest.raises(ValueError):
        quantile(cdf_ridge, np.nan)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 1.0))
def test_cdf_round_trip(p):
    cdf = empirical_cdf(RIDGE_W, 5000, 3)
    assert cdf_eval(cdf, quantile(cdf, p)) == pytest.approx(p, abs=1e-12)


def test_cdf_monotone(cdf_ridge):
    x = np.linspace(-3, 3, 2001)
    assert np.all(np.diff(cdf_eval(cdf_ridge, x)) >= 0)


def test_cdf_reproducible():
    a = empirical_cdf(RIDGE_W, 1000, 5).sorted_samples
    b = empirical_cdf(RIDGE_W, 1000, 5).sorted_samples
    np.testing.assert_array_equal(a, b)


def test_cdf_validation():
    with pytest.raises(ValueError):
        empirical_cdf(np.array([1.0, 1.0]), 100, 0)
    with pytest.raises(ValueError):
        empirical_cdf(E1, 1, 0)
    with pytest.raises(ValueError):
        EmpiricalCDF(np.array([1.0, 0.0]))


def test_germ_is_uniform(cdf_ridge):
    ad = AdaptedExpansion(RIDGE_W, cdf_ridge, np.array([0.0]))
    zeta = ad.germ(uniform_inputs(20_000, 10, 99))
    assert stats.kstest(zeta, stats.uniform(loc=-1, scale=2).cdf).pvalue > 1e-3


def test_constant_model(cdf_ridge):
    ad = adapt_1d(lambda X: np.full(len(X), 2.5), RIDGE_W, cdf_ridge, order=6)
    assert ad.coefficients[0] == pytest.approx(2.5, abs=1e-13)
    np.testing.assert_allclose(ad.coefficients[1:], 0.0, atol=1e-12)


def test_polynomial_of_a_coordinate(cdf_e1):
    ad = adapt_1d(lambda X: X[:, 0] ** 3, E1, cdf_e1, order=5, rule_1d=cc_1d(4))
    # xi^3 = (3 psi_1 / sqrt(3) + 2 psi_3 / sqrt(7)) / 5
    expected = np.array([0, 3 / (5 * np.sqrt(3)), 0, 2 / (5 * np.sqrt(7)), 0, 0])
    np.testing.assert_allclose(ad.coefficients, expected, atol=2e-2)


def test_invariant_along_complement(cdf_ridge):
    ad = adapt_1d(QuadraticModel.ridge10(), RIDGE_W, cdf_ridge, order=8, rule_1d=cc_1d(4))
    rng = np.random.default_rng(0)
    xi = 0.1 * rng.uniform(-1, 1, 10)
    v = rng.standard_normal(10)
    v -= (v @ RIDGE_W) * RIDGE_W
    v *= 0.05 / np.abs(v).max()
    assert adapted_eval(ad, xi + v) == pytest.approx(adapted_eval(ad, xi), abs=1e-12)


def test_mean_preserved(cdf_ridge):
    m = QuadraticModel.ridge10()
    ad = adapt_1d(m, RIDGE_W, cdf_ridge)
    assert ad.coefficients[0] == pytest.approx(m.a + m.c / 3, rel=2e-2)


def test_error_decreases_with_order(cdf_ridge):
    m = QuadraticModel.ridge10()
    errs = [validate_scatter(m, adapt_1d(m, RIDGE_W, cdf_ridge, order=q), 2000, 11).rms for q in (1, 3, 15)]
    assert errs[0] > errs[1] > errs[2]


def test_record_counts_and_clamp(cdf_ridge):
    m = QuadraticModel.ridge10()
    free = adapt_1d(m, RIDGE_W, cdf_ridge)
    assert free.record.inputs.shape == (33, 10)
    assert free.record.n_out_of_domain > 0
    clamped = adapt_1d(m, RIDGE_W, cdf_ridge, clamp=True)
    assert clamped.record.clamped and np.abs(clamped.record.inputs).max() <= 1.0


def test_adapt_validation(cdf_ridge):
    with pytest.raises(ValueError):
        adapt_1d(QuadraticModel.ridge10(), RIDGE_W, cdf_ridge, order=-1)
    with pytest.raises(ValueError):
        adapt_1d(QuadraticModel.ridge10(), 2 * RIDGE_W, cdf_ridge)


def test_csv_round_trip(tmp_path):
    cdf = empirical_cdf(RIDGE_W, 500, 8)
    ad = adapt_1d(QuadraticModel.ridge10(), RIDGE_W, cdf, order=4, rule_1d=cc_1d(3))
    sidecar = ad.to_csv(tmp_path / "adapted.csv")
    assert sidecar.name == "adapted_cdf.csv"
    assert AdaptedExpansion.is_adapted_file(tmp_path / "adapted.csv")
    back = AdaptedExpansion.from_csv(tmp_path / "adapted.csv")
    np.testing.assert_array_equal(back.coefficients, ad.coefficients)
    np.testing.assert_array_equal(back.w, ad.w)
    np.testing.assert_array_equal(back.cdf.sorted_samples, cdf.sorted_samples)
    assert back.cdf.seed == 8
    X = uniform_inputs(10, 10, 1)
    np.testing.assert_array_equal(back(X), ad(X))


def test_scatter(tmp_path, cdf_ridge):
    m = QuadraticModel.ridge10()
    ad = adapt_1d(m, RIDGE_W, cdf_ridge)
    res = validate_scatter(m, ad, 500, 4)
    assert res.eta.shape == res.f_true.shape == res.f_adapted.shape == (500,)
    assert res.relative_rms < 0.1
    res.to_csv(tmp_path / "scatter.csv")
    table = np.loadtxt(tmp_path / "scatter.csv", delimiter=",", skiprows=1)
    assert table.shape == (500, 3)
    with pytest.raises(ValueError):
        validate_scatter(m, ad, 0, 4)
