import numpy as np
import pytest

from chaosadapt.active_subspace import gradient_matrix
from chaosadapt.basis import total_degree_set
from chaosadapt.bounds import spectral_norm, truncation_bound
from chaosadapt.pce import PCExpansion
from conftest import random_expansion


def _truncate(pce, order):
    s = total_degree_set(pce.d, order)
    return PCExpansion(s, pce.coefficients[: s.size])


def test_identical_expansions():
    pce = random_expansion(3, 3, 0)
    rep = truncation_bound(pce, pce, n_mc=2000, seed=1)
    assert rep.bound == 0.0 and rep.observed_norm == 0.0 and rep.max_gap == 0.0
    assert rep.holds()


def test_quadratic_truncated_to_linear(ridge_expansion):
    rep = truncation_bound(ridge_expansion, _truncate(ridge_expansion, 1), n_mc=20_000, seed=2)
    assert rep.holds()
    assert rep.observed_norm > 0
    assert rep.observed_norm <= rep.bound


def test_observed_norm_scales_quadratically():
    pce = random_expansion(3, 3, 5)
    lin = _truncate(pce, 1)
    base = truncation_bound(pce, lin, n_mc=500, seed=0).observed_norm
    doubled = truncation_bound(pce.scaled(2.0), lin.scaled(2.0), n_mc=500, seed=0).observed_norm
    assert doubled == pytest.approx(4.0 * base, rel=1e-12)


def test_observed_norm_matches_direct():
    pce = random_expansion(4, 3, 9)
    low = _truncate(pce, 2)
    rep = truncation_bound(pce, low, n_mc=500, seed=0)
    diff = gradient_matrix(low) - gradient_matrix(pce)
    assert rep.observed_norm == pytest.approx(np.abs(np.linalg.eigvalsh(diff)).max(), rel=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_random_pairs(seed):
    pce = random_expansion(4, 3, 100 + seed)
    rep = truncation_bound(pce, _truncate(pce, 2), n_mc=50_000, seed=seed)
    assert rep.holds()
    assert rep.per_eigenvalue_gaps.shape == (4,)
    assert rep.observed_norm >= rep.max_gap - 1e-12


def test_spectral_norm():
    assert spectral_norm(np.diag([-3.0, 2.0])) == 3.0
    assert spectral_norm(np.zeros((0, 0))) == 0.0
    assert spectral_norm(np.zeros((3, 3))) == 0.0
    w = np.array([3.0, 4.0]) / 5
    assert spectral_norm(np.outer(w, w)) == pytest.approx(1.0, abs=1e-14)
    assert spectral_norm(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        spectral_norm(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        spectral_norm(np.ones(3))


def test_containment_errors():
    big, small = random_expansion(3, 2, 0), random_expansion(3, 3, 0)
    with pytest.raises(ValueError, match="contained"):
        truncation_bound(big, small)
    with pytest.raises(ValueError, match="dimension"):
        truncation_bound(random_expansion(2, 2, 0), random_expansion(3, 1, 0))


def test_report_csv(tmp_path):
    pce = random_expansion(2, 2, 1)
    truncation_bound(pce, _truncate(pce, 1), n_mc=100, seed=0).to_csv(tmp_path / "r.csv")
    keys = [ln.split(",")[0] for ln in (tmp_path / "r.csv").read_text().splitlines()]
    assert keys[0] == "key"
    assert {"bound", "observed_norm", "gap_1", "gap_2", "holds"} <= set(keys)
