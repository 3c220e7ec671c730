"""
One-dimensional adapted Legendre expansion along an active direction.

For a unit direction ``w`` the active variable ``eta = w^T xi`` has an
awkward distribution, so it is pushed through its own CDF to the uniform
germ ``zeta = 2 F(eta) - 1`` and the link function is expanded in
normalized Legendre polynomials of ``zeta``. The CDF is estimated by
seeded Monte Carlo and interpolated linearly between order statistics.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .basis import legendre_table
from .models import evaluate_batch
from .pce import uniform_inputs
from .quadrature import QuadratureRule, cc_1d

logger = logging.getLogger(__name__)

DEFAULT_CDF_SAMPLES = 1_000_000
DEFAULT_CDF_SEED = 1234
DEFAULT_ADAPTED_ORDER = 15
DEFAULT_RULE_LEVEL = 5
_CHUNK = 200_000


def _check_unit(w, tol: float = 1e-8) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 1 or not np.isfinite(w).all() or abs(np.linalg.norm(w) - 1.0) > tol:
        raise ValueError("direction w must be a finite unit vector")
    return w


@dataclass(frozen=True)
class EmpiricalCDF:
    sorted_samples: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        s = np.asarray(self.sorted_samples, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("an empirical CDF needs at least 2 samples")
        if np.any(np.diff(s) < 0):
            raise ValueError("samples must be sorted ascending")
        s.setflags(write=False)
        object.__setattr__(self, "sorted_samples", s)

    @property
    def sample_count(self) -> int:
        return self.sorted_samples.size

    @property
    def _levels(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.sample_count)

    def __call__(self, eta):
        return cdf_eval(self, eta)


def empirical_cdf(w, n_samples: int = DEFAULT_CDF_SAMPLES, seed: int = DEFAULT_CDF_SEED) -> EmpiricalCDF:
    """Sorted Monte Carlo draws of ``eta = w^T xi`` with ``xi ~ U(-1, 1)^d``."""
    w = _check_unit(w)
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    rng = np.random.Generator(np.random.PCG64(seed))
    eta = np.empty(n_samples)
    for k in range(0, n_samples, _CHUNK):
        m = min(_CHUNK, n_samples - k)
        eta[k : k + m] = rng.uniform(-1.0, 1.0, size=(m, w.size)) @ w
    eta.sort()
    return EmpiricalCDF(eta, seed)


def cdf_eval(cdf: EmpiricalCDF, eta):
    """Piecewise-linear CDF through ``(s_k, k / (N - 1))``; 0 below, 1 above."""
    out = np.interp(eta, cdf.sorted_samples, cdf._levels, left=0.0, right=1.0)
    return float(out) if np.ndim(out) == 0 else out


def quantile(cdf: EmpiricalCDF, p):
    """Inverse of :func:`cdf_eval`; ``quantile(0)`` and ``quantile(1)`` are the sample extremes."""
    p_arr = np.asarray(p, dtype=float)
    if np.any(~(p_arr >= 0.0) | ~(p_arr <= 1.0)):
        raise ValueError("probabilities must lie in [0, 1]")
    out = np.interp(p_arr, cdf._levels, cdf.sorted_samples)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class AdaptationRecord:
    """What was evaluated while building an adapted expansion."""

    zeta: np.ndarray
    eta: np.ndarray
    inputs: np.ndarray
    values: np.ndarray
    n_out_of_domain: int
    clamped: bool


@dataclass(frozen=True)
class AdaptedExpansion:
    w: np.ndarray
    cdf: EmpiricalCDF
    coefficients: np.ndarray
    record: Optional[AdaptationRecord] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        w = _check_unit(self.w, tol=1e-12)
        coef = np.asarray(self.coefficients, dtype=float)
        if coef.ndim != 1 or coef.size < 1:
            raise ValueError("need at least one coefficient")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "coefficients", coef)

    @property
    def d(self) -> int:
        return self.w.size

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    def germ(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.d:
            raise ValueError(f"dimension mismatch: expected {self.d} coordinates, got {X.shape[1]}")
        return np.clip(2.0 * np.asarray(cdf_eval(self.cdf, X @ self.w)) - 1.0, -1.0, 1.0)

    def link(self, zeta):
        return legendre_table(self.order, zeta) @ self.coefficients

    def __call__(self, X):
        return adapted_eval(self, X)

    def to_csv(self, path) -> Path:
        """Write the expansion and a ``<stem>_cdf.csv`` sidecar with the CDF samples."""
        path = Path(path)
        sidecar = path.with_name(path.stem + "_cdf.csv")
        rows = [
            "field,value",
            f"d,{self.d}",
            f"order,{self.order}",
            f"seed,{'' if self.cdf.seed is None else self.cdf.seed}",
            f"n_samples,{self.cdf.sample_count}",
            f"cdf_file,{sidecar.name}",
        ]
        rows += [f"w_{i + 1},{v:.17g}" for i, v in enumerate(self.w)]
        rows += [f"g_{n},{v:.17g}" for n, v in enumerate(self.coefficients)]
        path.write_text("\n".join(rows) + "\n")
        np.savetxt(sidecar, self.cdf.sorted_samples, fmt="%.17g", header="eta", comments="")
        return sidecar

    @classmethod
    def from_csv(cls, path) -> "AdaptedExpansion":
        path = Path(path)
        lines = path.read_text().splitlines()
        if not lines or lines[0] != "field,value":
            raise ValueError(f"{path}: not an adapted expansion file")
        kv = dict(line.split(",", 1) for line in lines[1:] if line.strip())
        d, order = int(kv["d"]), int(kv["order"])
        w = np.array([float(kv[f"w_{i + 1}"]) for i in range(d)])
        g = np.array([float(kv[f"g_{n}"]) for n in range(order + 1)])
        samples = np.loadtxt(path.with_name(kv["cdf_file"]), skiprows=1, ndmin=1)
        if samples.size != int(kv["n_samples"]):
            raise ValueError(f"{path}: CDF sidecar has {samples.size} samples, header says {kv['n_samples']}")
        seed = int(kv["seed"]) if kv.get("seed") else None
        return cls(w, EmpiricalCDF(samples, seed), g)

    @staticmethod
    def is_adapted_file(path) -> bool:
        with open(path) as fh:
            return fh.readline().strip() == "field,value"


def adapt_1d(
    model: Callable,
    w,
    cdf: EmpiricalCDF,
    order: int = DEFAULT_ADAPTED_ORDER,
    rule_1d: Optional[QuadratureRule] = None,
    clamp: bool = False,
) -> AdaptedExpansion:
    """Project the link function onto Legendre polynomials of the germ.

    Each 1d node ``zeta_i`` maps to ``eta_i = F^{-1}((zeta_i + 1) / 2)`` and
    to the input ``xi_i = w * eta_i`` (zero component in the complement of
    ``w``); the model is evaluated once, as a batch, at those inputs.

    Completions can leave ``[-1, 1]^d`` when ``w`` is spread over many
    coordinates. They are counted on the record and, with ``clamp=True``,
    clipped to the box before the model sees them.
    """
    w = _check_unit(w)
    if rule_1d is None:
        rule_1d = cc_1d(DEFAULT_RULE_LEVEL)
    if rule_1d.dimension != 1:
        raise ValueError("adapt_1d needs a one-dimensional rule")
    if order < 0:
        raise ValueError("order must be non-negative")
    zeta = rule_1d.nodes[:, 0]
    eta = np.asarray(quantile(cdf, np.clip(0.5 * (zeta + 1.0), 0.0, 1.0)))
    inputs = np.outer(eta, w)
    outside = np.any(np.abs(inputs) > 1.0, axis=1)
    n_out = int(outside.sum())
    if n_out:
        logger.warning("%d of %d completions fall outside [-1, 1]^%d%s", n_out, len(zeta), w.size,
                       "; clamping" if clamp else "")
    if clamp:
        inputs = np.clip(inputs, -1.0, 1.0)
    values = evaluate_batch(model, inputs)
    coef = legendre_table(order, zeta).T @ (values * rule_1d.weights)
    record = AdaptationRecord(zeta, eta, inputs, values, n_out, clamp)
    return AdaptedExpansion(w / np.linalg.norm(w), cdf, coef, record)


def adapted_eval(ad: AdaptedExpansion, X):
    """``sum_n g_n psi_n(zeta)`` with ``zeta = 2 F(w^T xi) - 1``."""
    single = np.ndim(X) == 1
    out = ad.link(ad.germ(X))
    return float(out[0]) if single else out


@dataclass(frozen=True)
class ScatterResult:
    eta: np.ndarray
    f_true: np.ndarray
    f_adapted: np.ndarray

    @property
    def rms(self) -> float:
        return float(np.sqrt(np.mean((self.f_adapted - self.f_true) ** 2)))

    @property
    def relative_rms(self) -> float:
        """RMS discrepancy divided by the standard deviation of the true outputs."""
        std = float(np.std(self.f_true))
        return self.rms / std if std > 0 else (0.0 if self.rms == 0 else float("inf"))

    def to_csv(self, path) -> None:
        table = np.column_stack([self.eta, self.f_true, self.f_adapted])
        np.savetxt(Path(path), table, fmt="%.17g", delimiter=",", header="eta,f_true,f_adapted", comments="")


def validate_scatter(model: Callable, ad: AdaptedExpansion, n: int, seed: int) -> ScatterResult:
    """Compare model and adapted surrogate on ``n`` seeded uniform inputs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    X = uniform_inputs(n, ad.d, seed)
    f_true = evaluate_batch(model, X)
    return ScatterResult(X @ ad.w, f_true, np.asarray(adapted_eval(ad, X)))
