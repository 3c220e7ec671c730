"""
Built-in analytic models and the adapter for external simulators.

A model is any callable mapping an ``(n, d)`` array of inputs in
``[-1, 1]^d`` to ``n`` outputs. External simulators are driven in batches
through a CSV file protocol::

    <cmd> <input.csv> <output.csv>

The input file has header ``xi_1,...,xi_d`` (``theta_1,...`` when physical
bounds are given) and one row per node; the output file has the single
header ``f`` and one value per row in the same order.
"""
from __future__ import annotations

import logging
import subprocess
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)

# 10-d ridge test case. The direction is given to four decimals, so it is
# normalized; ``RIDGE_W_4DIGIT`` has norm 1.000866.
RIDGE_W_4DIGIT = np.array([0.1404, -0.3574, 0.4267, -0.0931, -0.2146, 0.2642, 0.2560, -0.1895, 0.0046, -0.6680])
RIDGE_W = RIDGE_W_4DIGIT / np.linalg.norm(RIDGE_W_4DIGIT)
RIDGE_A, RIDGE_B, RIDGE_C = 1.1500, 0.9919, 0.9533


class ModelEvaluationError(RuntimeError):
    """A model failed on a batch of nodes.

    ``first`` and ``last`` give the inclusive node range of the batch.
    """

    def __init__(self, message, first=None, last=None, returncode=None, stderr=""):
        where = f" (nodes {first}..{last})" if first is not None else ""
        super().__init__(message + where)
        self.first = first
        self.last = last
        self.returncode = returncode
        self.stderr = stderr


@dataclass(frozen=True)
class QuadraticModel:
    """``f(xi) = a + b w^T xi + c (w^T xi)^2`` with a unit vector ``w``."""

    a: float
    b: float
    c: float
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float)
        if w.ndim != 1 or abs(w @ w - 1.0) > 1e-12:
            raise ValueError("w must be a unit vector")
        object.__setattr__(self, "w", w)

    @property
    def d(self) -> int:
        return self.w.size

    @classmethod
    def ridge10(cls) -> "QuadraticModel":
        return cls(RIDGE_A, RIDGE_B, RIDGE_C, RIDGE_W)

    @classmethod
    def random(cls, d: int, seed: int) -> "QuadraticModel":
        rng = np.random.Generator(np.random.PCG64(seed))
        w = rng.standard_normal(d)
        a, b, c = rng.uniform(0.5, 1.5, size=3)
        return cls(float(a), float(b), float(c), w / np.linalg.norm(w))

    def link(self, eta):
        eta = np.asarray(eta, dtype=float)
        return self.a + self.b * eta + self.c * eta**2

    def __call__(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.d:
            raise ValueError(f"dimension mismatch: expected {self.d} coordinates, got {X.shape[-1]}")
        return self.link(X @ self.w)


def quadratic_eval(m: QuadraticModel, xi):
    return m(xi)


def quadratic_true_subspace(m: QuadraticModel):
    """Analytic ``(lambda_1, w)``; the only nonzero eigenvalue is ``b^2 + 4c^2/3``."""
    lam = m.b**2 + 4.0 * m.c**2 / 3.0
    if lam == 0.0:
        logger.warning("quadratic model is constant: the active subspace is degenerate")
    return lam, m.w.copy()


def read_bounds(path) -> np.ndarray:
    """Per-dimension ``lower,upper`` table; returns shape ``(d, 2)``."""
    table = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
    if table.shape[1] != 2 or np.any(table[:, 1] <= table[:, 0]):
        raise ValueError(f"{path}: expected rows 'lower,upper' with lower < upper")
    return table


def to_physical(X, bounds) -> np.ndarray:
    """Inverse of ``xi = 2 (theta - lo) / (hi - lo) - 1``."""
    lo, hi = bounds[:, 0], bounds[:, 1]
    return lo + 0.5 * (np.asarray(X) + 1.0) * (hi - lo)


def to_reference(theta, bounds) -> np.ndarray:
    lo, hi = bounds[:, 0], bounds[:, 1]
    return 2.0 * (np.asarray(theta) - lo) / (hi - lo) - 1.0


@dataclass
class ExternalModel:
    command: Sequence[str]
    workdir: Optional[str] = None
    timeout: Optional[float] = None
    bounds: Optional[np.ndarray] = None
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if not self.command:
            raise ValueError("external model command must be non-empty")
        if isinstance(self.command, str):
            self.command = self.command.split()
        self.command = list(self.command)

    def __call__(self, X):
        return external_evaluate(self, X)


def external_evaluate(m: ExternalModel, nodes) -> np.ndarray:
    nodes = np.atleast_2d(np.asarray(nodes, dtype=float))
    n, d = nodes.shape
    if not np.all(np.isfinite(nodes)):
        raise ValueError("nodes must be finite")
    if m.bounds is not None:
        if m.bounds.shape[0] != d:
            raise ValueError(f"bounds table has {m.bounds.shape[0]} rows, nodes have {d} columns")
        table, prefix = to_physical(nodes, m.bounds), "theta"
    else:
        table, prefix = nodes, "xi"
    header = ",".join(f"{prefix}_{i + 1}" for i in range(d))
    with m._lock, tempfile.TemporaryDirectory(prefix="chaosadapt-") as tmp:
        inp, out = Path(tmp) / "input.csv", Path(tmp) / "output.csv"
        np.savetxt(inp, table, fmt="%.17g", delimiter=",", header=header, comments="")
        cmd = list(m.command) + [str(inp), str(out)]
        try:
            proc = subprocess.run(cmd, cwd=m.workdir, capture_output=True, text=True, timeout=m.timeout)
        except subprocess.TimeoutExpired as exc:
            raise ModelEvaluationError(f"model timed out after {m.timeout} s", 0, n - 1, stderr=str(exc.stderr or "")) from exc
        except OSError as exc:
            raise ModelEvaluationError(f"could not launch {cmd[0]!r}: {exc}", 0, n - 1) from exc
        if proc.returncode != 0:
            raise ModelEvaluationError(
                f"model exited with status {proc.returncode}: {proc.stderr.strip()[-500:]}",
                0, n - 1, returncode=proc.returncode, stderr=proc.stderr,
            )
        if not out.exists():
            raise ModelEvaluationError("model wrote no output file", 0, n - 1, stderr=proc.stderr)
        lines = [ln.strip() for ln in out.read_text().splitlines() if ln.strip()]
    if not lines or lines[0] != "f":
        raise ModelEvaluationError("malformed output: expected header 'f'", 0, n - 1)
    try:
        values = np.array([float(v) for v in lines[1:]])
    except ValueError as exc:
        raise ModelEvaluationError(f"malformed output value: {exc}", 0, n - 1) from exc
    if values.size != n:
        raise ModelEvaluationError(f"length mismatch: expected {n} output rows, got {values.size}", 0, n - 1)
    return values


class CountingModel:
    """Wraps a batch model and keeps a ledger of every evaluation."""

    def __init__(self, model: Callable):
        self.model = model
        self.inputs: list[np.ndarray] = []
        self.outputs: list[np.ndarray] = []

    @property
    def n_evaluations(self) -> int:
        return sum(len(v) for v in self.outputs)

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = evaluate_batch(self.model, X)
        self.inputs.append(X.copy())
        self.outputs.append(y)
        return y


def evaluate_batch(model: Callable, X, offset: int = 0) -> np.ndarray:
    """Evaluate a batch and check the output, naming failing node indices."""
    X = np.atleast_2d(X)
    try:
        y = np.asarray(model(X), dtype=float).reshape(-1)
    except ModelEvaluationError:
        raise
    except Exception as exc:
        raise ModelEvaluationError(f"model raised {type(exc).__name__}: {exc}", offset, offset + len(X) - 1) from exc
    if y.size != len(X):
        raise ModelEvaluationError(f"length mismatch: expected {len(X)} outputs, got {y.size}", offset, offset + len(X) - 1)
    bad = np.flatnonzero(~np.isfinite(y))
    if bad.size:
        raise ModelEvaluationError("non-finite model output", offset + int(bad[0]), offset + int(bad[-1]))
    return y
