"""
Nested Clenshaw-Curtis rules and Smolyak sparse grids on [-1, 1]^d.

Weights are normalized against the uniform probability density, so every
rule integrates the constant 1 to 1.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray  # (n, d)
    weights: np.ndarray  # (n,)

    def __post_init__(self):
        if self.nodes.ndim != 2 or self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("nodes and weights are not aligned")
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    def __len__(self) -> int:
        return self.nodes.shape[0]

    def to_csv(self, path) -> None:
        header = ",".join([f"xi_{i + 1}" for i in range(self.dimension)] + ["weight"])
        table = np.column_stack([self.nodes, self.weights])
        np.savetxt(Path(path), table, fmt="%.17g", delimiter=",", header=header, comments="")

    @classmethod
    def from_csv(cls, path) -> "QuadratureRule":
        table = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        return cls(np.ascontiguousarray(table[:, :-1]), np.ascontiguousarray(table[:, -1]))


def cc_points(level: int) -> int:
    """Node count of the nested rule: 1, 3, 5, 9, 17, 33, ..."""
    if level < 0:
        raise ValueError("level must be non-negative")
    return 1 if level == 0 else 2 ** level + 1


def _canonical_node(key: int, finest: int) -> float:
    # -cos(pi k / n) written as a sine so that the midpoint is exactly 0
    # and the node set is exactly antisymmetric.
    n = 2 ** finest
    return float(np.sin(np.pi * (2 * key - n) / (2 * n)))


def _level_keys(level: int, finest: int) -> np.ndarray:
    """Integer positions of the level's nodes on the finest dyadic grid."""
    if level == 0:
        return np.array([2 ** (finest - 1) if finest > 0 else 0])
    step = 2 ** (finest - level)
    return np.arange(cc_points(level)) * step


@lru_cache(maxsize=None)
def _cc_weights(level: int) -> np.ndarray:
    if level == 0:
        return np.array([1.0])
    n = 2 ** level
    j = np.arange(n + 1)
    theta = np.pi * j / n
    w = np.ones(n + 1)
    for k in range(1, n // 2 + 1):
        b = 1.0 if 2 * k == n else 2.0
        w -= b / (4 * k * k - 1) * np.cos(2 * k * theta)
    c = np.full(n + 1, 2.0)
    c[0] = c[-1] = 1.0
    # classical weights sum to 2; halve for the uniform density
    w = c * w / n / 2.0
    w.setflags(write=False)
    return w


def cc_1d(level: int) -> QuadratureRule:
    """One-dimensional nested Clenshaw-Curtis rule with ``cc_points(level)`` nodes.

    Exact for polynomials up to degree ``cc_points(level) - 1``.
    """
    level = int(level)
    m = cc_points(level)
    keys = _level_keys(level, level)
    nodes = np.array([_canonical_node(k, level) for k in keys]) if level > 0 else np.zeros(1)
    assert nodes.size == m
    return QuadratureRule(nodes.reshape(-1, 1), _cc_weights(level).copy())


def _compositions(d: int, total: int):
    if d == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(d - 1, total - first):
            yield (first,) + rest


@lru_cache(maxsize=32)
def _smolyak(d: int, level: int) -> QuadratureRule:
    finest = max(level, 1)
    coords = np.array([_canonical_node(k, finest) for k in range(2 ** finest + 1)])
    acc: dict[tuple[int, ...], float] = {}
    for q in range(max(0, level - d + 1), level + 1):
        coef = (-1) ** (level - q) * comb(d - 1, level - q)
        for levels in _compositions(d, q):
            key_sets = [_level_keys(l, finest) for l in levels]
            weight_sets = [_cc_weights(l) for l in levels]
            for combo in itertools.product(*[range(len(k)) for k in key_sets]):
                key = tuple(int(key_sets[i][c]) for i, c in enumerate(combo))
                w = coef
                for i, c in enumerate(combo):
                    w *= weight_sets[i][c]
                acc[key] = acc.get(key, 0.0) + w
    keys = sorted(acc)
    key_arr = np.array(keys, dtype=np.int64).reshape(-1, d)
    nodes = coords[key_arr]
    weights = np.array([acc[k] for k in keys])
    return QuadratureRule(nodes, weights)


def smolyak(d: int, level: int) -> QuadratureRule:
    """Isotropic Smolyak sparse grid built from nested Clenshaw-Curtis rules.

    Uses the combination technique: for ``max(0, L-d+1) <= |l| <= L`` add
    ``(-1)^(L-|l|) * C(d-1, L-|l|)`` times the tensor rule of levels ``l``.
    Nodes shared between tensor terms are merged by their integer grid key,
    so no tolerance is involved. Node order is lexicographic in those keys.

    >>> len(smolyak(10, 2)), len(smolyak(5, 3))
    (221, 241)
    """
    if d < 1:
        raise ValueError("dimension must be positive")
    if level < 0:
        raise ValueError("level must be non-negative")
    if d == 1:
        return cc_1d(level)
    return _smolyak(int(d), int(level))


def integrate(rule: QuadratureRule, values) -> float:
    values = np.asarray(values, dtype=float)
    if values.shape != rule.weights.shape:
        raise ValueError(f"expected {len(rule)} values, got {values.shape}")
    return float(values @ rule.weights)
