"""Cross-layer correlation and the random-graph overlap threshold.

Correlation matrices weight layers against each other. The overlap
statistics give the mean and variance of the cosine overlap between an
observed layer and a uniformly random ``G(n, m)`` graph, which is the null
model used to decide whether another layer is informative enough to admit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .core import (
    MultiplexNetwork,
    PropertyMatrix,
    degree_property_matrix,
    edge_property_matrix,
    pair_count,
)

__all__ = [
    "CorrelationMatrix",
    "OverlapStats",
    "pearson",
    "spearman",
    "correlation_matrix",
    "network_correlation",
    "cosine_overlap",
    "er_first_moment",
    "er_second_cross_moment",
    "expected_overlap",
    "overlap_stats",
    "admissible_layers",
    "DEFAULT_METRIC",
]

DEFAULT_METRIC = {"edge": "pearson", "degree": "spearman"}


def _as_pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise ValueError("correlation needs at least two observations")
    return a, b


def pearson(a, b) -> float:
    """Pearson correlation; 0 if either input has zero variance."""
    a, b = _as_pair(a, b)
    da = a - a.mean()
    db = b - b.mean()
    denom = math.sqrt(float(da @ da) * float(db @ db))
    if denom == 0.0:
        return 0.0
    return float(np.clip((da @ db) / denom, -1.0, 1.0))


def spearman(a, b) -> float:
    """Spearman correlation with average ranks for ties."""
    a, b = _as_pair(a, b)
    return pearson(rankdata(a), rankdata(b))


@dataclass(frozen=True)
class CorrelationMatrix:
    entries: np.ndarray
    metric: str
    kind: str

    @property
    def k(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]


def _pearson_rows(rows: np.ndarray) -> np.ndarray:
    x = rows - rows.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("ij,ij->i", x, x))
    cov = x @ x.T
    scale = np.outer(norms, norms)
    out = np.zeros_like(cov)
    np.divide(cov, scale, out=out, where=scale > 0)
    return np.clip(out, -1.0, 1.0)


def correlation_matrix(pm: PropertyMatrix, metric: str | None = None) -> CorrelationMatrix:
    """``k x k`` matrix of ``metric`` over the property rows, unit diagonal.

    The metric defaults to Pearson for edge matrices and Spearman for degree
    matrices.
    """
    metric = (metric or DEFAULT_METRIC[pm.kind]).lower()
    rows = np.asarray(pm.rows, dtype=np.float64)
    if metric == "spearman":
        rows = np.vstack([rankdata(r) for r in rows]) if rows.size else rows
    elif metric != "pearson":
        raise ValueError(f"unknown correlation metric {metric!r}")
    if rows.shape[1] < 2:
        entries = np.zeros((rows.shape[0], rows.shape[0]))
    else:
        entries = _pearson_rows(rows)
    entries = (entries + entries.T) / 2.0
    np.fill_diagonal(entries, 1.0)
    entries.setflags(write=False)
    return CorrelationMatrix(entries, metric, pm.kind)


def network_correlation(net: MultiplexNetwork, kind: str = "edge", metric: str | None = None) -> CorrelationMatrix:
    if kind == "edge":
        pm = edge_property_matrix(net)
    elif kind == "degree":
        pm = degree_property_matrix(net)
    else:
        raise ValueError(f"unknown property kind {kind!r}")
    return correlation_matrix(pm, metric)


def cosine_overlap(p_i, p_j) -> float:
    """Cosine similarity of two binary edge vectors; 0 if either is empty."""
    p_i = np.asarray(p_i, dtype=np.float64)
    p_j = np.asarray(p_j, dtype=np.float64)
    if p_i.shape != p_j.shape:
        raise ValueError("edge vectors differ in length")
    denom = math.sqrt(float(p_i @ p_i) * float(p_j @ p_j))
    if denom == 0.0:
        return 0.0
    return float(p_i @ p_j) / denom


def _check_m(n: int, m: int) -> None:
    if not 0 <= m <= pair_count(n):
        raise ValueError(f"edge count {m} outside [0, {pair_count(n)}] for n={n}")


def er_first_moment(n: int, m: int) -> float:
    """Probability that a fixed pair is an edge of a uniform ``G(n, m)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_m(n, m)
    return 2.0 * m / (n * (n - 1))


def er_second_cross_moment(n: int, m: int) -> float:
    """Probability that two fixed distinct pairs are both edges of ``G(n, m)``."""
    if n < 3:
        raise ValueError("n must be at least 3")
    _check_m(n, m)
    return 4.0 * m * (m - 1) / (n * (n - 2) * (n * n - 1))


def _check_overlap_args(n: int, m_i: int, m_j: int) -> None:
    for m in (m_i, m_j):
        _check_m(n, m)
        if m < 1:
            raise ValueError("overlap is undefined for a layer without edges")


def expected_overlap(n: int, m_i: int, m_j: int) -> float:
    """Mean cosine overlap of an ``m_i``-edge graph with a random ``G(n, m_j)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_overlap_args(n, m_i, m_j)
    return 2.0 * math.sqrt(m_i * m_j) / (n * (n - 1))


@dataclass(frozen=True)
class OverlapStats:
    n: int
    m_i: int
    m_j: int
    mean: float
    second_moment: float
    variance: float

    @property
    def sd(self) -> float:
        return math.sqrt(max(self.variance, 0.0))

    def threshold(self, num_sd: float) -> float:
        return self.mean + num_sd * self.sd


def overlap_stats(n: int, m_i: int, m_j: int) -> OverlapStats:
    if n < 3:
        raise ValueError("n must be at least 3")
    _check_overlap_args(n, m_i, m_j)
    mean = expected_overlap(n, m_i, m_j)
    cross = 4.0 * (m_i - 1) * (m_j - 1) / (n * (n - 2) * (n * n - 1))
    second = 2.0 / (n * (n - 1)) + cross
    variance = (2.0 * n * (n - 1) - 4.0 * m_i * m_j) / (n * n * (n - 1) ** 2) + cross
    return OverlapStats(n, m_i, m_j, mean, second, variance)


def admissible_layers(
    net: MultiplexNetwork,
    target_layer: int,
    edge_pm: PropertyMatrix | None = None,
    num_sd: float = 2.0,
) -> frozenset[int]:
    """Layers whose overlap with the target beats the random-graph threshold.

    A layer ``l`` is admitted when its cosine overlap with the target exceeds
    ``mean + num_sd * sd`` of the overlap with a ``G(n, m_l)`` graph. Empty
    layers are never admitted; the target itself always is.
    """
    if num_sd < 0:
        raise ValueError("num_sd must be nonnegative")
    if edge_pm is None:
        edge_pm = edge_property_matrix(net)
    rows = edge_pm.rows
    m = rows.sum(axis=1).astype(int)
    admitted = {target_layer}
    m_t = int(m[target_layer])
    for layer in range(net.k):
        if layer == target_layer or m[layer] == 0 or m_t == 0:
            continue
        stats = overlap_stats(net.n, m_t, int(m[layer]))
        if cosine_overlap(rows[target_layer], rows[layer]) > stats.threshold(num_sd):
            admitted.add(layer)
    return frozenset(admitted)
