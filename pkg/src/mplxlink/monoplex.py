"""Single-layer similarity heuristics.

Every heuristic has a per-pair function (``cn(layer, u, v)`` and friends)
and a vectorized all-pairs form used by the batch driver
:func:`score_layer`. Both read the same immutable :class:`LayerGraph`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import LayerGraph, MultiplexNetwork, pair_arrays

__all__ = [
    "HEURISTIC_TAGS",
    "ConvergenceError",
    "MonoplexHeuristic",
    "ScoreTable",
    "cn",
    "jc",
    "ra",
    "aa",
    "pa",
    "pcc",
    "katz",
    "rooted_pagerank",
    "rooted_pagerank_vector",
    "clustering_coefficients",
    "score_matrix",
    "score_layer",
    "min_max",
]

HEURISTIC_TAGS = ("CN", "JC", "RA", "AA", "PA", "PCC", "KS", "RPR")


class ConvergenceError(RuntimeError):
    """Power iteration hit its iteration cap before reaching tolerance."""


@dataclass(frozen=True)
class MonoplexHeuristic:
    """A heuristic tag plus the parameters of the path-based ones."""

    tag: str
    beta: float = 0.05
    max_walk_len: int = 5
    alpha: float = 0.85
    rpr_tol: float = 1e-8
    rpr_max_iter: int = 10_000

    def __post_init__(self) -> None:
        tag = self.tag.upper()
        if tag not in HEURISTIC_TAGS:
            raise ValueError(f"unknown monoplex heuristic {self.tag!r}")
        object.__setattr__(self, "tag", tag)
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.max_walk_len < 2:
            raise ValueError("max_walk_len must be at least 2")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.rpr_tol <= 0:
            raise ValueError("rpr_tol must be positive")
        if self.rpr_max_iter < 1:
            raise ValueError("rpr_max_iter must be positive")


def _check_pair(u: int, v: int) -> None:
    if u == v:
        raise ValueError(f"heuristics are defined for distinct nodes, got ({u}, {v})")


def _common(layer: LayerGraph, u: int, v: int) -> np.ndarray:
    adj = layer.adjacency
    return np.flatnonzero(adj[u] & adj[v])


def cn(layer: LayerGraph, u: int, v: int) -> int:
    """Number of common neighbors."""
    _check_pair(u, v)
    return int(_common(layer, u, v).size)


def jc(layer: LayerGraph, u: int, v: int) -> float:
    """Jaccard coefficient; 0 when both neighborhoods are empty."""
    _check_pair(u, v)
    adj = layer.adjacency
    union = int(np.count_nonzero(adj[u] | adj[v]))
    if union == 0:
        return 0.0
    return int(np.count_nonzero(adj[u] & adj[v])) / union


def ra(layer: LayerGraph, u: int, v: int) -> float:
    """Resource allocation: sum of inverse degrees of common neighbors."""
    _check_pair(u, v)
    deg = layer.degrees
    return float(sum(1.0 / deg[z] for z in _common(layer, u, v)))


def aa(layer: LayerGraph, u: int, v: int) -> float:
    """Adamic-Adar. Degree-1 common neighbors are skipped (log 1 = 0)."""
    _check_pair(u, v)
    deg = layer.degrees
    return float(sum(1.0 / math.log(deg[z]) for z in _common(layer, u, v) if deg[z] > 1))


def pa(layer: LayerGraph, u: int, v: int) -> int:
    _check_pair(u, v)
    deg = layer.degrees
    return int(deg[u]) * int(deg[v])


def clustering_coefficients(layer: LayerGraph) -> np.ndarray:
    """Local clustering coefficient per node, 0 for degree below 2."""
    a = layer.adjacency.astype(np.float64)
    links = np.einsum("ij,jk,ki->i", a, a, a) / 2.0
    deg = layer.degrees.astype(np.float64)
    possible = deg * (deg - 1) / 2.0
    out = np.zeros_like(deg)
    np.divide(links, possible, out=out, where=possible > 0)
    return out


def pcc(layer: LayerGraph, u: int, v: int) -> float:
    """Product of the two clustering coefficients."""
    _check_pair(u, v)
    cc = clustering_coefficients(layer)
    return float(cc[u] * cc[v])


def _katz_matrix(layer: LayerGraph, beta: float, max_walk_len: int) -> np.ndarray:
    a = layer.adjacency.astype(np.float64)
    total = np.zeros_like(a)
    term = np.eye(a.shape[0])
    for _ in range(max_walk_len):
        term = beta * (term @ a)
        total += term
    return total


def katz(layer: LayerGraph, u: int, v: int, beta: float = 0.05, max_walk_len: int = 5) -> float:
    """Truncated Katz index over walks of length ``1..max_walk_len``."""
    _check_pair(u, v)
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    a = layer.adjacency.astype(np.float64)
    x = np.zeros(a.shape[0])
    x[u] = 1.0
    score = 0.0
    for _ in range(max_walk_len):
        x = beta * (a @ x)
        score += x[v]
    return float(score)


def _transition(layer: LayerGraph) -> tuple[np.ndarray, np.ndarray]:
    a = layer.adjacency.astype(np.float64)
    deg = a.sum(axis=1)
    dangling = deg == 0
    w = np.zeros_like(a)
    np.divide(a, deg[:, None], out=w, where=~dangling[:, None])
    return w, dangling


def _rpr_iterate(
    layer: LayerGraph, roots: np.ndarray, alpha: float, tol: float, max_iter: int
) -> np.ndarray:
    # one row per root; dangling mass and the restart both flow back to that root
    w, dangling = _transition(layer)
    m = roots.size
    idx = np.arange(m)
    restart = np.zeros((m, layer.n))
    restart[idx, roots] = 1.0
    pi = restart.copy()
    for _ in range(max_iter):
        nxt = alpha * (pi @ w)
        nxt[idx, roots] += alpha * pi[:, dangling].sum(axis=1)
        nxt += (1.0 - alpha) * restart
        delta = np.abs(nxt - pi).sum(axis=1).max()
        pi = nxt
        if delta < tol:
            return pi
    raise ConvergenceError(f"rooted PageRank did not converge within {max_iter} iterations")


def rooted_pagerank_vector(
    layer: LayerGraph, root: int, alpha: float = 0.85, rpr_tol: float = 1e-8,
    rpr_max_iter: int = 10_000,
) -> np.ndarray:
    """Stationary distribution of the walk restarting at ``root``."""
    return _rpr_iterate(layer, np.array([root]), alpha, rpr_tol, rpr_max_iter)[0]


def rooted_pagerank(
    layer: LayerGraph, u: int, v: int, alpha: float = 0.85, rpr_tol: float = 1e-8,
    rpr_max_iter: int = 10_000,
) -> float:
    """Symmetrized rooted PageRank ``pi_u[v] + pi_v[u]``."""
    _check_pair(u, v)
    pi = _rpr_iterate(layer, np.array([u, v]), alpha, rpr_tol, rpr_max_iter)
    return float(pi[0, v] + pi[1, u])


def _cn_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    a = layer.adjacency.astype(np.float64)
    return a @ a


def _jc_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    common = _cn_matrix(layer, h)
    deg = layer.degrees.astype(np.float64)
    union = deg[:, None] + deg[None, :] - common
    out = np.zeros_like(common)
    np.divide(common, union, out=out, where=union > 0)
    return out


def _weighted_common(layer: LayerGraph, weights: np.ndarray) -> np.ndarray:
    a = layer.adjacency.astype(np.float64)
    return (a * weights[None, :]) @ a


def _ra_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    deg = layer.degrees.astype(np.float64)
    w = np.zeros_like(deg)
    np.divide(1.0, deg, out=w, where=deg > 0)
    return _weighted_common(layer, w)


def _aa_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    deg = layer.degrees.astype(np.float64)
    w = np.zeros_like(deg)
    big = deg > 1
    w[big] = 1.0 / np.log(deg[big])
    return _weighted_common(layer, w)


def _pa_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    deg = layer.degrees.astype(np.float64)
    return np.outer(deg, deg)


def _pcc_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    cc = clustering_coefficients(layer)
    return np.outer(cc, cc)


def _ks_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    return _katz_matrix(layer, h.beta, h.max_walk_len)


def _rpr_matrix(layer: LayerGraph, h: MonoplexHeuristic) -> np.ndarray:
    pi = _rpr_iterate(layer, np.arange(layer.n), h.alpha, h.rpr_tol, h.rpr_max_iter)
    return pi + pi.T


_MATRIX: dict[str, Callable[[LayerGraph, MonoplexHeuristic], np.ndarray]] = {
    "CN": _cn_matrix,
    "JC": _jc_matrix,
    "RA": _ra_matrix,
    "AA": _aa_matrix,
    "PA": _pa_matrix,
    "PCC": _pcc_matrix,
    "KS": _ks_matrix,
    "RPR": _rpr_matrix,
}


def score_matrix(layer: LayerGraph, heuristic: MonoplexHeuristic | str) -> np.ndarray:
    """Dense ``n x n`` matrix of raw scores for every node pair."""
    if isinstance(heuristic, str):
        heuristic = MonoplexHeuristic(heuristic)
    return _MATRIX[heuristic.tag](layer, heuristic)


def min_max(values: np.ndarray) -> np.ndarray:
    """Rescale to [0, 1]; a constant vector maps to all zeros."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return values.copy()
    lo, hi = values.min(), values.max()
    if hi - lo <= 0:
        return np.zeros_like(values)
    return np.clip((values - lo) / (hi - lo), 0.0, 1.0)


@dataclass(frozen=True)
class ScoreTable:
    """Scores for a set of candidate pairs at one layer.

    ``pairs`` holds sorted pair indices; ``raw`` and ``normalized`` are aligned
    with it.
    """

    layer: int
    pairs: np.ndarray
    raw: np.ndarray
    normalized: np.ndarray

    def __len__(self) -> int:
        return int(self.pairs.size)

    def entries(self) -> dict[int, float]:
        return dict(zip(self.pairs.tolist(), self.raw.tolist()))

    def normalized_entries(self) -> dict[int, float]:
        return dict(zip(self.pairs.tolist(), self.normalized.tolist()))


def score_layer(
    net: MultiplexNetwork,
    layer: int,
    heuristic: MonoplexHeuristic | str,
    candidates: np.ndarray | None = None,
) -> ScoreTable:
    """Score ``candidates`` (pair indices; all pairs if ``None``) at one layer."""
    g = net.layers[layer]
    rows, cols = pair_arrays(net.n)
    if candidates is None:
        pairs = np.arange(rows.size)
    else:
        pairs = np.unique(np.asarray(candidates, dtype=np.int64))
    raw = score_matrix(g, heuristic)[rows[pairs], cols[pairs]]
    return ScoreTable(layer, pairs, raw, min_max(raw))
