"""Correlation-weighted multiplex heuristics: CWC, CWH and CCWH.

For a target layer ``i`` every other admitted layer ``l`` contributes
according to the sign of ``c = C[i, l]``:

* ``c > 0`` rewards evidence *present* in layer ``l``, scaled by ``c``;
* ``c < 0`` rewards evidence *absent* from layer ``l``, scaled by ``|c|``;
* ``c == 0`` (or ``|c| <= zero_weight_epsilon``) contributes nothing.

Sums are divided by ``Z``, the total absolute correlation of the target row
over admitted layers (the diagonal adds 1), so all scores lie in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import MultiplexNetwork, PropertyMatrix, edge_property_matrix, pair_arrays
from .correlation import CorrelationMatrix, admissible_layers, network_correlation
from .monoplex import MonoplexHeuristic, ScoreTable, min_max, score_matrix

__all__ = [
    "FAMILIES",
    "MplxConfig",
    "MplxScore",
    "z_norm",
    "cwc",
    "cwh",
    "ccwh",
    "layer_weights",
    "cwc_values",
    "cwh_values",
    "ccwh_values",
    "candidate_pairs",
    "normalized_layer_scores",
    "score_candidates",
    "score_pairs",
]

FAMILIES = ("CWC", "CWH", "CCWH")


@dataclass(frozen=True)
class MplxConfig:
    """Inputs shared by the multiplex heuristics.

    ``admitted`` maps a target layer to the layers allowed to contribute;
    a missing entry (or ``None``) admits every layer. ``ccwh_heuristic_layer``
    selects which layer's monoplex score gates the CCWH cross-layer terms:
    ``"target"`` (default) or ``"other"``.
    """

    correlation: CorrelationMatrix
    inner: MonoplexHeuristic | None = None
    admitted: Mapping[int, frozenset[int]] | None = None
    zero_weight_epsilon: float = 0.0
    ccwh_heuristic_layer: str = "target"

    def __post_init__(self) -> None:
        if self.zero_weight_epsilon < 0:
            raise ValueError("zero_weight_epsilon must be nonnegative")
        if self.ccwh_heuristic_layer not in ("target", "other"):
            raise ValueError("ccwh_heuristic_layer must be 'target' or 'other'")

    @classmethod
    def from_network(
        cls,
        net: MultiplexNetwork,
        kind: str = "edge",
        inner: MonoplexHeuristic | str | None = None,
        threshold_sd: float | None = None,
        **kwargs,
    ) -> "MplxConfig":
        """Correlations (and optional admission sets) computed from ``net``."""
        if isinstance(inner, str):
            inner = MonoplexHeuristic(inner)
        corr = network_correlation(net, kind)
        admitted = None
        if threshold_sd is not None:
            epm = edge_property_matrix(net)
            admitted = {t: admissible_layers(net, t, epm, threshold_sd) for t in range(net.k)}
        return cls(corr, inner, admitted, **kwargs)

    def admitted_for(self, target: int) -> frozenset[int]:
        if self.admitted is None or self.admitted.get(target) is None:
            return frozenset(range(self.correlation.k))
        return frozenset(self.admitted[target]) | {target}


@dataclass(frozen=True)
class MplxScore:
    value: float
    target_layer: int
    pair: int


def layer_weights(cfg: MplxConfig, target: int) -> np.ndarray:
    """Signed weights of the target row; zero for non-admitted and near-zero entries."""
    c = np.array(cfg.correlation.entries[target], dtype=np.float64)
    mask = np.zeros(c.size, dtype=bool)
    mask[list(cfg.admitted_for(target))] = True
    c[~mask] = 0.0
    c[np.abs(c) <= cfg.zero_weight_epsilon] = 0.0
    c[target] = 1.0
    return c


def z_norm(correlation: CorrelationMatrix, target: int, admitted=None) -> float:
    """Sum of absolute target-row correlations over admitted layers."""
    if admitted is None:
        admitted = range(correlation.k)
    admitted = set(admitted) | {target}
    return float(sum(abs(correlation.entries[target, l]) for l in admitted))


def _z(weights: np.ndarray) -> float:
    return float(np.abs(weights).sum())


def cwc_values(edge_rows: np.ndarray, weights: np.ndarray, target: int) -> np.ndarray:
    """CWC for every column of ``edge_rows`` (``k x x`` edge indicators)."""
    e = np.asarray(edge_rows, dtype=np.float64)
    others = np.arange(weights.size) != target
    pos = others & (weights > 0)
    neg = others & (weights < 0)
    total = weights[pos] @ e[pos] + np.abs(weights[neg]) @ (1.0 - e[neg])
    return total / _z(weights)


def cwh_values(h: np.ndarray, weights: np.ndarray, target: int) -> np.ndarray:
    """CWH for every column of ``h`` (``k x x`` normalized monoplex scores)."""
    h = np.asarray(h, dtype=np.float64)
    others = np.arange(weights.size) != target
    pos = others & (weights > 0)
    neg = others & (weights < 0)
    total = h[target] + weights[pos] @ h[pos] + np.abs(weights[neg]) @ (1.0 - h[neg])
    return total / _z(weights)


def ccwh_values(
    edge_rows: np.ndarray, h: np.ndarray, weights: np.ndarray, target: int,
    heuristic_layer: str = "target",
) -> np.ndarray:
    """CCWH for every column; see :class:`MplxConfig` for ``heuristic_layer``."""
    e = np.asarray(edge_rows, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    others = np.arange(weights.size) != target
    pos = others & (weights > 0)
    neg = others & (weights < 0)
    if heuristic_layer == "target":
        gate = np.broadcast_to(h[target], e.shape)
    else:
        gate = h
    total = (
        h[target]
        + weights[pos] @ (e[pos] * gate[pos])
        + np.abs(weights[neg]) @ ((1.0 - e[neg]) * (1.0 - gate[neg]))
    )
    return total / _z(weights)


def candidate_pairs(net: MultiplexNetwork, target: int) -> np.ndarray:
    """Pair indices that are non-edges at the target layer."""
    rows, cols = pair_arrays(net.n)
    present = net.layers[target].adjacency[rows, cols]
    return np.flatnonzero(~present)


def normalized_layer_scores(
    net: MultiplexNetwork, inner: MonoplexHeuristic, pairs: np.ndarray
) -> np.ndarray:
    """``k x len(pairs)`` monoplex scores, min-max normalized per layer over ``pairs``."""
    rows, cols = pair_arrays(net.n)
    r, c = rows[pairs], cols[pairs]
    out = np.empty((net.k, pairs.size))
    for l, layer in enumerate(net.layers):
        out[l] = min_max(score_matrix(layer, inner)[r, c])
    return out


def _tables_to_matrix(
    tables: Mapping[int, ScoreTable] | Sequence[ScoreTable], layers, pair: int
) -> dict[int, float]:
    if not isinstance(tables, Mapping):
        tables = {t.layer: t for t in tables}
    out = {}
    for l in layers:
        if l not in tables:
            raise KeyError(f"missing score table for admitted layer {l}")
        norm = tables[l].normalized_entries()
        if pair not in norm:
            raise KeyError(f"pair {pair} not scored at layer {l}")
        out[l] = norm[pair]
    return out


def _check_candidate(net: MultiplexNetwork, target: int, pair: int) -> None:
    rows, cols = pair_arrays(net.n)
    if net.layers[target].adjacency[rows[pair], cols[pair]]:
        raise ValueError(f"pair {pair} is already an edge at layer {target}")


def cwc(
    net: MultiplexNetwork, edge_pm: PropertyMatrix | None, cfg: MplxConfig,
    target: int, pair: int,
) -> MplxScore:
    _check_candidate(net, target, pair)
    if edge_pm is None:
        edge_pm = edge_property_matrix(net)
    w = layer_weights(cfg, target)
    value = cwc_values(edge_pm.rows[:, [pair]], w, target)[0]
    return MplxScore(float(value), target, pair)


def _h_column(net, cfg, target, pair, normalized_scores) -> np.ndarray:
    w = layer_weights(cfg, target)
    used = [l for l in range(net.k) if w[l] != 0]
    vals = _tables_to_matrix(normalized_scores, used, pair)
    h = np.zeros((net.k, 1))
    for l, v in vals.items():
        h[l, 0] = v
    return h


def cwh(
    net: MultiplexNetwork, cfg: MplxConfig, target: int, pair: int,
    normalized_scores: Mapping[int, ScoreTable] | Sequence[ScoreTable],
) -> MplxScore:
    _check_candidate(net, target, pair)
    h = _h_column(net, cfg, target, pair, normalized_scores)
    value = cwh_values(h, layer_weights(cfg, target), target)[0]
    return MplxScore(float(value), target, pair)


def ccwh(
    net: MultiplexNetwork, edge_pm: PropertyMatrix | None, cfg: MplxConfig,
    target: int, pair: int,
    normalized_scores: Mapping[int, ScoreTable] | Sequence[ScoreTable],
) -> MplxScore:
    _check_candidate(net, target, pair)
    if edge_pm is None:
        edge_pm = edge_property_matrix(net)
    h = _h_column(net, cfg, target, pair, normalized_scores)
    value = ccwh_values(
        edge_pm.rows[:, [pair]], h, layer_weights(cfg, target), target,
        cfg.ccwh_heuristic_layer,
    )[0]
    return MplxScore(float(value), target, pair)


def score_pairs(
    net: MultiplexNetwork, cfg: MplxConfig, target: int, family: str,
    pairs: np.ndarray, inner: MonoplexHeuristic | str | None = None,
    edge_pm: PropertyMatrix | None = None,
) -> np.ndarray:
    """Vectorized family score for arbitrary pair indices (edges allowed)."""
    family = family.upper()
    if family not in FAMILIES:
        raise ValueError(f"unknown multiplex family {family!r}")
    if isinstance(inner, str):
        inner = MonoplexHeuristic(inner)
    inner = inner or cfg.inner
    pairs = np.asarray(pairs, dtype=np.int64)
    w = layer_weights(cfg, target)
    if family != "CWH":
        if edge_pm is None:
            edge_pm = edge_property_matrix(net)
        e = edge_pm.rows[:, pairs]
    if family == "CWC":
        return cwc_values(e, w, target)
    if inner is None:
        raise ValueError(f"{family} needs an inner monoplex heuristic")
    h = normalized_layer_scores(net, inner, pairs)
    if family == "CWH":
        return cwh_values(h, w, target)
    return ccwh_values(e, h, w, target, cfg.ccwh_heuristic_layer)


def score_candidates(
    net: MultiplexNetwork, cfg: MplxConfig, target: int, family: str,
    inner: MonoplexHeuristic | str | None = None,
) -> ScoreTable:
    """Score every non-edge of the target layer with one family."""
    pairs = candidate_pairs(net, target)
    values = score_pairs(net, cfg, target, family, pairs, inner)
    return ScoreTable(target, pairs, values, values)

