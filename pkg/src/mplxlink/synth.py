"""Synthetic multiplex networks with a calibrated cross-layer correlation.

Each layer starts as an independent Barabasi-Albert graph with its node
labels shuffled, so hubs do not line up across layers by construction. The
layers are then coupled: every node pair draws one reference layer, and each
layer overwrites its own state for that pair with the reference layer's
pristine state with probability ``p_copy``. ``p_copy = 0`` leaves the layers
independent; ``p_copy = 1`` makes them identical. :func:`calibrate` searches
``p_copy`` so the median pairwise edge correlation hits a target.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import LayerGraph, MultiplexNetwork, pair_arrays
from .correlation import _pearson_rows

__all__ = [
    "CalibrationError",
    "SynthSpec",
    "ba_layer",
    "couple_layers",
    "median_cross_correlation",
    "calibrate",
    "generate",
]

log = logging.getLogger(__name__)


class CalibrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SynthSpec:
    n: int = 100
    k: int = 10
    ba_m: int = 3
    target_median_corr: float = 0.5
    seed: int = 0
    calib_samples: int = 10
    calib_tol: float = 0.05
    calib_steps: int = 20

    def __post_init__(self) -> None:
        if not 1 <= self.ba_m < self.n:
            raise ValueError(f"ba_m must satisfy 1 <= ba_m < n, got ba_m={self.ba_m}, n={self.n}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if not 0 <= self.target_median_corr < 1:
            raise ValueError("target_median_corr must lie in [0, 1)")
        if self.calib_samples < 1 or self.calib_steps < 1:
            raise ValueError("calibration needs at least one sample and one step")
        if self.calib_tol <= 0:
            raise ValueError("calib_tol must be positive")


def _ba_adjacency(n: int, ba_m: int, rng: np.random.Generator, shuffle: bool) -> np.ndarray:
    adj = np.zeros((n, n), dtype=bool)
    seed = ba_m + 1
    adj[:seed, :seed] = True
    np.fill_diagonal(adj, False)
    deg = adj.sum(axis=1).astype(np.float64)
    for new in range(seed, n):
        weights = deg[:new]
        targets = rng.choice(new, size=ba_m, replace=False, p=weights / weights.sum())
        adj[new, targets] = adj[targets, new] = True
        deg[targets] += 1
        deg[new] = ba_m
    if shuffle:
        perm = rng.permutation(n)
        adj = adj[np.ix_(perm, perm)]
    return adj


def ba_layer(n: int, ba_m: int, rng: np.random.Generator, shuffle: bool = True) -> LayerGraph:
    """Preferential-attachment graph grown from a ``ba_m + 1`` clique.

    Node labels are randomly permuted unless ``shuffle`` is false.
    """
    if not 1 <= ba_m < n:
        raise ValueError(f"ba_m must satisfy 1 <= ba_m < n, got ba_m={ba_m}, n={n}")
    return LayerGraph(_ba_adjacency(n, ba_m, rng, shuffle))


def _coupling_draws(k: int, x: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    ref = rng.integers(0, k, size=x)
    u = rng.random((k, x))
    return ref, u


def _couple_rows(rows: np.ndarray, ref: np.ndarray, u: np.ndarray, p_copy: float) -> np.ndarray:
    copied = rows[ref, np.arange(rows.shape[1])]
    return np.where(u < p_copy, copied[None, :], rows)


def _rows_to_layers(rows: np.ndarray, n: int) -> list[LayerGraph]:
    r, c = pair_arrays(n)
    layers = []
    for row in rows:
        adj = np.zeros((n, n), dtype=bool)
        adj[r, c] = row
        adj |= adj.T
        layers.append(LayerGraph(adj))
    return layers


def couple_layers(
    layers: Sequence[LayerGraph], p_copy: float, rng: np.random.Generator,
    layer_names: Sequence[str] | None = None,
) -> MultiplexNetwork:
    """Couple layers by per-pair copying from a shared random reference layer.

    Copies read the pristine (pre-coupling) states, so the result does not
    depend on iteration order.
    """
    if not 0 <= p_copy <= 1:
        raise ValueError("p_copy must lie in [0, 1]")
    layers = list(layers)
    n = layers[0].n
    rows = np.stack([g.edge_vector().astype(bool) for g in layers])
    ref, u = _coupling_draws(len(layers), rows.shape[1], rng)
    coupled = _couple_rows(rows, ref, u, p_copy)
    return MultiplexNetwork(tuple(_rows_to_layers(coupled, n)), layer_names)


def _median_offdiag(rows: np.ndarray) -> float:
    k = rows.shape[0]
    if k < 2:
        raise ValueError("median cross-layer correlation needs at least two layers")
    corr = _pearson_rows(rows.astype(np.float64))
    return float(np.median(corr[np.triu_indices(k, 1)]))


def median_cross_correlation(net: MultiplexNetwork) -> float:
    """Median off-diagonal Pearson edge correlation."""
    rows = np.stack([g.edge_vector() for g in net.layers])
    return _median_offdiag(rows)


def _draw_pristine(spec: SynthSpec, rng: np.random.Generator) -> np.ndarray:
    r, c = pair_arrays(spec.n)
    return np.stack([_ba_adjacency(spec.n, spec.ba_m, rng, True)[r, c] for _ in range(spec.k)])


def calibrate(spec: SynthSpec) -> float:
    """Find ``p_copy`` whose mean median correlation is within tolerance of the target.

    Bisection on [0, 1] with common random numbers across probes, so the
    estimated curve is monotone in ``p_copy``. Raises
    :class:`CalibrationError` if the step budget runs out.
    """
    if spec.k < 2:
        return 0.0
    samples = []
    for s in range(spec.calib_samples):
        rng = np.random.default_rng([spec.seed, s, 0xCA1])
        rows = _draw_pristine(spec, rng)
        ref, u = _coupling_draws(spec.k, rows.shape[1], rng)
        samples.append((rows, ref, u))

    def achieved(p: float) -> float:
        return float(np.mean([_median_offdiag(_couple_rows(r, ref, u, p)) for r, ref, u in samples]))

    target = spec.target_median_corr
    # aim well inside the tolerance band so fresh draws still land in it
    inner_tol = spec.calib_tol / 5.0
    best_p, best_err = 0.0, abs(achieved(0.0) - target)
    if best_err <= spec.calib_tol:
        return 0.0
    lo, hi = 0.0, 1.0
    for step in range(spec.calib_steps):
        mid = (lo + hi) / 2.0
        err = achieved(mid) - target
        log.debug("calibration step %d: p_copy=%.6f error=%.4f", step, mid, err)
        if abs(err) < best_err:
            best_p, best_err = mid, abs(err)
        if abs(err) <= inner_tol:
            return mid
        if err < 0:
            lo = mid
        else:
            hi = mid
    if best_err <= spec.calib_tol:
        return best_p
    raise CalibrationError(
        f"could not reach median correlation {target:.3f} within {spec.calib_tol} "
        f"after {spec.calib_steps} steps (closest error {best_err:.3f})"
    )


def generate(spec: SynthSpec, p_copy: float | None = None, seed: int | None = None) -> MultiplexNetwork:
    """Draw one network; ``p_copy`` is calibrated from ``spec`` when omitted."""
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    layers = [ba_layer(spec.n, spec.ba_m, rng) for _ in range(spec.k)]
    if spec.k == 1:
        return MultiplexNetwork(tuple(layers))
    if p_copy is None:
        p_copy = calibrate(spec)
    return couple_layers(layers, p_copy, rng)
