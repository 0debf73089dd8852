"""Downsample-and-recover evaluation and supervised feature export.

One replicate: take a network, hide a fraction of each layer's edges, score
every non-edge of the observed layer, predict the top ``x`` pairs where ``x``
is the number hidden, and record the fraction of hidden edges recovered.
Correlations and admission thresholds are always computed on the observed
network.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

from .core import LayerGraph, MultiplexNetwork, edge_property_matrix, pair_arrays
from .monoplex import HEURISTIC_TAGS, MonoplexHeuristic, ScoreTable, score_layer, score_matrix, min_max
from .mplx import (
    FAMILIES,
    MplxConfig,
    candidate_pairs,
    ccwh_values,
    cwc_values,
    cwh_values,
    layer_weights,
    score_candidates,
)
from .synth import SynthSpec, calibrate, generate

__all__ = [
    "HeuristicSpec",
    "parse_heuristic",
    "ExperimentSpec",
    "EvalRecord",
    "EvalResult",
    "FeatureMatrix",
    "downsample",
    "predict_topx",
    "accuracy",
    "score_heuristic",
    "run_experiment",
    "export_features",
    "worker_count",
]

log = logging.getLogger(__name__)

KIND_SUFFIX = {"edge": "e", "degree": "d"}
SUFFIX_KIND = {v: k for k, v in KIND_SUFFIX.items()}


@dataclass(frozen=True)
class HeuristicSpec:
    """A monoplex baseline or a multiplex family with its inner heuristic.

    ``family`` is ``"MONO"``, ``"CWC"``, ``"CWH"`` or ``"CCWH"``; ``kind``
    (``"edge"``/``"degree"``) picks the correlation matrix of the multiplex
    families.
    """

    family: str
    inner: str | None = None
    kind: str | None = None

    def __post_init__(self) -> None:
        family = self.family.upper()
        object.__setattr__(self, "family", family)
        inner = self.inner.upper() if self.inner else None
        object.__setattr__(self, "inner", inner)
        if family == "MONO":
            if inner not in HEURISTIC_TAGS:
                raise ValueError(f"monoplex baseline needs a heuristic tag, got {self.inner!r}")
            return
        if family not in FAMILIES:
            raise ValueError(f"unknown heuristic family {self.family!r}")
        if self.kind not in KIND_SUFFIX:
            raise ValueError(f"{family} needs kind 'edge' or 'degree', got {self.kind!r}")
        if family == "CWC" and inner is not None:
            raise ValueError("CWC takes no inner heuristic")
        if family != "CWC" and inner not in HEURISTIC_TAGS:
            raise ValueError(f"{family} needs an inner heuristic tag, got {self.inner!r}")

    @property
    def label(self) -> str:
        if self.family == "MONO":
            return self.inner
        base = f"{self.family}{KIND_SUFFIX[self.kind]}"
        return base if self.inner is None else f"{base}-{self.inner}"


_NAME = re.compile(r"^(?:(cwc)-([ed])|(cwh|ccwh)-([a-z]+)-([ed])|([a-z]+))$")


def parse_heuristic(name: str) -> HeuristicSpec:
    """Parse CLI names: ``cn``, ``cwc-e``, ``cwh-cn-d``, ``ccwh-ra-e``.

    Output labels (``CWCe``, ``CWHd-CN``) are accepted too.
    """
    raw = name.strip()
    label = re.match(r"^(CWC|CWH|CCWH)([ed])(?:-([A-Za-z]+))?$", raw)
    if label:
        fam, suffix, inner = label.groups()
        return HeuristicSpec(fam, inner, SUFFIX_KIND[suffix])
    m = _NAME.match(raw.lower())
    if not m:
        raise ValueError(f"unknown heuristic name {name!r}")
    if m.group(1):
        return HeuristicSpec("CWC", None, SUFFIX_KIND[m.group(2)])
    if m.group(3):
        return HeuristicSpec(m.group(3), m.group(4), SUFFIX_KIND[m.group(5)])
    if m.group(6).upper() not in HEURISTIC_TAGS:
        raise ValueError(f"unknown heuristic name {name!r}")
    return HeuristicSpec("MONO", m.group(6))


def downsample(
    net: MultiplexNetwork, frac: float, rng: np.random.Generator
) -> tuple[MultiplexNetwork, list[np.ndarray]]:
    """Hide ``floor(frac * m)`` uniformly chosen edges per layer.

    Returns the observed network and, per layer, the sorted pair indices of
    the hidden edges.
    """
    if not 0 < frac < 1:
        raise ValueError("downsample fraction must lie in (0, 1)")
    rows, cols = pair_arrays(net.n)
    layers, removed = [], []
    for g in net.layers:
        present = np.flatnonzero(g.adjacency[rows, cols])
        drop = int(np.floor(frac * present.size))
        gone = np.sort(rng.choice(present, size=drop, replace=False)) if drop else np.empty(0, np.int64)
        adj = g.adjacency.copy()
        adj[rows[gone], cols[gone]] = False
        adj[cols[gone], rows[gone]] = False
        layers.append(LayerGraph(adj))
        removed.append(gone.astype(np.int64))
    return net.with_layers(layers), removed


def predict_topx(scores: ScoreTable, x: int) -> np.ndarray:
    """Pair indices of the ``x`` best candidates; ties go to the lower index."""
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x > len(scores):
        log.warning("asked for %d predictions from %d candidates; returning all", x, len(scores))
        x = len(scores)
    order = np.lexsort((scores.pairs, -np.asarray(scores.raw, dtype=np.float64)))
    return scores.pairs[order[:x]]


def accuracy(predicted: Iterable[int], removed: Iterable[int]) -> float:
    """Fraction of removed pairs that were predicted (``nan`` if none removed)."""
    removed = set(np.asarray(list(removed)).tolist())
    if not removed:
        return float("nan")
    hits = removed & set(np.asarray(list(predicted)).tolist())
    return len(hits) / len(removed)


def score_heuristic(
    observed: MultiplexNetwork,
    target: int,
    spec: HeuristicSpec,
    configs: dict[str, MplxConfig],
    params: MonoplexHeuristic | None = None,
) -> ScoreTable:
    """Score every candidate at ``target`` with one heuristic spec."""
    params = params or MonoplexHeuristic("CN")
    inner = None
    if spec.inner is not None:
        inner = MonoplexHeuristic(
            spec.inner, params.beta, params.max_walk_len, params.alpha,
            params.rpr_tol, params.rpr_max_iter,
        )
    if spec.family == "MONO":
        return score_layer(observed, target, inner, candidate_pairs(observed, target))
    return score_candidates(observed, configs[spec.kind], target, spec.family, inner)


@dataclass(frozen=True)
class ExperimentSpec:
    heuristics: tuple[HeuristicSpec, ...]
    downsample_frac: float = 0.25
    reps: int = 10
    threshold_sd: float | None = None
    seed: int = 0
    params: MonoplexHeuristic = field(default_factory=lambda: MonoplexHeuristic("CN"))
    zero_weight_epsilon: float = 0.0
    ccwh_heuristic_layer: str = "target"

    def __post_init__(self) -> None:
        if not 0 < self.downsample_frac < 1:
            raise ValueError("downsample_frac must lie in (0, 1)")
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.threshold_sd is not None and self.threshold_sd < 0:
            raise ValueError("threshold_sd must be nonnegative")
        hs = tuple(h if isinstance(h, HeuristicSpec) else parse_heuristic(h) for h in self.heuristics)
        if not hs:
            raise ValueError("at least one heuristic is required")
        object.__setattr__(self, "heuristics", hs)


@dataclass(frozen=True)
class EvalRecord:
    heuristic: str
    layer: int
    replicate: int
    accuracy: float


@dataclass
class EvalResult:
    records: list[EvalRecord]
    labels: tuple[str, ...]
    layer_names: tuple[str, ...]
    reps: int
    admitted: dict[tuple[int, int], frozenset[int]] = field(default_factory=dict)

    def replicate_means(self, heuristic: str) -> np.ndarray:
        """Mean accuracy over layers, one value per replicate."""
        out = []
        for rep in range(self.reps):
            vals = [r.accuracy for r in self.records
                    if r.heuristic == heuristic and r.replicate == rep and not np.isnan(r.accuracy)]
            if vals:
                out.append(float(np.mean(vals)))
        return np.array(out)

    def mean_accuracy(self, heuristic: str) -> float:
        means = self.replicate_means(heuristic)
        return float(means.mean()) if means.size else float("nan")

    def stderr(self, heuristic: str) -> float:
        means = self.replicate_means(heuristic)
        if means.size < 2:
            return 0.0
        return float(means.std(ddof=1) / np.sqrt(means.size))

    def layer_mean(self, heuristic: str, layer: int) -> float:
        vals = [r.accuracy for r in self.records
                if r.heuristic == heuristic and r.layer == layer and not np.isnan(r.accuracy)]
        return float(np.mean(vals)) if vals else float("nan")

    def aggregates(self) -> dict[str, float]:
        return {h: self.mean_accuracy(h) for h in self.labels}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["heuristic", "layer", "replicate", "accuracy"])
        for r in self.records:
            w.writerow([r.heuristic, self.layer_names[r.layer], r.replicate, _fmt(r.accuracy)])
        w.writerow([])
        w.writerow(["# summary"])
        w.writerow(["heuristic", "mean_accuracy", "stderr", "replicates"])
        for h in self.labels:
            w.writerow([h, _fmt(self.mean_accuracy(h)), _fmt(self.stderr(h)),
                        self.replicate_means(h).size])
        return buf.getvalue()


def _fmt(x: float) -> str:
    return "nan" if np.isnan(x) else f"{x:.6f}"


NetworkSource = Union[MultiplexNetwork, SynthSpec, Callable[[int], MultiplexNetwork]]


def worker_count(requested: int | None = None) -> int:
    """Worker cap from the argument or ``MPLX_THREADS`` (0 means auto)."""
    if requested is None:
        requested = int(os.environ.get("MPLX_THREADS", "0") or 0)
    if requested <= 0:
        return os.cpu_count() or 1
    return requested


def _replicate(
    net: MultiplexNetwork, spec: ExperimentSpec, rep: int
) -> tuple[list[EvalRecord], dict[tuple[int, int], frozenset[int]]]:
    rng = np.random.default_rng([spec.seed + rep, 0xD5])
    observed, removed = downsample(net, spec.downsample_frac, rng)
    kinds = {h.kind for h in spec.heuristics if h.family != "MONO"}
    configs = {
        kind: MplxConfig.from_network(
            observed, kind, threshold_sd=spec.threshold_sd,
            zero_weight_epsilon=spec.zero_weight_epsilon,
            ccwh_heuristic_layer=spec.ccwh_heuristic_layer,
        )
        for kind in sorted(kinds)
    }
    admitted = {}
    if spec.threshold_sd is not None and configs:
        cfg = configs[sorted(configs)[0]]
        admitted = {(rep, t): cfg.admitted_for(t) for t in range(net.k)}
    records = []
    for h in spec.heuristics:
        for t in range(net.k):
            if removed[t].size == 0:
                continue
            table = score_heuristic(observed, t, h, configs, spec.params)
            pred = predict_topx(table, removed[t].size)
            records.append(EvalRecord(h.label, t, rep, accuracy(pred, removed[t])))
    return records, admitted


def run_experiment(
    source: NetworkSource, spec: ExperimentSpec, workers: int | None = None
) -> EvalResult:
    """Run every replicate and collect per-layer accuracies.

    ``source`` is a fixed network (replicates differ only in the hidden
    edges), a :class:`SynthSpec` (calibrated once, then one fresh network per
    replicate seeded ``seed + replicate``), or a callable mapping the
    replicate seed to a network.
    """
    if isinstance(source, SynthSpec):
        synth = source
        p_copy = calibrate(synth) if synth.k > 1 else 0.0
        make = lambda s: generate(synth, p_copy=p_copy, seed=s)  # noqa: E731
    elif isinstance(source, MultiplexNetwork):
        make = lambda s: source  # noqa: E731
    else:
        make = source

    def one(rep: int):
        return _replicate(make(spec.seed + rep), spec, rep)

    n_workers = min(worker_count(workers), spec.reps)
    if n_workers > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            results = list(pool.map(one, range(spec.reps)))
    else:
        results = [one(rep) for rep in range(spec.reps)]

    records = [r for recs, _ in results for r in recs]
    admitted = {}
    for _, adm in results:
        admitted.update(adm)
    first = make(spec.seed) if not isinstance(source, MultiplexNetwork) else source
    labels = tuple(h.label for h in spec.heuristics)
    return EvalResult(records, labels, first.names(), spec.reps, admitted)


FEATURE_SETS = ("mono", "mplx", "all")


@dataclass
class FeatureMatrix:
    feature_set: str
    feature_names: list[str]
    layers: np.ndarray
    pairs: np.ndarray
    labels: np.ndarray
    values: np.ndarray

    def to_csv(self, net: MultiplexNetwork) -> str:
        rows, cols = pair_arrays(net.n)
        names = net.names()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["layer", "node_a", "node_b", "label", *self.feature_names])
        for i in range(self.labels.size):
            j = self.pairs[i]
            w.writerow([
                names[self.layers[i]], net.node_label(rows[j]), net.node_label(cols[j]),
                int(self.labels[i]), *(f"{v:.10g}" for v in self.values[i]),
            ])
        return buf.getvalue()


def _balanced_rows(net: MultiplexNetwork, rng: np.random.Generator) -> list[tuple[int, np.ndarray, np.ndarray]]:
    rows, cols = pair_arrays(net.n)
    out = []
    for t, g in enumerate(net.layers):
        present = g.adjacency[rows, cols]
        pos = np.flatnonzero(present)
        neg = np.flatnonzero(~present)
        size = min(pos.size, neg.size)
        if pos.size > size:
            pos = np.sort(rng.choice(pos, size=size, replace=False))
        if neg.size > size:
            neg = np.sort(rng.choice(neg, size=size, replace=False))
        pairs = np.concatenate([pos, neg])
        labels = np.concatenate([np.ones(pos.size, np.int8), np.zeros(neg.size, np.int8)])
        out.append((t, pairs, labels))
    return out


def export_features(
    net: MultiplexNetwork,
    feature_set: str = "all",
    inner_heuristics: Sequence[str] = HEURISTIC_TAGS,
    balance_seed: int = 0,
    params: MonoplexHeuristic | None = None,
) -> FeatureMatrix:
    """Per-(layer, pair) examples labelled by edge presence, classes balanced.

    ``mono`` holds every monoplex heuristic at every layer; ``mplx`` holds
    CWC, CWH and CCWH under edge and degree correlations for each inner
    heuristic; ``all`` is both.
    """
    if feature_set not in FEATURE_SETS:
        raise ValueError(f"feature_set must be one of {FEATURE_SETS}")
    params = params or MonoplexHeuristic("CN")
    inner = [
        MonoplexHeuristic(tag, params.beta, params.max_walk_len, params.alpha,
                          params.rpr_tol, params.rpr_max_iter)
        for tag in (t.upper() for t in inner_heuristics)
    ]
    rng = np.random.default_rng(balance_seed)
    selection = _balanced_rows(net, rng)
    rows, cols = pair_arrays(net.n)
    names = net.names()

    mono_cols, mono_vals = [], []
    if feature_set in ("mono", "all"):
        mats = {(h.tag, l): score_matrix(g, h) for h in inner for l, g in enumerate(net.layers)}
        for h in inner:
            for l in range(net.k):
                mono_cols.append(f"{h.tag}@{names[l]}")
                mono_vals.append(mats[(h.tag, l)])

    mplx_cols: list[str] = []
    if feature_set in ("mplx", "all"):
        for kind in ("edge", "degree"):
            s = KIND_SUFFIX[kind]
            mplx_cols.append(f"CWC{s}")
            for h in inner:
                mplx_cols.append(f"CWH{s}-{h.tag}")
                mplx_cols.append(f"CCWH{s}-{h.tag}")
        edge_rows = edge_property_matrix(net).rows
        h_all = {}
        for h in inner:
            h_all[h.tag] = np.stack([min_max(score_matrix(g, h)[rows, cols]) for g in net.layers])
        configs = {kind: MplxConfig.from_network(net, kind) for kind in ("edge", "degree")}

    blocks, layers_out, pairs_out, labels_out = [], [], [], []
    for t, pairs, labels in selection:
        r, c = rows[pairs], cols[pairs]
        feats = [m[r, c] for m in mono_vals]
        if mplx_cols:
            for kind in ("edge", "degree"):
                w = layer_weights(configs[kind], t)
                e = edge_rows[:, pairs]
                feats.append(cwc_values(e, w, t))
                for h in inner:
                    hp = h_all[h.tag][:, pairs]
                    feats.append(cwh_values(hp, w, t))
                    feats.append(ccwh_values(e, hp, w, t, configs[kind].ccwh_heuristic_layer))
        blocks.append(np.column_stack(feats) if feats else np.empty((pairs.size, 0)))
        layers_out.append(np.full(pairs.size, t))
        pairs_out.append(pairs)
        labels_out.append(labels)
    return FeatureMatrix(
        feature_set,
        mono_cols + mplx_cols,
        np.concatenate(layers_out),
        np.concatenate(pairs_out),
        np.concatenate(labels_out),
        np.vstack(blocks),
    )
