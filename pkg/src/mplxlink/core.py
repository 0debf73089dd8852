"""Multiplex graph representation, pair indexing and property matrices.

Nodes are dense integers ``0..n-1`` shared by every layer. Each layer is an
undirected simple graph stored as a read-only boolean adjacency matrix.
Unordered node pairs ``{u, v}`` are addressed by a row-major upper-triangular
index, the same order produced by ``numpy.triu_indices(n, 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "LayerGraph",
    "MultiplexNetwork",
    "PropertyMatrix",
    "build_network",
    "pair_count",
    "pair_to_index",
    "index_to_pair",
    "pair_arrays",
    "edge_property_matrix",
    "degree_property_matrix",
]


def pair_count(n: int) -> int:
    return n * (n - 1) // 2


def pair_to_index(u: int, v: int, n: int) -> int:
    """Column index of the unordered pair ``{u, v}`` among ``n`` nodes."""
    if u == v:
        raise ValueError(f"pair ({u}, {v}) is a self-pair")
    if not (0 <= u < n and 0 <= v < n):
        raise ValueError(f"pair ({u}, {v}) out of range for n={n}")
    if u > v:
        u, v = v, u
    return u * n - u * (u + 1) // 2 + (v - u - 1)


def index_to_pair(j: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`pair_to_index`; returns ``(u, v)`` with ``u < v``."""
    total = pair_count(n)
    if not 0 <= j < total:
        raise ValueError(f"pair index {j} out of range for n={n}")
    # rows shrink by one each step; solve for the row containing j
    u = int(n - 2 - np.floor(np.sqrt(-8 * j + 4 * n * (n - 1) - 7) / 2.0 - 0.5))
    start = u * n - u * (u + 1) // 2
    # guard against floating point drift at row boundaries
    while start > j:
        u -= 1
        start = u * n - u * (u + 1) // 2
    while start + (n - u - 1) <= j:
        u += 1
        start = u * n - u * (u + 1) // 2
    return u, u + 1 + (j - start)


def pair_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint arrays ``(rows, cols)`` for every pair index, in index order."""
    return np.triu_indices(n, 1)


@dataclass(frozen=True, eq=False)
class LayerGraph:
    """One undirected simple graph over ``n`` nodes."""

    adjacency: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if np.any(np.diag(adj)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj = adj.copy()
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "LayerGraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            adj[u, v] = adj[v, u] = True
        return cls(adj)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = self.adjacency.sum(axis=1).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def edge_count(self) -> int:
        return int(self.degrees.sum()) // 2

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.adjacency[v]).tolist())

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u, v])

    def edges(self) -> list[tuple[int, int]]:
        rows, cols = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(rows.tolist(), cols.tolist()))

    def edge_vector(self) -> np.ndarray:
        """Edge indicators in pair-index order."""
        rows, cols = pair_arrays(self.n)
        return self.adjacency[rows, cols].astype(np.int8)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LayerGraph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self) -> int:
        return hash(self.adjacency.tobytes())


@dataclass(frozen=True, eq=False)
class MultiplexNetwork:
    """``k`` layers over one shared node set."""

    layers: tuple[LayerGraph, ...]
    layer_names: tuple[str, ...] | None = None
    node_names: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("a multiplex network needs at least one layer")
        sizes = {layer.n for layer in layers}
        if len(sizes) != 1:
            raise ValueError(f"layers disagree on node count: {sorted(sizes)}")
        object.__setattr__(self, "layers", layers)
        if self.layer_names is not None:
            names = tuple(str(s) for s in self.layer_names)
            if len(names) != len(layers):
                raise ValueError("layer_names length must equal the layer count")
            object.__setattr__(self, "layer_names", names)
        if self.node_names is not None:
            names = tuple(str(s) for s in self.node_names)
            if len(names) != layers[0].n:
                raise ValueError("node_names length must equal the node count")
            object.__setattr__(self, "node_names", names)

    @property
    def n(self) -> int:
        return self.layers[0].n

    @property
    def k(self) -> int:
        return len(self.layers)

    @property
    def edge_counts(self) -> tuple[int, ...]:
        return tuple(layer.edge_count for layer in self.layers)

    def names(self) -> tuple[str, ...]:
        if self.layer_names is not None:
            return self.layer_names
        return tuple(str(i + 1) for i in range(self.k))

    def node_label(self, v: int) -> str:
        return self.node_names[v] if self.node_names is not None else str(v)

    def adjacency_stack(self) -> np.ndarray:
        """``k x n x n`` boolean array view of all layers."""
        return np.stack([layer.adjacency for layer in self.layers])

    def with_layers(self, layers: Sequence[LayerGraph]) -> "MultiplexNetwork":
        return MultiplexNetwork(tuple(layers), self.layer_names, self.node_names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiplexNetwork):
            return NotImplemented
        return self.layers == other.layers and self.names() == other.names()

    def __hash__(self) -> int:
        return hash(self.layers)


def build_network(
    edges: Iterable[tuple[int, int, int]],
    n: int,
    k: int,
    layer_names: Sequence[str] | None = None,
    node_names: Sequence[str] | None = None,
) -> MultiplexNetwork:
    """Build a network from ``(layer, u, v)`` triples.

    Duplicate edges collapse to one; self-loops and out-of-range ids raise
    ``ValueError``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < 0:
        raise ValueError("n must be nonnegative")
    adj = np.zeros((k, n, n), dtype=bool)
    for layer, u, v in edges:
        if not 0 <= layer < k:
            raise ValueError(f"layer index {layer} out of range for k={k}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"node id out of range in edge ({u}, {v}) for n={n}")
        if u == v:
            raise ValueError(f"self-loop at node {u} in layer {layer}")
        adj[layer, u, v] = adj[layer, v, u] = True
    return MultiplexNetwork(
        tuple(LayerGraph(a) for a in adj),
        tuple(layer_names) if layer_names is not None else None,
        tuple(node_names) if node_names is not None else None,
    )


@dataclass(frozen=True)
class PropertyMatrix:
    """``k x x`` matrix of per-layer feature vectors.

    ``kind`` is ``"edge"`` (binary pair indicators, ``x = n(n-1)/2``) or
    ``"degree"`` (node degrees, ``x = n``).
    """

    kind: str
    rows: np.ndarray

    @property
    def k(self) -> int:
        return self.rows.shape[0]


def edge_property_matrix(net: MultiplexNetwork) -> PropertyMatrix:
    rows, cols = pair_arrays(net.n)
    mat = net.adjacency_stack()[:, rows, cols].astype(np.int8)
    mat.setflags(write=False)
    return PropertyMatrix("edge", mat)


def degree_property_matrix(net: MultiplexNetwork) -> PropertyMatrix:
    mat = np.stack([layer.degrees for layer in net.layers]).astype(np.int64)
    mat.setflags(write=False)
    return PropertyMatrix("degree", mat)
