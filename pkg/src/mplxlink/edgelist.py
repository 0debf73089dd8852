"""Multiplex edge-list files and run configuration files.

Edge-list lines are ``layer node_a node_b [weight]`` separated by
whitespace; ``#`` starts a comment line. Layer and node ids are arbitrary
strings, mapped to dense indices in order of first appearance (or in the
order of an optional node-list file).
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, TextIO

import yaml

from .core import MultiplexNetwork, build_network

__all__ = [
    "ParseError",
    "ConfigError",
    "parse_edge_list",
    "read_edge_list",
    "format_edge_list",
    "write_edge_list",
    "read_node_list",
    "figure1_network",
    "RunConfig",
    "load_config",
]

log = logging.getLogger(__name__)


class ParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ConfigError(ValueError):
    pass


def parse_edge_list(
    lines: Iterable[str], node_order: list[str] | None = None
) -> MultiplexNetwork:
    layer_ids: dict[str, int] = {}
    node_ids: dict[str, int] = {}
    if node_order is not None:
        node_ids = {name: i for i, name in enumerate(node_order)}
    edges = []
    warned = False
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        parts = text.split()
        if len(parts) not in (3, 4):
            raise ParseError(lineno, f"expected 'layer node_a node_b [weight]', got {len(parts)} fields")
        layer, a, b = parts[:3]
        if len(parts) == 4:
            try:
                float(parts[3])
            except ValueError:
                raise ParseError(lineno, f"weight {parts[3]!r} is not a number") from None
            if not warned:
                log.warning("edge weights are ignored; graphs are treated as unweighted")
                warned = True
        if a == b:
            raise ParseError(lineno, f"self-loop on node {a!r}")
        for name in (a, b):
            if name not in node_ids:
                if node_order is not None:
                    raise ParseError(lineno, f"node {name!r} missing from the node list")
                node_ids[name] = len(node_ids)
        lid = layer_ids.setdefault(layer, len(layer_ids))
        edges.append((lid, node_ids[a], node_ids[b]))
    if not layer_ids:
        raise ParseError(0, "no edges found")
    return build_network(edges, len(node_ids), len(layer_ids), list(layer_ids), list(node_ids))


def read_node_list(path: str | Path) -> list[str]:
    names = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if text and not text.startswith("#"):
                names.append(text.split()[0])
    return names


def read_edge_list(path: str | Path, node_list: str | Path | None = None) -> MultiplexNetwork:
    order = read_node_list(node_list) if node_list is not None else None
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, order)


def format_edge_list(net: MultiplexNetwork) -> str:
    """Edge-list text; every layer gets at least a header comment."""
    out = [f"# n={net.n} k={net.k}"]
    for name, g in zip(net.names(), net.layers):
        out.append(f"# layer {name}: {g.edge_count} edges")
        for u, v in g.edges():
            out.append(f"{name} {net.node_label(u)} {net.node_label(v)}")
    return "\n".join(out) + "\n"


def write_edge_list(net: MultiplexNetwork, dest: str | Path | TextIO) -> None:
    text = format_edge_list(net)
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        Path(dest).write_text(text, encoding="utf-8")


def figure1_network() -> MultiplexNetwork:
    """The three-layer, nine-node example network bundled with the package."""
    text = resources.files("mplxlink").joinpath("data/figure1.txt").read_text(encoding="utf-8")
    return parse_edge_list(text.splitlines())


@dataclass
class RunConfig:
    """Every tunable shared by the CLI commands. Flags override file values."""

    nodes: int = 100
    layers: int = 10
    ba_m: int = 3
    target_corr: float = 0.5
    seed: int = 0
    calib_samples: int = 10
    calib_tol: float = 0.05
    calib_steps: int = 20
    downsample_frac: float = 0.25
    reps: int = 10
    heuristics: list[str] = dataclasses.field(default_factory=lambda: ["cn", "cwc-e", "cwh-cn-e", "ccwh-cn-e"])
    threshold_sd: float | None = None
    beta: float = 0.05
    max_walk_len: int = 5
    alpha: float = 0.85
    rpr_tol: float = 1e-8
    rpr_max_iter: int = 10_000
    zero_weight_epsilon: float = 0.0
    ccwh_heuristic_layer: str = "target"

    def update(self, values: dict[str, Any]) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(self)}
        for key, value in values.items():
            norm = key.replace("-", "_")
            if norm not in known:
                raise ConfigError(f"unknown configuration key {key!r}")
            if value is not None:
                setattr(self, norm, value)
        return self


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a YAML mapping of configuration keys."""
    with open(path, encoding="utf-8") as fh:
        data = yaml.safe_load(fh) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: configuration must be a key-value mapping")
    RunConfig().update(data)
    return data
