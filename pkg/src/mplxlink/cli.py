"""Command-line interface: generate, correlate, predict, evaluate, export-features."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .core import MultiplexNetwork, index_to_pair
from .correlation import network_correlation
from .edgelist import RunConfig, format_edge_list, load_config, read_edge_list
from .evaluation import (
    ExperimentSpec,
    export_features,
    parse_heuristic,
    predict_topx,
    run_experiment,
    score_heuristic,
)
from .monoplex import HEURISTIC_TAGS, MonoplexHeuristic
from .mplx import MplxConfig
from .synth import SynthSpec, calibrate, generate, median_cross_correlation

log = logging.getLogger("mplxlink")

# flag dest -> RunConfig field
_CONFIG_FLAGS = (
    "nodes", "layers", "ba_m", "target_corr", "seed", "calib_samples", "calib_tol",
    "downsample_frac", "reps", "threshold_sd", "beta", "alpha", "max_walk_len",
    "zero_weight_epsilon", "ccwh_heuristic_layer",
)


class CliError(Exception):
    pass


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    overrides = {k: getattr(args, k) for k in _CONFIG_FLAGS if hasattr(args, k)}
    if getattr(args, "heuristics", None):
        overrides["heuristics"] = [h.strip() for h in args.heuristics.split(",") if h.strip()]
    return cfg.update(overrides)


def _params(cfg: RunConfig) -> MonoplexHeuristic:
    return MonoplexHeuristic(
        "CN", beta=cfg.beta, max_walk_len=cfg.max_walk_len, alpha=cfg.alpha,
        rpr_tol=cfg.rpr_tol, rpr_max_iter=cfg.rpr_max_iter,
    )


def _synth_spec(cfg: RunConfig) -> SynthSpec:
    return SynthSpec(
        n=cfg.nodes, k=cfg.layers, ba_m=cfg.ba_m, target_median_corr=cfg.target_corr,
        seed=cfg.seed, calib_samples=cfg.calib_samples, calib_tol=cfg.calib_tol,
        calib_steps=cfg.calib_steps,
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace) -> MultiplexNetwork:
    return read_edge_list(args.input, getattr(args, "node_list", None))


def _layer_index(net: MultiplexNetwork, layer: str) -> int:
    names = net.names()
    if layer in names:
        return names.index(layer)
    try:
        idx = int(layer) - 1
    except ValueError:
        idx = -1
    if not 0 <= idx < net.k:
        raise CliError(f"layer {layer!r} not found (layers: {', '.join(names)})")
    return idx


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    spec = _synth_spec(cfg)
    p_copy = calibrate(spec) if spec.k > 1 else 0.0
    net = generate(spec, p_copy=p_copy)
    _emit(format_edge_list(net), args.output)
    stats = [f"n={net.n}", f"k={net.k}", "edges=" + ",".join(str(m) for m in net.edge_counts)]
    if net.k > 1:
        stats.append(f"p_copy={p_copy:.6f}")
        stats.append(f"median_corr={median_cross_correlation(net):.4f}")
    print(" ".join(stats), file=sys.stdout if args.output else sys.stderr)
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    net = _load(args)
    corr = network_correlation(net, args.kind, args.metric)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    names = list(net.names())
    w.writerow(["layer", *names])
    for name, row in zip(names, corr.entries):
        w.writerow([name, *(f"{v:.10f}" for v in row)])
    _emit(buf.getvalue(), args.output)
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    net = _load(args)
    target = _layer_index(net, args.layer)
    try:
        spec = parse_heuristic(args.heuristic)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    if args.top < 0:
        raise CliError("--top must be nonnegative")
    configs = {}
    if spec.family != "MONO":
        configs[spec.kind] = MplxConfig.from_network(
            net, spec.kind, threshold_sd=cfg.threshold_sd,
            zero_weight_epsilon=cfg.zero_weight_epsilon,
            ccwh_heuristic_layer=cfg.ccwh_heuristic_layer,
        )
    table = score_heuristic(net, target, spec, configs, _params(cfg))
    chosen = predict_topx(table, args.top)
    lookup = dict(zip(table.pairs.tolist(), table.raw.tolist()))
    lines = []
    for j in chosen.tolist():
        u, v = index_to_pair(j, net.n)
        lines.append(f"{net.node_label(u)} {net.node_label(v)} {lookup[j]:.10g}")
    _emit("".join(line + "\n" for line in lines), args.output)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    spec = ExperimentSpec(
        tuple(parse_heuristic(h) for h in cfg.heuristics),
        downsample_frac=cfg.downsample_frac, reps=cfg.reps,
        threshold_sd=cfg.threshold_sd, seed=cfg.seed, params=_params(cfg),
        zero_weight_epsilon=cfg.zero_weight_epsilon,
        ccwh_heuristic_layer=cfg.ccwh_heuristic_layer,
    )
    source = _load(args) if args.input else _synth_spec(cfg)
    result = run_experiment(source, spec, workers=args.threads)
    _emit(result.to_csv(), args.output)
    return 0


def cmd_export_features(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    net = _load(args)
    inner = [t.strip().upper() for t in args.inner.split(",")] if args.inner else list(HEURISTIC_TAGS)
    fm = export_features(net, args.set, inner, balance_seed=cfg.seed, params=_params(cfg))
    _emit(fm.to_csv(net), args.output)
    return 0


def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--config", help="YAML file of configuration keys")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    if seed:
        p.add_argument("--seed", type=int)


def _add_heuristic_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float, help="Katz damping factor")
    p.add_argument("--max-walk-len", dest="max_walk_len", type=int)
    p.add_argument("--alpha", type=float, help="rooted PageRank continue probability")
    p.add_argument("--threshold-sd", dest="threshold_sd", type=float,
                   help="admit only layers whose overlap beats the random-graph mean by this many SDs")
    p.add_argument("--zero-weight-epsilon", dest="zero_weight_epsilon", type=float)
    p.add_argument("--ccwh-heuristic-layer", dest="ccwh_heuristic_layer", choices=("target", "other"))


def _add_synth(p: argparse.ArgumentParser) -> None:
    p.add_argument("--nodes", type=int)
    p.add_argument("--layers", type=int)
    p.add_argument("--ba-m", dest="ba_m", type=int)
    p.add_argument("--target-corr", dest="target_corr", type=float)
    p.add_argument("--calib-samples", dest="calib_samples", type=int)
    p.add_argument("--calib-tol", dest="calib_tol", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mplxlink", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic multiplex network")
    _add_common(p)
    _add_synth(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("correlate", help="cross-layer correlation matrix as CSV")
    p.add_argument("input")
    p.add_argument("--kind", choices=("edge", "degree"), default="edge")
    p.add_argument("--metric", choices=("pearson", "spearman"),
                   help="defaults to pearson for edge, spearman for degree")
    p.add_argument("--node-list", dest="node_list")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("predict", help="rank candidate links at one layer")
    p.add_argument("input")
    p.add_argument("--layer", required=True, help="layer name, or 1-based position")
    p.add_argument("--heuristic", required=True,
                   help="cn|jc|ra|aa|pa|pcc|ks|rpr, cwc-e|cwc-d, cwh-<h>-e|d, ccwh-<h>-e|d")
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--node-list", dest="node_list")
    _add_common(p, seed=False)
    _add_heuristic_params(p)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="downsample-and-recover accuracy")
    p.add_argument("input", nargs="?", help="edge-list file; omit to use synthetic networks")
    p.add_argument("--heuristics", help="comma-separated heuristic names")
    p.add_argument("--reps", type=int)
    p.add_argument("--downsample", dest="downsample_frac", type=float)
    p.add_argument("--threads", type=int, help="worker cap (default: MPLX_THREADS, 0 = auto)")
    p.add_argument("--node-list", dest="node_list")
    _add_common(p)
    _add_synth(p)
    _add_heuristic_params(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("export-features", help="balanced feature matrix as CSV")
    p.add_argument("input")
    p.add_argument("--set", choices=("mono", "mplx", "all"), default="all")
    p.add_argument("--inner", help="comma-separated inner heuristics (default: all eight)")
    p.add_argument("--node-list", dest="node_list")
    _add_common(p)
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_export_features)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="mplxlink: %(levelname)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CliError, ValueError, KeyError, RuntimeError, OSError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"mplxlink: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
