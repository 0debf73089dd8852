"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import math
import time
from itertools import combinations

import numpy as np
import pytest
import scipy.stats

import oracles
from mplxlink.cli import main
from mplxlink.core import LayerGraph, MultiplexNetwork, edge_property_matrix, pair_count, pair_to_index
from mplxlink.correlation import (
    CorrelationMatrix,
    er_first_moment,
    er_second_cross_moment,
    network_correlation,
    overlap_stats,
)
from mplxlink.evaluation import ExperimentSpec, parse_heuristic, run_experiment
from mplxlink.monoplex import HEURISTIC_TAGS, MonoplexHeuristic, score_matrix
from mplxlink.mplx import MplxConfig, candidate_pairs, cwc, normalized_layer_scores, score_pairs
from mplxlink.synth import SynthSpec, ba_layer, calibrate, couple_layers, generate, median_cross_correlation

DRAWS = 100_000


def report(number, ok, detail):
    print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


# 1 ------------------------------------------------------------------------


def test_criterion_1_closed_forms():
    t0 = time.perf_counter()
    failures = []
    for n, mi, mj in [(6, 5, 7), (10, 12, 20), (10, 15, 15)]:
        rng = np.random.default_rng([n, mi, mj, 1])
        A = oracles.sample_gnm_batch(rng, n, mi, DRAWS).astype(np.float64)
        B = oracles.sample_gnm_batch(rng, n, mj, DRAWS).astype(np.float64)
        oe = (A * B).sum(axis=1) / math.sqrt(mi * mj)
        stats = overlap_stats(n, mi, mj)
        checks = {
            "E[p_i]": (A[:, 0], er_first_moment(n, mi)),
            "E[p_j]": (B[:, -1], er_first_moment(n, mj)),
            "E[p_i p_j] (m_i)": (A[:, 0] * A[:, 1], er_second_cross_moment(n, mi)),
            "E[p_i p_j] (m_j)": (B[:, 2] * B[:, -1], er_second_cross_moment(n, mj)),
            "E[OE]": (oe, stats.mean),
            "E[OE^2]": (oe ** 2, stats.second_moment),
        }
        for name, (samples, expected) in checks.items():
            ok, est, se = oracles.within_se(samples, expected)
            if not ok:
                failures.append(f"{name} at {(n, mi, mj)}: {est:.5f} vs {expected:.5f} (se {se:.5f})")
    worst = 0.0
    for n in range(3, 13):
        N = pair_count(n)
        for mi in range(1, N + 1):
            for mj in range(1, N + 1):
                s = overlap_stats(n, mi, mj)
                worst = max(worst, abs(s.variance - (s.second_moment - s.mean ** 2)))
    if worst > 1e-12:
        failures.append(f"variance identity off by {worst:.2e}")
    elapsed = time.perf_counter() - t0
    if elapsed > 120:
        failures.append(f"runtime {elapsed:.0f}s")
    report(1, not failures, "; ".join(failures) or
           f"18 Monte Carlo moments within 3 SE, identity max error {worst:.1e}, {elapsed:.1f}s")


# 2 ------------------------------------------------------------------------


def test_criterion_2_worked_examples(fig1, node):
    C = network_correlation(fig1, "edge")
    c21, c23 = C[1, 0], C[1, 2]
    j = pair_to_index(node["X"], node["V"], 9)
    z = 1 + abs(c21) + abs(c23)
    P = edge_property_matrix(fig1)
    present = P.rows[:, j].tolist()
    got_cwc = cwc(fig1, P, MplxConfig(C), 1, j).value
    expected_cwc = c21 / z
    ok_cwc = present == [1, 0, 0] and c23 > 0 and abs(got_cwc - expected_cwc) <= 1e-12

    # CN(X, V) by hand: layer 1 none, layer 2 {U}, layer 3 none
    raw = [0, 1, 0]
    cand = candidate_pairs(fig1, 1)
    lo_hi = []
    for g in fig1.layers:
        nb = oracles.neighbor_sets(9, g.edges())
        vals = [oracles.cn(nb, *divmod_pair(p)) for p in cand]
        lo_hi.append((min(vals), max(vals)))
    h = [(r - lo) / (hi - lo) for r, (lo, hi) in zip(raw, lo_hi)]
    expected_cwh = (h[0] * c21 + h[1] + h[2] * c23) / z
    all_cwh = score_pairs(fig1, MplxConfig(C), 1, "CWH", cand, "CN")
    got_cwh = all_cwh[np.searchsorted(cand, j)]
    ok_cwh = abs(got_cwh - expected_cwh) <= 1e-12
    report(2, ok_cwc and ok_cwh,
           f"CWC(X,V)={got_cwc:.12f} vs c21/Z={expected_cwc:.12f}; "
           f"CWH-CN(X,V)={got_cwh:.12f} vs hand {expected_cwh:.12f}")


def divmod_pair(j, n=9):
    r, c = np.triu_indices(n, 1)
    return int(r[j]), int(c[j])


# 3 ------------------------------------------------------------------------


def test_criterion_3_correlation_sweep():
    t0 = time.perf_counter()
    heuristics = tuple(parse_heuristic(h) for h in ("cn", "cwc-e", "ccwh-cn-e"))
    targets = (0.1, 0.3, 0.5, 0.7, 0.9)
    acc = {}
    for target in targets:
        synth = SynthSpec(n=50, k=8, ba_m=3, target_median_corr=target, seed=0)
        res = run_experiment(synth, ExperimentSpec(heuristics, reps=20, seed=0))
        acc[target] = {label: res.mean_accuracy(label) for label in res.labels}
    elapsed = time.perf_counter() - t0
    gap = acc[0.9]["CWCe"] - acc[0.9]["CN"]
    rho = scipy.stats.spearmanr(targets, [acc[t]["CWCe"] for t in targets])[0]
    ccwh_ok = all(acc[t]["CCWHe-CN"] > acc[t]["CN"] for t in targets if t >= 0.5)
    table = ", ".join(
        f"{t}: CN {a['CN']:.3f} CWCe {a['CWCe']:.3f} CCWHe-CN {a['CCWHe-CN']:.3f}"
        for t, a in acc.items()
    )
    report(3, gap >= 0.15 and rho >= 0.9 and ccwh_ok and elapsed <= 900,
           f"(a) gap {gap:.3f} (b) spearman {rho:.3f} (c) {ccwh_ok}; {elapsed:.0f}s; {table}")


# 4 ------------------------------------------------------------------------


def test_criterion_4_duplicated_layer():
    def twin(seed):
        g = ba_layer(50, 3, np.random.default_rng(seed))
        return MultiplexNetwork((g, g))

    names = [t.lower() for t in HEURISTIC_TAGS] + ["cwc-e"]
    spec = ExperimentSpec(tuple(parse_heuristic(h) for h in names), reps=20, seed=0,
                          downsample_frac=0.25)
    res = run_experiment(twin, spec)
    problems, summary = [], []
    for layer in (0, 1):
        cwc_acc = res.layer_mean("CWCe", layer)
        best = max(res.layer_mean(t, layer) for t in HEURISTIC_TAGS)
        summary.append(f"layer {layer + 1}: CWC {cwc_acc:.3f}, best monoplex {best:.3f}")
        if cwc_acc < 0.6 or cwc_acc <= best:
            problems.append(f"layer {layer + 1}")
    report(4, not problems, "; ".join(summary))


# 5 ------------------------------------------------------------------------


def test_criterion_5_monoplex_oracles():
    rng = np.random.default_rng(555)
    params = dict(beta=0.1, max_walk_len=4, alpha=0.85, rpr_tol=1e-13, rpr_max_iter=100_000)
    oracle = {
        "CN": lambda nb, n, u, v: oracles.cn(nb, u, v),
        "JC": lambda nb, n, u, v: oracles.jc(nb, u, v),
        "RA": lambda nb, n, u, v: oracles.ra(nb, u, v),
        "AA": lambda nb, n, u, v: oracles.aa(nb, u, v),
        "PA": lambda nb, n, u, v: oracles.pa(nb, u, v),
        "PCC": lambda nb, n, u, v: oracles.pcc(nb, u, v),
        "KS": lambda nb, n, u, v: oracles.katz(nb, u, v, params["beta"], params["max_walk_len"]),
        "RPR": lambda nb, n, u, v: oracles.rpr(nb, n, u, v, params["alpha"]),
    }
    worst = {tag: 0.0 for tag in HEURISTIC_TAGS}
    for _ in range(50):
        n = int(rng.integers(2, 9))
        edges = oracles.random_edges(rng, n, float(rng.uniform(0.1, 0.9)))
        g = LayerGraph.from_edges(n, edges)
        nb = oracles.neighbor_sets(n, edges)
        for tag in HEURISTIC_TAGS:
            S = score_matrix(g, MonoplexHeuristic(tag, **params))
            for u, v in combinations(range(n), 2):
                worst[tag] = max(worst[tag], abs(S[u, v] - oracle[tag](nb, n, u, v)))
    bad = [t for t, w in worst.items() if w > 1e-10]
    report(5, not bad, "max abs error " + ", ".join(f"{t} {w:.1e}" for t, w in worst.items()))


# 6 ------------------------------------------------------------------------


def test_criterion_6_range_and_collapse():
    rng = np.random.default_rng(666)
    lo, hi = np.inf, -np.inf
    for _ in range(100):
        n, k = int(rng.integers(4, 12)), int(rng.integers(1, 5))
        layers = tuple(
            LayerGraph.from_edges(n, oracles.random_edges(rng, n, float(rng.uniform(0.05, 0.8))))
            for _ in range(k)
        )
        net = MultiplexNetwork(layers)
        kind = "edge" if rng.random() < 0.5 else "degree"
        cfg = MplxConfig(network_correlation(net, kind),
                         ccwh_heuristic_layer=str(rng.choice(["target", "other"])))
        inner = str(rng.choice(HEURISTIC_TAGS))
        t = int(rng.integers(k))
        pairs = candidate_pairs(net, t)
        if pairs.size == 0:
            continue
        for family in ("CWC", "CWH", "CCWH"):
            vals = score_pairs(net, cfg, t, family, pairs, inner)
            lo, hi = min(lo, vals.min()), max(hi, vals.max())
    range_ok = lo >= 0.0 and hi <= 1.0 + 1e-12

    collapse_ok = True
    for seed in range(20):
        r = np.random.default_rng([seed, 6])
        n = int(r.integers(4, 12))
        net = MultiplexNetwork((LayerGraph.from_edges(n, oracles.random_edges(r, n, 0.4)),))
        cfg = MplxConfig(CorrelationMatrix(np.ones((1, 1)), "pearson", "edge"))
        pairs = candidate_pairs(net, 0)
        if pairs.size == 0:
            continue
        for inner in HEURISTIC_TAGS:
            h = normalized_layer_scores(net, MonoplexHeuristic(inner), pairs)[0]
            collapse_ok &= np.array_equal(score_pairs(net, cfg, 0, "CWH", pairs, inner), h)
            collapse_ok &= np.array_equal(score_pairs(net, cfg, 0, "CCWH", pairs, inner), h)
        collapse_ok &= not score_pairs(net, cfg, 0, "CWC", pairs).any()
    report(6, range_ok and collapse_ok,
           f"observed range [{lo:.4f}, {hi:.4f}]; k=1 collapse exact: {bool(collapse_ok)}")


# 7 ------------------------------------------------------------------------


@pytest.mark.parametrize("target", [0.3, 0.6, 0.9])
def test_criterion_7_calibration(target):
    t0 = time.perf_counter()
    spec = SynthSpec(n=100, k=10, ba_m=3, target_median_corr=target, seed=11)
    p = calibrate(spec)
    net = generate(spec, p_copy=p)
    achieved = median_cross_correlation(net)
    again = generate(spec)
    elapsed = time.perf_counter() - t0
    ok = abs(achieved - target) <= 0.05 and again == net and elapsed <= 300
    report(7, ok, f"target {target}: p_copy {p:.4f}, achieved {achieved:.4f}, "
                  f"reproducible {again == net}, {elapsed:.1f}s")


# 8 ------------------------------------------------------------------------


def test_criterion_8_cli_determinism(tmp_path, capsys):
    net_file = tmp_path / "net.txt"
    commands = {
        "generate": ["generate", "--nodes", "40", "--layers", "4", "--target-corr", "0.5",
                     "--seed", "8"],
        "evaluate": ["evaluate", "--nodes", "30", "--layers", "3", "--ba-m", "2", "--reps", "3",
                     "--heuristics", "cn,cwc-e,cwh-ra-d,ccwh-ks-e", "--seed", "8"],
        "export-features": ["export-features", str(net_file), "--seed", "8"],
    }
    assert main(["generate", "--nodes", "20", "--layers", "3", "--ba-m", "2", "-o", str(net_file)]) == 0
    identical = {}
    for name, argv in commands.items():
        outs = []
        for run in ("a", "b"):
            path = tmp_path / f"{name}-{run}.out"
            assert main(argv + ["-o", str(path)]) == 0
            outs.append(path.read_bytes())
        identical[name] = outs[0] == outs[1] and len(outs[0]) > 0
    capsys.readouterr()
    with capsys.disabled():
        report(8, all(identical.values()), ", ".join(f"{k} {v}" for k, v in identical.items()))


# 9 ------------------------------------------------------------------------


def test_criterion_9_threshold():
    n, coupled, noise, seeds = 100, 5, 5, 20
    p_copy = calibrate(SynthSpec(n=n, k=coupled, ba_m=3, target_median_corr=0.5, seed=0))

    def make(seed):
        rng = np.random.default_rng(seed)
        layers = [ba_layer(n, 3, rng) for _ in range(coupled + noise)]
        head = couple_layers(layers[:coupled], p_copy, rng)
        return MultiplexNetwork(head.layers + tuple(layers[coupled:]))

    cwc = (parse_heuristic("cwc-e"),)
    with_t = run_experiment(make, ExperimentSpec(cwc, reps=seeds, seed=0, threshold_sd=2.0))
    without = run_experiment(make, ExperimentSpec(cwc, reps=seeds, seed=0))

    excluded = np.zeros((coupled, noise))
    clean_seeds = 0
    for rep in range(seeds):
        clean = True
        for t in range(coupled):
            adm = with_t.admitted[(rep, t)]
            for j in range(noise):
                out = (coupled + j) not in adm
                excluded[t, j] += out
                clean &= out
        clean_seeds += clean
    freq = excluded / seeds

    def coupled_mean(res):
        return float(np.mean([r.accuracy for r in res.records if r.layer < coupled]))

    acc_t, acc_0 = coupled_mean(with_t), coupled_mean(without)
    ok = freq.min() >= 0.9 and acc_t >= acc_0 - 0.02
    report(9, ok,
           f"min per-(target, noise layer) exclusion rate {freq.min():.2f} "
           f"(mean {freq.mean():.3f}, seeds with every noise layer excluded {clean_seeds}/{seeds}); "
           f"CWC accuracy on coupled layers {acc_t:.4f} with vs {acc_0:.4f} without")
