"""Acceptance suite.

One test per criterion, each printing a PASS line (run with -s to watch).
The published face-verification numbers need the real simulator+model stack
and are out of reach here; these tests reproduce the qualitative claims on
analytic systems under test where exact or statistical verification is
possible.
"""
import json
import math
import os
import time

import numpy as np

from simadv import (
    BaselineConfig,
    BuiltinSut,
    ParameterDomain,
    RegionGridSpec,
    SearchConfig,
    brute_force_region,
    flood_region,
    from_params,
    grid_landscape,
    run_random_opt,
    run_search,
    run_uniform,
)
from simadv.cli import main as cli_main
from simadv.regions import component_containing
from simadv.search import GaussianPolicy, update_policy

from conftest import scalar_basin


def _ok(n, name):
    print(f"\nACCEPTANCE {n} {name}: PASS")


# -- 1. REINFORCE estimator correctness --------------------------------------

MU = np.array([0.3, -0.2, 0.1, 0.0])
C = np.array([-0.5, 0.4, 0.2, -0.1])
VARIANCE = 0.05
K = 10_000


def _estimator_setup(seed):
    rng = np.random.default_rng(seed)
    raw = rng.normal(MU, math.sqrt(VARIANCE), size=(K, 4))
    rewards = -np.sum((raw - C) ** 2, axis=1)
    return raw, rewards


def test_criterion_1_reinforce_estimator_matches_closed_form():
    t0 = time.monotonic()
    raw, rewards = _estimator_setup(seed=0)
    policy = GaussianPolicy(MU, VARIANCE)
    # the artifact's own first-iteration update: baseline = batch mean
    baseline = float(rewards.mean())
    updated, _ = update_policy(policy, raw, rewards, baseline,
                               learning_rate=1.0)
    direction = updated.mean - MU
    closed_form = -2.0 * (MU - C)  # gradient of E[-|rho - c|^2] wrt the mean
    rel_err = np.linalg.norm(direction - closed_form) / np.linalg.norm(closed_form)
    elapsed = time.monotonic() - t0
    assert rel_err < 0.05, f"relative error {rel_err:.4f}"
    assert elapsed < 5.0, f"took {elapsed:.2f}s"
    _ok(1, f"REINFORCE estimator (rel err {rel_err:.3%}, {elapsed:.2f}s)")


# -- 2. baseline invariance ---------------------------------------------------


def test_criterion_2_baseline_changes_variance_not_mean():
    raw, rewards = _estimator_setup(seed=0)
    policy = GaussianPolicy(MU, VARIANCE)
    baseline = float(rewards.mean())  # the EMA's first value
    with_baseline, _ = update_policy(policy, raw, rewards, baseline,
                                     learning_rate=1.0)
    without, _ = update_policy(policy, raw, rewards, 0.0, learning_rate=1.0)
    diff = np.abs(without.mean - with_baseline.mean)
    # difference is baseline * mean(z)/variance with z ~ N(0, variance I):
    # per-coordinate standard error |baseline| / (sigma sqrt(K))
    se = abs(baseline) / (math.sqrt(VARIANCE) * math.sqrt(K))
    assert np.all(diff <= 3.0 * se), f"diff {diff} vs 3*SE {3 * se:.5f}"
    _ok(2, f"baseline invariance (max diff {diff.max() / se:.2f} SE)")


# -- 3. flood fill equals the exhaustive oracle -------------------------------


def _region_cases():
    rng = np.random.default_rng(2024)

    def rand(lo, hi):
        return float(rng.uniform(lo, hi))

    cases = []
    # basin, n=2, spacing 0.1
    center = [rand(-0.5, 0.5), rand(-0.5, 0.5)]
    amp = rand(0.9, 1.2)
    cases.append(("basin-2d", ParameterDomain([(-1.5, 1.5)] * 2),
                  from_params("basin", {"amplitude": amp, "center": center,
                                        "scale": rand(0.25, 0.35)}, dims=2),
                  0.7 * amp, np.array(center), 0.1))
    # basin, n=3, spacing 0.05
    center = [rand(-0.4, 0.4) for _ in range(3)]
    amp = rand(0.9, 1.2)
    cases.append(("basin-3d", ParameterDomain([(-1.0, 1.0)] * 3),
                  from_params("basin", {"amplitude": amp, "center": center,
                                        "scale": rand(0.2, 0.3)}, dims=3),
                  0.75 * amp, np.array(center), 0.05))
    # ridge, n=2, spacing 0.05: seeded on the hyperplane
    direction = [1.0, rand(-0.6, 0.6)]
    offset = rand(-0.2, 0.2)
    amp = rand(0.9, 1.2)
    norm2 = sum(u * u for u in direction)
    seed_point = np.array([u * offset / norm2 for u in direction])
    cases.append(("ridge-2d", ParameterDomain([(-1.5, 1.5)] * 2),
                  from_params("ridge", {"amplitude": amp,
                                        "direction": direction,
                                        "offset": offset,
                                        "scale": rand(0.06, 0.1)}, dims=2),
                  0.75 * amp, seed_point, 0.05))
    # ridge, n=3, spacing 0.1
    direction = [1.0, rand(-0.5, 0.5), rand(-0.5, 0.5)]
    offset = rand(-0.2, 0.2)
    amp = rand(0.9, 1.2)
    norm2 = sum(u * u for u in direction)
    seed_point = np.array([u * offset / norm2 for u in direction])
    cases.append(("ridge-3d", ParameterDomain([(-1.0, 1.0)] * 3),
                  from_params("ridge", {"amplitude": amp,
                                        "direction": direction,
                                        "offset": offset,
                                        "scale": rand(0.08, 0.12)}, dims=3),
                  0.8 * amp, seed_point, 0.1))
    # multi-basin, n=2, spacing 0.1: flood from the first basin only
    c1 = [rand(-1.0, -0.6), rand(-1.0, -0.6)]
    c2 = [rand(0.6, 1.0), rand(0.6, 1.0)]
    cases.append(("multi-2d", ParameterDomain([(-1.5, 1.5)] * 2),
                  from_params("multi_basin", {"basins": [
                      {"amplitude": 1.0, "center": c1, "scale": rand(0.2, 0.3)},
                      {"amplitude": 1.0, "center": c2, "scale": rand(0.2, 0.3)},
                  ]}, dims=2), 0.7, np.array(c1), 0.1))
    # multi-basin, n=3, spacing 0.05
    c1 = [rand(-0.7, -0.5) for _ in range(3)]
    c2 = [rand(0.5, 0.7) for _ in range(3)]
    cases.append(("multi-3d", ParameterDomain([(-1.0, 1.0)] * 3),
                  from_params("multi_basin", {"basins": [
                      {"amplitude": 1.0, "center": c1, "scale": rand(0.15, 0.2)},
                      {"amplitude": 1.0, "center": c2, "scale": rand(0.15, 0.2)},
                  ]}, dims=3), 0.75, np.array(c1), 0.05))
    return cases


def test_criterion_3_flood_equals_brute_force_component():
    for name, domain, landscape, threshold, seed_point, spacing in _region_cases():
        t0 = time.monotonic()
        sut = BuiltinSut(landscape)
        spec = RegionGridSpec(spacing, seed_point, domain, cap=500_000)
        region = flood_region(sut, spec, threshold)
        assert not region.truncated, name
        components = brute_force_region(sut, spec, threshold)
        comp = component_containing(components, region.seed_coord)
        assert comp is not None, name
        assert region.coords() == set(comp), name
        elapsed = time.monotonic() - t0
        assert elapsed < 30.0, f"{name} took {elapsed:.1f}s"
        print(f"\n  {name}: |region|={len(region)}, "
              f"components={len(components)}, {elapsed:.2f}s")
    _ok(3, "flood fill == brute-force component (6 randomized cases)")


# -- 4. sample-efficiency ordering at equal budget ----------------------------

HIDDEN_DOMAIN = ParameterDomain([(-5.0, 5.0), (-5.0, 5.0)])
HIDDEN_PARAMS = {"basins": [
    {"amplitude": 0.85, "center": [0.8, -0.6], "scale": 2.0},
    {"amplitude": 1.0, "center": [0.8, -0.6], "scale": 0.05},
]}
HIDDEN_THRESHOLD = 0.9
BUDGET = 1600
RUNS = 100


def _hidden_sut():
    return BuiltinSut(from_params("multi_basin", HIDDEN_PARAMS, dims=2))


def _quadrature_fraction(sut, domain, threshold, nodes=4001):
    xs = np.linspace(domain.lower[0], domain.upper[0], nodes)
    ys = np.linspace(domain.lower[1], domain.upper[1], nodes)
    hits = 0
    for chunk in np.array_split(xs, 40):
        X, Y = np.meshgrid(chunk, ys, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        hits += int(np.sum(sut.loss_batch(pts) > threshold))
    return hits / (nodes * nodes)


def test_criterion_4_method_ordering_at_equal_budget():
    t0 = time.monotonic()
    sut = _hidden_sut()
    phi = _quadrature_fraction(sut, HIDDEN_DOMAIN, HIDDEN_THRESHOLD)
    assert 0.0 < phi <= 0.01, f"adversarial volume fraction {phi:.2e}"

    from simadv.report import bench_compare
    table = bench_compare(
        sut, HIDDEN_DOMAIN,
        methods=[
            {"method": "adv-testing", "batch_size": 8, "learning_rate": 1.0,
             "variance": 0.05, "baseline_decay": 0.9,
             "init_mode": "uniform-random"},
            {"method": "random-opt"},
            {"method": "uniform"},
            {"method": "gaussian"},
        ],
        runs_per_method=RUNS, budget=BUDGET, threshold=HIDDEN_THRESHOLD,
        master_seed=2026,
    )
    by_tag = {row.method_tag: row for row in table.rows}
    adv = by_tag["adv-testing"].successes
    ro = by_tag["random-opt"].successes
    uni = by_tag["uniform"].successes
    assert adv > ro >= uni, f"adv={adv} ro={ro} uniform={uni}"

    # one-sided two-proportion z-test at the 95% level
    p_adv, p_uni = adv / RUNS, uni / RUNS
    pooled = (adv + uni) / (2 * RUNS)
    z = (p_adv - p_uni) / math.sqrt(pooled * (1 - pooled) * 2 / RUNS)
    assert z > 1.645, f"z={z:.2f}"

    elapsed = time.monotonic() - t0
    assert elapsed < 300.0, f"took {elapsed:.0f}s"
    _ok(4, f"ordering adv({adv}) > random-opt({ro}) >= uniform({uni}), "
           f"phi={phi:.2e}, z={z:.1f}, {elapsed:.0f}s")


# -- 5. uniform baseline calibration ------------------------------------------


def test_criterion_5_uniform_success_rate_calibrated():
    domain = ParameterDomain([(-2.0, 2.0), (-2.0, 2.0)])
    sut = BuiltinSut(from_params("basin", {"amplitude": 1.0,
                                           "center": [0.0, 0.0],
                                           "scale": 0.2}, dims=2))
    threshold = 0.7
    phi = _quadrature_fraction(sut, domain, threshold, nodes=2001)
    budget = 124
    expected = 1.0 - (1.0 - phi) ** budget
    wins = 0
    for s in range(1000):
        cfg = BaselineConfig("uniform", budget=budget, threshold=threshold,
                             seed=s)
        wins += run_uniform(sut, domain, cfg, keep_trajectory=False).found
    rate = wins / 1000
    assert abs(rate - expected) < 0.03, f"rate {rate:.3f} vs {expected:.3f}"
    _ok(5, f"uniform calibration (empirical {rate:.3f}, analytic {expected:.3f})")


# -- 6. termination soundness and byte-level determinism -----------------------


def test_criterion_6a_found_records_reevaluate_above_threshold():
    domain = ParameterDomain([(-2.0, 2.0), (-2.0, 2.0)])
    sut = BuiltinSut(from_params("basin", {"amplitude": 1.0,
                                           "center": [0.3, -0.4],
                                           "scale": 0.3}, dims=2))
    threshold = 0.9
    checked = 0
    for seed in range(20):
        outcome = run_search(sut, domain, SearchConfig(
            threshold=threshold, seed=seed, learning_rate=0.1,
            init_mode="domain-center"), keep_trajectory=False)
        if outcome.found:
            assert sut.loss(np.array(outcome.record.params)) > threshold
            checked += 1
        ro = run_random_opt(sut, domain, BaselineConfig(
            "random-opt", budget=800, threshold=threshold, seed=seed),
            keep_trajectory=False)
        if ro.found:
            assert sut.loss(np.array(ro.record.params)) > threshold
            checked += 1
    assert checked >= 20
    _ok("6a", f"termination soundness ({checked} found records re-checked)")


def test_criterion_6b_every_subcommand_byte_identical(tmp_path):
    base = {
        "domain": [{"name": "x0", "lower": -2.0, "upper": 2.0},
                   {"name": "x1", "lower": -2.0, "upper": 2.0}],
        "sut": {"builtin": {"landscape": "basin", "params": {
            "amplitude": 1.0, "center": [0.3, -0.4], "scale": 0.3}}},
        "threshold": 0.9,
        "seed": 5,
    }
    sections = {
        "search": {"learning_rate": 0.1, "init_mode": "domain-center",
                   "max_iters": 60},
        "baseline": {"method": "random-opt", "budget": 300},
        "region": {"spacing": 0.05, "seed_params": [0.3, -0.4]},
        "landscape": {"axes": [0, 1], "resolution": [21, 21]},
        "bench": {"methods": [{"method": "uniform"}, {"method": "gaussian"},
                              {"method": "adv-testing", "batch_size": 8,
                               "learning_rate": 0.1}],
                  "runs_per_method": 4, "budget": 160},
    }
    for command, section in sections.items():
        doc = dict(base)
        doc[command] = section
        cfg_path = tmp_path / f"{command}.json"
        cfg_path.write_text(json.dumps(doc, indent=2))
        out_a = tmp_path / f"{command}-a"
        out_b = tmp_path / f"{command}-b"
        code_a = cli_main([command, "--config", str(cfg_path),
                           "--out", str(out_a)])
        code_b = cli_main([command, "--config", str(cfg_path),
                           "--out", str(out_b)])
        assert code_a == code_b
        files_a = sorted(os.listdir(out_a))
        assert files_a == sorted(os.listdir(out_b)), command
        for fn in files_a:
            ba = (out_a / fn).read_bytes()
            bb = (out_b / fn).read_bytes()
            assert ba == bb, f"{command}/{fn} differs between invocations"
    _ok("6b", "byte-identical reruns across all five subcommands")


# -- 7. landscape exactness ----------------------------------------------------


def _scalar_reference(kind, params, point):
    """Independent scalar recomputation of every catalog formula."""
    if kind == "basin":
        return scalar_basin(point, params["amplitude"], params["center"],
                            params["scale"])
    if kind == "multi_basin":
        return max(scalar_basin(point, b["amplitude"], b["center"], b["scale"])
                   for b in params["basins"])
    if kind == "ridge":
        t = 0.0
        for x, u in zip(point, params["direction"]):
            t = t + float(x) * float(u)
        dev = t - params["offset"]
        denom = 2.0 * (params["scale"] * params["scale"])
        return params["amplitude"] * float(np.exp(-((dev * dev) / denom)))
    if kind == "edge_trap":
        edge = params["gain"] * max(
            abs(float(x)) / float(h)
            for x, h in zip(point, params["half_widths"]))
        basin = scalar_basin(point, params["basin"]["amplitude"],
                             params["basin"]["center"],
                             params["basin"]["scale"])
        return max(edge, basin)
    if kind == "flat_safe":
        return params["value"]
    raise AssertionError(kind)


def test_criterion_7_landscape_grids_exact_for_all_catalog_entries():
    domain = ParameterDomain([(-1.0, 1.0), (-1.0, 1.0)])
    threshold = 0.5
    catalog_configs = [
        ("basin", {"amplitude": 1.0, "center": [0.25, -0.5], "scale": 0.4}),
        ("multi_basin", {"basins": [
            {"amplitude": 1.0, "center": [-0.5, -0.5], "scale": 0.3},
            {"amplitude": 0.9, "center": [0.5, 0.5], "scale": 0.25}]}),
        ("ridge", {"amplitude": 0.8, "direction": [1.0, -0.5], "offset": 0.2,
                   "scale": 0.3}),
        ("edge_trap", {"gain": 0.45, "half_widths": [1.0, 1.0],
                       "basin": {"amplitude": 1.0, "center": [0.35, -0.2],
                                 "scale": 0.1}}),
        ("flat_safe", {"value": 0.4}),
    ]
    for kind, params in catalog_configs:
        sut = BuiltinSut(from_params(kind, params, dims=2))
        grid = grid_landscape(sut, domain, 0, 1, 33, 29, np.zeros(2),
                              threshold)
        assert grid.faults == [], kind
        for a, vi in enumerate(grid.values_i):
            for b, vj in enumerate(grid.values_j):
                want = _scalar_reference(kind, params, [vi, vj])
                assert grid.matrix[a, b] == want, (kind, a, b)
    _ok(7, "landscape grids exact for all five catalog entries")


# -- 8. edge_trap boundary stall is observable ---------------------------------


def test_criterion_8_edge_trap_budget_exhausted_runs_stall_or_reach_basin():
    domain = ParameterDomain([(-1.0, 1.0), (-1.0, 1.0)])
    basin_center = np.array([0.35, -0.2])
    basin_scale = 0.1
    sut = BuiltinSut(from_params("edge_trap", {
        "gain": 0.5, "half_widths": [1.0, 1.0],
        "basin": {"amplitude": 1.0, "center": list(basin_center),
                  "scale": basin_scale},
    }, dims=2))
    threshold = 0.8
    nu = 0.05
    exhausted = 0
    stalled_at_boundary = 0
    for seed in range(100):
        outcome = run_search(sut, domain, SearchConfig(
            threshold=threshold, seed=seed, batch_size=8, max_iters=150,
            learning_rate=0.2), keep_trajectory=False)
        if outcome.found:
            continue
        exhausted += 1
        mean = outcome.state.policy_means[-1]
        boundary_gap = float(np.min(np.minimum(mean - domain.lower,
                                               domain.upper - mean)))
        near_boundary = boundary_gap <= nu  # negative gap = outside the box
        in_basin = float(np.linalg.norm(mean - basin_center)) <= 3 * basin_scale
        assert near_boundary or in_basin, \
            f"seed {seed}: mean {mean} neither at boundary nor in the basin"
        if near_boundary:
            stalled_at_boundary += 1
    assert exhausted > 0, "trap never triggered; configuration too easy"
    _ok(8, f"edge trap observable ({exhausted} exhausted runs, "
           f"{stalled_at_boundary} pinned at the boundary)")
