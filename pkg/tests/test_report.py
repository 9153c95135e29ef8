"""Landscape grids, projections, benches, and deterministic emission."""
import math

import numpy as np
import pytest

from simadv import (
    BuiltinSut,
    ParameterDomain,
    bench_compare,
    from_params,
    grid_landscape,
    project_samples,
)
from simadv.errors import ConfigError, SimadvError
from simadv.report import (
    read_landscape_csv,
    write_bench_csv,
    write_bench_summary,
    write_landscape_csv,
    write_landscape_meta,
    write_region_csv,
    write_trajectory_csv,
)
from simadv.sut import EvalRecord

from conftest import make_basin_sut, scalar_basin


def test_grid_flat_safe_all_cells_equal(square2):
    sut = BuiltinSut(from_params("flat_safe", {"value": 0.4}, dims=2))
    grid = grid_landscape(sut, square2, 0, 1, 5, 7, np.zeros(2), 0.5)
    assert grid.matrix.shape == (5, 7)
    assert np.all(grid.matrix == 0.4)
    assert grid.faults == []


def test_grid_axis_values_inclusive(square2):
    sut = BuiltinSut(from_params("flat_safe", {"value": 0.4}, dims=2))
    grid = grid_landscape(sut, square2, 0, 1, 3, 3, np.zeros(2), 0.5)
    assert list(grid.values_i) == [-1.0, 0.0, 1.0]
    assert list(grid.values_j) == [-1.0, 0.0, 1.0]


def test_grid_peak_exact_at_center_node(square2):
    # odd resolution puts a node exactly on the basin center
    sut = make_basin_sut(amplitude=1.0, center=(0.0, 0.0), scale=0.5)
    grid = grid_landscape(sut, square2, 0, 1, 41, 41, np.zeros(2), 0.5)
    assert grid.matrix[20, 20] == 1.0
    assert grid.matrix.max() == 1.0


def test_grid_matches_independent_recomputation(square2):
    sut = make_basin_sut(amplitude=1.2, center=(0.25, -0.5), scale=0.4)
    grid = grid_landscape(sut, square2, 0, 1, 11, 9, np.zeros(2), 0.5)
    for a, vi in enumerate(grid.values_i):
        for b, vj in enumerate(grid.values_j):
            want = scalar_basin([vi, vj], 1.2, [0.25, -0.5], 0.4)
            assert grid.matrix[a, b] == want


def test_grid_fixed_coordinates_respected():
    dom = ParameterDomain([(-1, 1), (-1, 1), (-1, 1)])
    sut = make_basin_sut(center=(0.0, 0.0, 0.5), scale=0.5)
    fixed = np.array([0.0, 0.0, 0.5])
    grid = grid_landscape(sut, dom, 0, 1, 5, 5, fixed, 0.5)
    assert grid.matrix[2, 2] == 1.0  # slice passes through the peak


def test_grid_cell_faults_recorded_and_sweep_continues(square2):
    class MostlyFine:
        dims = 2
        score_sign = "loss-as-is"

        def loss(self, v):
            if v[0] == -1.0 and v[1] == 0.0:
                from simadv.errors import OracleFault
                raise OracleFault("bad cell")
            return 0.3

    grid = grid_landscape(MostlyFine(), square2, 0, 1, 3, 3, np.zeros(2), 0.5)
    assert len(grid.faults) == 1
    assert grid.faults[0][:2] == (0, 1)
    assert math.isnan(grid.matrix[0, 1])
    assert np.sum(np.isnan(grid.matrix)) == 1


def test_grid_rejects_same_axis(square2):
    sut = make_basin_sut()
    with pytest.raises(SimadvError):
        grid_landscape(sut, square2, 1, 1, 5, 5, np.zeros(2), 0.5)


def test_project_samples_empty():
    assert project_samples([], 0, 1) == []


def test_project_samples_rows_and_flags_preserved():
    records = [
        EvalRecord(params=(0.1, 0.2, 0.3), raw_score=0.9, loss=0.9,
                   adversarial=True, iteration=1, method_tag="uniform"),
        EvalRecord(params=(-0.5, 0.0, 1.0), raw_score=0.1, loss=0.1,
                   adversarial=False, iteration=2, method_tag="uniform"),
    ]
    rows = project_samples(records, 0, 2)
    assert len(rows) == len(records)
    assert rows[0] == (0.1, 0.3, True, "uniform")
    assert rows[1] == (-0.5, 1.0, False, "uniform")


def _methods():
    return [
        {"method": "adv-testing", "batch_size": 1, "learning_rate": 0.1,
         "variance": 0.05, "baseline_decay": 0.9,
         "init_mode": "uniform-random"},
        {"method": "uniform"},
        {"method": "gaussian"},
        {"method": "random-opt"},
    ]


def test_bench_flat_safe_every_method_survives(square2):
    sut = BuiltinSut(from_params("flat_safe", {"value": 0.4}, dims=2))
    table = bench_compare(sut, square2, _methods(), runs_per_method=5,
                          budget=20, threshold=0.5, master_seed=0)
    assert [r.method_tag for r in table.rows] == \
        ["adv-testing", "uniform", "gaussian", "random-opt"]
    for row in table.rows:
        assert row.successes == 0
        assert row.accuracy == 1.0
        assert row.total_evaluations == 5 * 20
        assert row.mean_loss == pytest.approx(0.4)
        assert row.faults == 0


def test_bench_always_adversarial_one_evaluation_per_run(square2):
    sut = BuiltinSut(from_params("flat_safe", {"value": 1.5}, dims=2))
    table = bench_compare(sut, square2, _methods(), runs_per_method=4,
                          budget=20, threshold=0.5, master_seed=1)
    for row in table.rows:
        assert row.successes == 4
        assert row.accuracy == 0.0
        assert row.total_evaluations == 4  # one evaluation per run


def test_bench_accuracy_identity(wide2):
    sut = make_basin_sut(center=(0.3, -0.4), scale=0.3)
    table = bench_compare(sut, wide2, [{"method": "uniform"}],
                          runs_per_method=10, budget=50, threshold=0.9,
                          master_seed=2)
    row = table.rows[0]
    assert row.accuracy == 1.0 - row.successes / row.runs


def test_bench_seeds_differ_across_runs_and_methods():
    from simadv.report import derive_seed
    seeds = {derive_seed(7, tag, k) for tag in ("uniform", "adv-testing")
             for k in range(50)}
    assert len(seeds) == 100
    assert derive_seed(7, "uniform", 3) == derive_seed(7, "uniform", 3)


def test_bench_budget_not_divisible_by_batch_rejected(square2):
    sut = make_basin_sut()
    methods = [{"method": "adv-testing", "batch_size": 8}]
    with pytest.raises(ConfigError):
        bench_compare(sut, square2, methods, runs_per_method=1, budget=30,
                      threshold=0.5, master_seed=0)


def test_trajectory_csv_round_trip_and_determinism(tmp_path, square2):
    records = [
        EvalRecord(params=(0.1, -0.2), raw_score=0.5, loss=0.5,
                   adversarial=False, iteration=1, method_tag="uniform"),
        EvalRecord(params=(1 / 3, 2 / 3), raw_score=0.9, loss=0.9,
                   adversarial=True, iteration=2, method_tag="uniform"),
    ]
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_trajectory_csv(p1, records, square2.names)
    write_trajectory_csv(p2, records, square2.names)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == ("method_tag,run_id,iteration,eval_index,x0,x1,"
                        "raw_score,loss,adversarial")
    cells = lines[2].split(",")
    assert float(cells[4]) == 1 / 3  # shortest round-trip decimals
    assert cells[8] == "true"


def test_landscape_csv_round_trip(tmp_path, square2):
    sut = make_basin_sut(amplitude=1.1, center=(0.2, 0.1), scale=0.7)
    grid = grid_landscape(sut, square2, 0, 1, 6, 4, np.zeros(2), 0.5)
    path = tmp_path / "landscape.csv"
    write_landscape_csv(path, grid, square2.names)
    vi, vj, matrix = read_landscape_csv(path)
    assert np.array_equal(vi, grid.values_i)
    assert np.array_equal(vj, grid.values_j)
    assert np.array_equal(matrix, grid.matrix)
    meta = tmp_path / "landscape_meta.json"
    write_landscape_meta(meta, grid, square2)
    import json
    doc = json.loads(meta.read_text())
    assert doc["resolution"] == [6, 4]
    assert doc["threshold"] == 0.5


def test_region_csv_contents(tmp_path, square2):
    from simadv import RegionGridSpec, flood_region
    sut = make_basin_sut(scale=0.5)
    spec = RegionGridSpec(0.25, np.zeros(2), square2)
    region = flood_region(sut, spec, threshold=0.7)
    path = tmp_path / "region.csv"
    write_region_csv(path, region, square2.names)
    text = path.read_text()
    assert "# spacing=0.25" in text
    assert "# threshold=0.7" in text
    assert "# truncated=false" in text
    header = [ln for ln in text.splitlines() if not ln.startswith("#")][0]
    assert header == "k0,k1,x0,x1,loss"
    body = [ln for ln in text.splitlines()
            if not ln.startswith("#") and ln != header]
    assert len(body) == len(region)


def test_emit_report_dispatches_on_artifact_type(tmp_path, square2):
    from simadv import RegionGridSpec, emit_report, flood_region, run_uniform
    from simadv.baselines import BaselineConfig

    sut = make_basin_sut(scale=0.5)
    outcome = run_uniform(sut, square2, BaselineConfig(
        "uniform", budget=10, threshold=2.0, seed=0))
    paths = emit_report(outcome, tmp_path / "o", names=square2.names)
    assert sorted(p.split("/")[-1] for p in paths) == \
        ["outcome.json", "trajectory.csv"]

    grid = grid_landscape(sut, square2, 0, 1, 4, 4, np.zeros(2), 0.5)
    paths = emit_report(grid, tmp_path / "g", names=square2)
    assert sorted(p.split("/")[-1] for p in paths) == \
        ["landscape.csv", "landscape_meta.json"]

    region = flood_region(sut, RegionGridSpec(0.25, np.zeros(2), square2), 0.7)
    paths = emit_report(region, tmp_path / "r", names=square2.names)
    assert sorted(p.split("/")[-1] for p in paths) == \
        ["region.csv", "region_summary.json"]

    table = bench_compare(sut, square2, [{"method": "uniform"}],
                          runs_per_method=2, budget=5, threshold=2.0,
                          master_seed=0)
    paths = emit_report(table, tmp_path / "b")
    assert sorted(p.split("/")[-1] for p in paths) == \
        ["bench.csv", "bench_summary.json"]

    # identical inputs produce identical bytes
    again = emit_report(table, tmp_path / "b2")
    for p1, p2 in zip(sorted(paths), sorted(again)):
        assert open(p1, "rb").read() == open(p2, "rb").read()

    with pytest.raises(SimadvError):
        emit_report(object(), tmp_path / "x")


def test_bench_emission_deterministic(tmp_path, square2):
    sut = BuiltinSut(from_params("flat_safe", {"value": 0.4}, dims=2))
    table = bench_compare(sut, square2, [{"method": "uniform"}],
                          runs_per_method=3, budget=10, threshold=0.5,
                          master_seed=3)
    c1, c2 = tmp_path / "b1.csv", tmp_path / "b2.csv"
    s1, s2 = tmp_path / "s1.json", tmp_path / "s2.json"
    write_bench_csv(c1, table)
    write_bench_csv(c2, table)
    write_bench_summary(s1, table)
    write_bench_summary(s2, table)
    assert c1.read_bytes() == c2.read_bytes()
    assert s1.read_bytes() == s2.read_bytes()
    header = c1.read_text().splitlines()[0]
    assert header == ("method_tag,runs,successes,accuracy,mean_loss,"
                      "mean_raw_score,total_evaluations,faults")
