"""Analysis surfaces and report emission.

- 2-D loss-landscape grids over a pair of dimensions with the rest fixed
- scatter projections of evaluation records onto a coordinate plane
- benchmark tables comparing search methods at an equal evaluation budget
- deterministic CSV/JSON writers (stable field order, shortest round-trip
  float formatting), so identical inputs always produce identical bytes

The bench reports "accuracy" the way comparison tables for model testing
usually do: the fraction of runs the model survives (1 - successes/runs),
so LOWER accuracy means the tester found more failures.
"""
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import BaselineConfig, run_baseline
from .errors import ConfigError, OracleFault, SimadvError
from .search import ADV_TESTING_TAG, SearchConfig, run_search


def fmt(x):
    """Shortest round-trip decimal for a float."""
    return repr(float(x))


# -- landscape grids --------------------------------------------------------


@dataclass
class LandscapeGrid:
    axis_i: int
    axis_j: int
    values_i: np.ndarray
    values_j: np.ndarray
    matrix: np.ndarray  # res_i x res_j of losses (NaN where a cell faulted)
    fixed: np.ndarray
    threshold: float
    faults: list = field(default_factory=list)  # (row, col, message)


def grid_landscape(sut, domain, axis_i, axis_j, res_i, res_j, fixed,
                   threshold):
    """Losses over a bound-inclusive res_i x res_j grid on two dimensions,
    all other coordinates held at ``fixed``.

    Cell (a, b) holds exactly the oracle's loss at the realized point; cells
    whose evaluation faults are recorded and set to NaN, and the sweep
    continues.
    """
    if axis_i == axis_j:
        raise SimadvError("axis_i and axis_j must differ")
    for axis in (axis_i, axis_j):
        if not 0 <= axis < domain.dims:
            raise SimadvError(f"axis {axis} out of range [0, {domain.dims})")
    if res_i < 2 or res_j < 2:
        raise SimadvError("resolution must be >= 2 per axis")
    fixed = np.asarray(fixed, dtype=np.float64)
    if not domain.contains(fixed):
        raise SimadvError("fixed point must lie inside the domain")

    values_i = np.linspace(domain.lower[axis_i], domain.upper[axis_i], res_i)
    values_j = np.linspace(domain.lower[axis_j], domain.upper[axis_j], res_j)
    matrix = np.empty((res_i, res_j), dtype=np.float64)
    faults = []
    point = fixed.copy()
    for a in range(res_i):
        point[axis_i] = values_i[a]
        for b in range(res_j):
            point[axis_j] = values_j[b]
            try:
                matrix[a, b] = sut.loss(point)
            except OracleFault as exc:
                matrix[a, b] = math.nan
                faults.append((a, b, str(exc)))
    return LandscapeGrid(axis_i, axis_j, values_i, values_j, matrix, fixed,
                         threshold, faults)


# -- projections ------------------------------------------------------------


def project_samples(records, axis_i, axis_j):
    """Project records onto two coordinates: one (v_i, v_j, adversarial,
    method_tag) row per record, order preserved."""
    rows = []
    for rec in records:
        rows.append((rec.params[axis_i], rec.params[axis_j], rec.adversarial,
                     rec.method_tag))
    return rows


# -- benchmarking -----------------------------------------------------------


@dataclass
class BenchRow:
    method_tag: str
    runs: int               # completed (non-faulted) runs
    successes: int          # runs that found an adversarial sample
    accuracy: float         # 1 - successes/runs
    mean_loss: float        # mean over every evaluation the method made
    mean_raw_score: float
    total_evaluations: int
    faults: int


@dataclass
class BenchTable:
    rows: list
    master_seed: int
    runs_per_method: int
    budget: int
    threshold: float


def derive_seed(master_seed, method_tag, run_index):
    """Stable per-run seed stream: hash of (master seed, tag, index)."""
    digest = hashlib.sha256(
        f"{master_seed}:{method_tag}:{run_index}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


def _method_tag(method_cfg):
    return method_cfg["method"]


def _run_method(sut, domain, method_cfg, threshold, budget, seed):
    method = method_cfg["method"]
    if method == ADV_TESTING_TAG:
        batch_size = int(method_cfg.get("batch_size", 8))
        if budget % batch_size != 0:
            raise ConfigError(
                f"budget {budget} is not a multiple of batch_size {batch_size}"
            )
        cfg = SearchConfig(
            threshold=threshold,
            batch_size=batch_size,
            max_iters=budget // batch_size,
            learning_rate=float(method_cfg.get("learning_rate", 0.05)),
            variance=float(method_cfg.get("variance", 0.05)),
            baseline_decay=float(method_cfg.get("baseline_decay", 0.9)),
            init_mode=method_cfg.get("init_mode", "uniform-random"),
            seed=seed,
        )
        return run_search(sut, domain, cfg, keep_trajectory=False)
    if method in ("uniform", "gaussian", "random-opt"):
        center = method_cfg.get("center")
        cfg = BaselineConfig(
            method=method,
            budget=budget,
            threshold=threshold,
            seed=seed,
            center=None if center is None else np.asarray(center, dtype=np.float64),
        )
        return run_baseline(sut, domain, cfg, keep_trajectory=False)
    raise ConfigError(f"unknown bench method {method!r}")


def bench_compare(sut, domain, methods, runs_per_method, budget, threshold,
                  master_seed=0):
    """Run every method runs_per_method times at an equal evaluation budget
    and aggregate per-method success counts and score means.

    Per-run seeds derive deterministically from the master seed, the method
    tag and the run index, so methods see independent, reproducible streams.
    Runs that abort on an oracle fault are excluded from the means and
    counted in the faults column.
    """
    if runs_per_method < 1:
        raise ConfigError("runs_per_method must be >= 1")
    if budget < 1:
        raise ConfigError("budget must be >= 1")
    rows = []
    for method_cfg in methods:
        tag = _method_tag(method_cfg)
        successes = 0
        completed = 0
        faulted = 0
        loss_sum = 0.0
        raw_sum = 0.0
        evaluations = 0
        for run_index in range(runs_per_method):
            seed = derive_seed(master_seed, tag, run_index)
            try:
                outcome = _run_method(sut, domain, method_cfg, threshold,
                                      budget, seed)
            except ConfigError:
                raise
            except SimadvError:
                faulted += 1
                continue
            completed += 1
            if outcome.found:
                successes += 1
            loss_sum += outcome.state.loss_sum
            raw_sum += outcome.state.raw_sum
            evaluations += outcome.total_evaluations
        rows.append(BenchRow(
            method_tag=tag,
            runs=completed,
            successes=successes,
            accuracy=1.0 - successes / completed if completed else math.nan,
            mean_loss=loss_sum / evaluations if evaluations else math.nan,
            mean_raw_score=raw_sum / evaluations if evaluations else math.nan,
            total_evaluations=evaluations,
            faults=faulted,
        ))
    return BenchTable(rows, master_seed, runs_per_method, budget, threshold)


# -- emission ---------------------------------------------------------------


def _bool(b):
    return "true" if b else "false"


def write_trajectory_csv(path, records, names, run_id=0):
    """One row per evaluation, ordered as evaluated."""
    header = ["method_tag", "run_id", "iteration", "eval_index", *names,
              "raw_score", "loss", "adversarial"]
    lines = [",".join(header)]
    for eval_index, rec in enumerate(records, start=1):
        row = [rec.method_tag, str(run_id), str(rec.iteration), str(eval_index),
               *(fmt(x) for x in rec.params),
               fmt(rec.raw_score), fmt(rec.loss), _bool(rec.adversarial)]
        lines.append(",".join(row))
    _write_text(path, "\n".join(lines) + "\n")


def write_projection_csv(path, rows, name_i, name_j):
    header = [name_i, name_j, "adversarial", "method_tag"]
    lines = [",".join(header)]
    for vi, vj, adversarial, tag in rows:
        lines.append(",".join([fmt(vi), fmt(vj), _bool(adversarial), tag]))
    _write_text(path, "\n".join(lines) + "\n")


def write_landscape_csv(path, grid, names):
    """Header row carries the axis-j values; each body row starts with its
    axis-i value. Re-parsing reconstructs the matrix exactly."""
    label = f"{names[grid.axis_i]}\\{names[grid.axis_j]}"
    lines = [",".join([label, *(fmt(v) for v in grid.values_j)])]
    for a in range(grid.matrix.shape[0]):
        lines.append(",".join([fmt(grid.values_i[a]),
                               *(fmt(v) for v in grid.matrix[a])]))
    _write_text(path, "\n".join(lines) + "\n")


def read_landscape_csv(path):
    """Inverse of write_landscape_csv: (values_i, values_j, matrix)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    values_j = np.array([float(x) for x in lines[0].split(",")[1:]])
    values_i = []
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        values_i.append(float(cells[0]))
        rows.append([float(x) for x in cells[1:]])
    return np.array(values_i), values_j, np.array(rows)


def write_landscape_meta(path, grid, domain):
    meta = {
        "axis_i": {"index": grid.axis_i, "name": domain.names[grid.axis_i]},
        "axis_j": {"index": grid.axis_j, "name": domain.names[grid.axis_j]},
        "resolution": [int(grid.matrix.shape[0]), int(grid.matrix.shape[1])],
        "fixed": [float(x) for x in grid.fixed],
        "threshold": grid.threshold,
        "domain": domain.to_json(),
        "faults": [
            {"row": a, "col": b, "message": msg} for a, b, msg in grid.faults
        ],
    }
    _write_json(path, meta)


def write_region_csv(path, region, names):
    """One row per member: integer offsets, realized parameters, loss.
    Leading comment lines carry spacing, seed, threshold and truncation."""
    n = len(region.seed_params)
    lines = [
        f"# spacing={fmt(region.spacing)}",
        f"# threshold={fmt(region.threshold)}",
        f"# seed=[{', '.join(fmt(x) for x in region.seed_params)}]",
        f"# truncated={_bool(region.truncated)}",
        f"# evaluations={region.evaluations}",
        ",".join([*(f"k{i}" for i in range(n)), *names, "loss"]),
    ]
    for coord in sorted(region.members):
        point = region.seed_params + region.spacing * np.asarray(coord, dtype=np.float64)
        lines.append(",".join([
            *(str(k) for k in coord),
            *(fmt(x) for x in point),
            fmt(region.members[coord]),
        ]))
    _write_text(path, "\n".join(lines) + "\n")


def write_bench_csv(path, table):
    header = ["method_tag", "runs", "successes", "accuracy", "mean_loss",
              "mean_raw_score", "total_evaluations", "faults"]
    lines = [",".join(header)]
    for row in table.rows:
        lines.append(",".join([
            row.method_tag, str(row.runs), str(row.successes),
            fmt(row.accuracy), fmt(row.mean_loss), fmt(row.mean_raw_score),
            str(row.total_evaluations), str(row.faults),
        ]))
    _write_text(path, "\n".join(lines) + "\n")


def write_bench_summary(path, table):
    _write_json(path, {
        "master_seed": table.master_seed,
        "runs_per_method": table.runs_per_method,
        "budget": table.budget,
        "threshold": table.threshold,
        "rows": [
            {
                "method_tag": row.method_tag,
                "runs": row.runs,
                "successes": row.successes,
                "accuracy": row.accuracy,
                "mean_loss": row.mean_loss,
                "mean_raw_score": row.mean_raw_score,
                "total_evaluations": row.total_evaluations,
                "faults": row.faults,
            }
            for row in table.rows
        ],
    })


def write_region_summary(path, region):
    _write_json(path, {
        "members": len(region.members),
        "evaluations": region.evaluations,
        "truncated": region.truncated,
        "spacing": region.spacing,
        "threshold": region.threshold,
        "seed_params": [float(x) for x in region.seed_params],
    })


def _record_json(rec):
    if rec is None:
        return None
    return {
        "params": [float(x) for x in rec.params],
        "raw_score": rec.raw_score,
        "loss": rec.loss,
        "adversarial": rec.adversarial,
        "iteration": rec.iteration,
        "method_tag": rec.method_tag,
    }


def write_outcome_json(path, outcome):
    doc = {
        "status": outcome.status,
        "method_tag": outcome.method_tag,
        "total_evaluations": outcome.total_evaluations,
        "iterations": outcome.state.iteration,
        "adversarial": _record_json(outcome.record),
        "best": _record_json(outcome.state.best),
    }
    if outcome.state.policy_means:
        doc["final_mean"] = [float(x) for x in outcome.state.policy_means[-1]]
    _write_json(path, doc)


def emit_report(obj, destination, names=None):
    """Write the artifact's files into ``destination`` and return their paths.

    Dispatches on the artifact type: a search/baseline outcome emits
    trajectory.csv + outcome.json, a landscape grid emits landscape.csv +
    landscape_meta.json, a bench table emits bench.csv + bench_summary.json,
    and a region emits region.csv + region_summary.json. ``names`` supplies
    the per-dimension column labels (a domain, for grids) where a format
    needs them. Identical inputs produce byte-identical files.
    """
    import os

    from .regions import AdversarialRegion
    from .search import SearchOutcome

    os.makedirs(destination, exist_ok=True)
    paths = []

    def emit(filename, writer, *args):
        path = os.path.join(destination, filename)
        writer(path, *args)
        paths.append(path)

    if isinstance(obj, SearchOutcome):
        if names is None:
            raise SimadvError("emit_report: dimension names required for outcomes")
        emit("trajectory.csv", write_trajectory_csv, obj.state.trajectory, names)
        emit("outcome.json", write_outcome_json, obj)
    elif isinstance(obj, LandscapeGrid):
        if names is None:
            raise SimadvError("emit_report: a domain is required for grids")
        domain = names
        emit("landscape.csv", write_landscape_csv, obj, domain.names)
        emit("landscape_meta.json", write_landscape_meta, obj, domain)
    elif isinstance(obj, BenchTable):
        emit("bench.csv", write_bench_csv, obj)
        emit("bench_summary.json", write_bench_summary, obj)
    elif isinstance(obj, AdversarialRegion):
        if names is None:
            raise SimadvError("emit_report: dimension names required for regions")
        emit("region.csv", write_region_csv, obj, names)
        emit("region_summary.json", write_region_summary, obj)
    else:
        raise SimadvError(f"emit_report: unsupported artifact {type(obj).__name__}")
    return paths


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_json(path, doc):
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True,
                                 allow_nan=True) + "\n")
