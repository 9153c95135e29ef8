"""Adversarial testing of black-box simulator/model stacks.

Searches a bounded parameter space for vectors whose loss exceeds a
misclassification threshold (policy-gradient search plus sampling
baselines), maps the connected adversarial region around each find, and
ships landscape/benchmark tooling for comparisons.
"""
from ._kernels import BACKEND as KERNEL_BACKEND
from .baselines import BaselineConfig, run_baseline, run_gaussian, run_random_opt, run_uniform
from .domain import ParameterDomain
from .external import ExternalSut, ProcessConfig, Session, SessionPool, open_session
from .landscapes import builtin_catalog, from_params
from .regions import AdversarialRegion, RegionGridSpec, brute_force_region, flood_region, neighbors
from .report import (
    BenchTable,
    LandscapeGrid,
    bench_compare,
    emit_report,
    grid_landscape,
    project_samples,
)
from .search import (
    GaussianPolicy,
    SearchConfig,
    SearchOutcome,
    run_search,
    sample_batch,
    update_policy,
)
from .sut import BuiltinSut, EvalRecord, NoisySut, estimate_risk, evaluate

__version__ = "0.1.0"

__all__ = [
    "AdversarialRegion",
    "BaselineConfig",
    "BenchTable",
    "BuiltinSut",
    "EvalRecord",
    "ExternalSut",
    "GaussianPolicy",
    "KERNEL_BACKEND",
    "LandscapeGrid",
    "NoisySut",
    "ParameterDomain",
    "ProcessConfig",
    "RegionGridSpec",
    "SearchConfig",
    "SearchOutcome",
    "Session",
    "SessionPool",
    "bench_compare",
    "brute_force_region",
    "builtin_catalog",
    "emit_report",
    "estimate_risk",
    "evaluate",
    "flood_region",
    "from_params",
    "grid_landscape",
    "neighbors",
    "open_session",
    "project_samples",
    "run_baseline",
    "run_gaussian",
    "run_random_opt",
    "run_search",
    "run_uniform",
    "sample_batch",
    "update_policy",
]
