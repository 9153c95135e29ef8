"""Comparison searchers: uniform sampling, Gaussian sampling, random
optimization.

All three stop at the first loss above the threshold or when the evaluation
budget runs out, and emit the same outcome/trajectory shape as the policy
search so reports and benches treat every method uniformly.

Scales follow the width of each dimension: the Gaussian sampler uses a
standard deviation of width/2 per dimension around a fixed center (domain
midpoint by default), and random optimization proposes steps with standard
deviation width/10 per dimension around the incumbent.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import OracleFault, SearchAborted, SimadvError
from .search import SearchOutcome, SearchState
from .sut import EvalRecord

METHODS = ("uniform", "gaussian", "random-opt")


@dataclass
class BaselineConfig:
    method: str
    budget: int
    threshold: float
    seed: int = 0
    center: np.ndarray | None = None  # gaussian only; defaults to midpoint

    def __post_init__(self):
        if self.method not in METHODS:
            raise SimadvError(
                f"method must be one of {METHODS}, got {self.method!r}"
            )
        if self.budget < 1:
            raise SimadvError("budget must be >= 1")
        if not math.isfinite(self.threshold):
            raise SimadvError("threshold must be finite")
        if self.center is not None:
            self.center = np.asarray(self.center, dtype=np.float64)


def _record(sut, point, loss, threshold, index, tag):
    return EvalRecord(
        params=tuple(float(x) for x in point),
        raw_score=float(loss) if sut.score_sign == "loss-as-is" else float(-loss),
        loss=float(loss),
        adversarial=float(loss) > threshold,
        iteration=index,
        method_tag=tag,
    )


def _sampling_run(sut, domain, cfg, draw, keep_trajectory):
    """Shared loop for the two i.i.d. samplers."""
    state = SearchState()
    for index in range(1, cfg.budget + 1):
        state.iteration = index
        point = draw()
        try:
            loss = sut.loss(point)
        except OracleFault as exc:
            raise SearchAborted(f"oracle fault at evaluation {index}: {exc}",
                                state) from exc
        rec = _record(sut, point, loss, cfg.threshold, index, cfg.method)
        state.note(rec, keep_trajectory)
        if rec.adversarial:
            return SearchOutcome("adversarial-found", rec, state.evaluations,
                                 state, cfg.method)
    return SearchOutcome("budget-exhausted", None, state.evaluations, state,
                         cfg.method)


def run_uniform(sut, domain, cfg, keep_trajectory=True):
    """Independent uniform draws over the domain."""
    rng = np.random.default_rng(cfg.seed)
    return _sampling_run(
        sut, domain, cfg, lambda: domain.uniform_sample(rng), keep_trajectory
    )


def run_gaussian(sut, domain, cfg, keep_trajectory=True):
    """Independent clamped Gaussian draws, std = width/2 per dimension."""
    rng = np.random.default_rng(cfg.seed)
    center = domain.midpoint() if cfg.center is None else cfg.center
    if center.shape != (domain.dims,):
        raise SimadvError(
            f"center has shape {center.shape}, expected ({domain.dims},)"
        )
    std = domain.widths() / 2.0

    def draw():
        return domain.clamp(rng.normal(center, std))

    return _sampling_run(sut, domain, cfg, draw, keep_trajectory)


def run_random_opt(sut, domain, cfg, keep_trajectory=True):
    """Hill climber: keep an incumbent, propose a clamped Gaussian step of
    std = width/10 per dimension, accept when not worse."""
    rng = np.random.default_rng(cfg.seed)
    std = domain.widths() / 10.0
    state = SearchState()

    incumbent = domain.uniform_sample(rng)
    try:
        incumbent_loss = sut.loss(incumbent)
    except OracleFault as exc:
        raise SearchAborted(f"oracle fault at evaluation 1: {exc}", state) from exc
    state.iteration = 1
    rec = _record(sut, incumbent, incumbent_loss, cfg.threshold, 1, cfg.method)
    state.note(rec, keep_trajectory)
    if rec.adversarial:
        return SearchOutcome("adversarial-found", rec, state.evaluations, state,
                             cfg.method)

    for index in range(2, cfg.budget + 1):
        state.iteration = index
        proposal = domain.clamp(rng.normal(incumbent, std))
        try:
            loss = sut.loss(proposal)
        except OracleFault as exc:
            raise SearchAborted(f"oracle fault at evaluation {index}: {exc}",
                                state) from exc
        rec = _record(sut, proposal, loss, cfg.threshold, index, cfg.method)
        state.note(rec, keep_trajectory)
        if rec.adversarial:
            return SearchOutcome("adversarial-found", rec, state.evaluations,
                                 state, cfg.method)
        if loss >= incumbent_loss:
            incumbent, incumbent_loss = proposal, loss
    return SearchOutcome("budget-exhausted", None, state.evaluations, state,
                         cfg.method)


_RUNNERS = {
    "uniform": run_uniform,
    "gaussian": run_gaussian,
    "random-opt": run_random_opt,
}


def run_baseline(sut, domain, cfg, keep_trajectory=True):
    return _RUNNERS[cfg.method](sut, domain, cfg, keep_trajectory)
