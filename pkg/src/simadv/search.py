"""Policy-gradient adversarial search.

A fixed-variance isotropic Gaussian policy over simulator parameters is
trained with the score-function (REINFORCE) estimator to emit vectors whose
loss exceeds the threshold. Per iteration: draw a batch from the policy,
clamp into the domain, evaluate; stop at the first adversarial sample,
otherwise update the mean along (1/K) sum_k grad-log-density(raw_k) *
(reward_k - baseline) and continue. Rewards equal losses (higher loss =
more adversarial = higher reward), so maximizing expected reward drives the
search toward the termination condition.

Gradients use the raw (pre-clamp) samples: the Gaussian log-density and its
closed-form gradient are only meaningful for the actually-drawn points,
while the simulator only ever sees clamped, in-domain vectors.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, OracleFault, SearchAborted, SimadvError
from .sut import EvalRecord, evaluate

INIT_MODES = ("uniform-random", "domain-center")

ADV_TESTING_TAG = "adv-testing"


class GaussianPolicy:
    """Learnable mean, fixed isotropic variance."""

    def __init__(self, mean, variance):
        self.mean = np.array(mean, dtype=np.float64)
        if self.mean.ndim != 1:
            raise SimadvError("policy mean must be a vector")
        variance = float(variance)
        if not (variance > 0.0 and math.isfinite(variance)):
            raise SimadvError(f"policy variance must be > 0, got {variance!r}")
        self._variance = variance

    @property
    def variance(self):
        return self._variance

    @property
    def dims(self):
        return self.mean.shape[0]

    def log_prob_grad(self, raw):
        """Gradient of the log density w.r.t. the mean at a raw sample:
        (raw - mean) / variance."""
        raw = np.asarray(raw, dtype=np.float64)
        if raw.shape != self.mean.shape:
            raise DimensionMismatch(
                f"sample shape {raw.shape} != mean shape {self.mean.shape}"
            )
        return (raw - self.mean) / self._variance


def sample_batch(policy, batch_size, domain, rng):
    """Draw batch_size i.i.d. policy samples.

    Returns (raw, clamped): the raw Gaussian draws and the same rows clamped
    into the domain. Both are (batch_size, dims).
    """
    if policy.dims != domain.dims:
        raise DimensionMismatch(
            f"policy has {policy.dims} dims, domain has {domain.dims}"
        )
    raw = rng.normal(
        policy.mean, math.sqrt(policy.variance), size=(batch_size, policy.dims)
    )
    return raw, domain.clamp_batch(raw)


def reward(record):
    """Reward of an evaluation: the loss itself under this artifact's
    higher-loss-is-more-adversarial convention."""
    return record.loss


def update_policy(policy, batch_raw, rewards, baseline, learning_rate,
                  baseline_decay=0.9):
    """One REINFORCE step on the mean plus the baseline's moving average.

    Returns (new_policy, new_baseline). The variance never changes.
    """
    batch_raw = np.asarray(batch_raw, dtype=np.float64)
    rewards = np.asarray(rewards, dtype=np.float64)
    if batch_raw.shape[0] != rewards.shape[0]:
        raise DimensionMismatch(
            f"{batch_raw.shape[0]} samples but {rewards.shape[0]} rewards"
        )
    grads = (batch_raw - policy.mean) / policy.variance
    advantage = rewards - baseline
    step = learning_rate * (grads * advantage[:, np.newaxis]).mean(axis=0)
    new_mean = policy.mean + step
    new_baseline = baseline_decay * baseline + (1.0 - baseline_decay) * float(
        rewards.mean()
    )
    return GaussianPolicy(new_mean, policy.variance), new_baseline


@dataclass
class SearchConfig:
    threshold: float
    batch_size: int = 8
    max_iters: int = 200
    learning_rate: float = 0.05
    variance: float = 0.05
    baseline_decay: float = 0.9
    init_mode: str = "uniform-random"
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise SimadvError("batch_size must be >= 1")
        if self.max_iters < 1:
            raise SimadvError("max_iters must be >= 1")
        if not self.learning_rate > 0:
            raise SimadvError("learning_rate must be > 0")
        if not self.variance > 0:
            raise SimadvError("variance must be > 0")
        if not 0.0 <= self.baseline_decay < 1.0:
            raise SimadvError("baseline_decay must be in [0, 1)")
        if self.init_mode not in INIT_MODES:
            raise SimadvError(
                f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}"
            )
        if not math.isfinite(self.threshold):
            raise SimadvError("threshold must be finite")


@dataclass
class SearchState:
    """Everything a run accumulates; kept on abort for diagnostics."""

    iteration: int = 0
    baseline: float = 0.0
    best: EvalRecord | None = None
    trajectory: list = field(default_factory=list)
    policy_means: list = field(default_factory=list)
    evaluations: int = 0
    loss_sum: float = 0.0
    raw_sum: float = 0.0

    def note(self, record, keep_trajectory):
        self.evaluations += 1
        self.loss_sum += record.loss
        self.raw_sum += record.raw_score
        if self.best is None or record.loss > self.best.loss:
            self.best = record
        if keep_trajectory:
            self.trajectory.append(record)


@dataclass
class SearchOutcome:
    status: str  # "adversarial-found" | "budget-exhausted"
    record: EvalRecord | None
    total_evaluations: int
    state: SearchState
    method_tag: str

    @property
    def found(self):
        return self.status == "adversarial-found"


def run_search(sut, domain, config, keep_trajectory=True):
    """Run the policy-gradient search until an adversarial sample is found
    or the iteration budget is exhausted.

    Deterministic for a fixed config: one seeded generator drives the mean
    initialization and every batch. When several samples of one batch exceed
    the threshold, the lowest batch index wins.
    """
    if sut.dims != domain.dims:
        raise DimensionMismatch(
            f"SUT has {sut.dims} dims, domain has {domain.dims}"
        )
    rng = np.random.default_rng(config.seed)
    if config.init_mode == "domain-center":
        mean0 = domain.midpoint()
    else:
        mean0 = domain.uniform_sample(rng)
    policy = GaussianPolicy(mean0, config.variance)
    state = SearchState()
    state.policy_means.append(policy.mean.copy())
    baseline = None

    for iteration in range(1, config.max_iters + 1):
        state.iteration = iteration
        raw, clamped = sample_batch(policy, config.batch_size, domain, rng)
        try:
            losses = sut.loss_batch(clamped)
        except OracleFault as exc:
            raise SearchAborted(f"oracle fault at iteration {iteration}: {exc}",
                                state) from exc
        records = []
        for k in range(config.batch_size):
            rec = EvalRecord(
                params=tuple(float(x) for x in clamped[k]),
                raw_score=float(losses[k]) if sut.score_sign == "loss-as-is"
                else float(-losses[k]),
                loss=float(losses[k]),
                adversarial=float(losses[k]) > config.threshold,
                iteration=iteration,
                method_tag=ADV_TESTING_TAG,
            )
            records.append(rec)
            state.note(rec, keep_trajectory)
        for rec in records:
            if rec.adversarial:
                return SearchOutcome(
                    status="adversarial-found",
                    record=rec,
                    total_evaluations=state.evaluations,
                    state=state,
                    method_tag=ADV_TESTING_TAG,
                )
        rewards = np.array([reward(r) for r in records], dtype=np.float64)
        if baseline is None:
            baseline = float(rewards.mean())
        state.baseline = baseline
        policy, baseline = update_policy(
            policy, raw, rewards, baseline, config.learning_rate,
            config.baseline_decay,
        )
        state.policy_means.append(policy.mean.copy())

    return SearchOutcome(
        status="budget-exhausted",
        record=None,
        total_evaluations=state.evaluations,
        state=state,
        method_tag=ADV_TESTING_TAG,
    )


def reevaluate(sut, outcome, threshold):
    """Re-run the oracle on a found record; used to confirm termination
    soundness."""
    if outcome.record is None:
        raise SimadvError("outcome has no adversarial record")
    return evaluate(sut, np.array(outcome.record.params), threshold)
