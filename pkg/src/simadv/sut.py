"""System-under-test abstraction.

The simulator, the model and the loss are consumed everywhere as a single
composite scalar oracle: parameter vector -> loss. Internally HIGHER loss
always means MORE adversarial, and a point is adversarial iff loss > T.
Oracles whose raw score is confidence-like (higher = better, e.g. cosine
similarity) use score_sign="negate-score" and a negated threshold so the
convention is preserved.

A SUT object provides:
    dims          dimensionality of the parameter vector
    raw_score(v)  the oracle's raw scalar
    loss(v)       raw score mapped by score_sign, finiteness-checked
    loss_batch(P) vectorized loss over an (m, dims) array, in row order
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, OracleFault

SCORE_SIGNS = ("loss-as-is", "negate-score")


@dataclass(frozen=True)
class EvalRecord:
    """One oracle call."""

    params: tuple
    raw_score: float
    loss: float
    adversarial: bool
    iteration: int = 0
    method_tag: str = ""


def _freeze(v):
    return tuple(float(x) for x in v)


class BuiltinSut:
    """Deterministic analytic oracle over a built-in landscape."""

    deterministic = True

    def __init__(self, landscape, score_sign="loss-as-is"):
        if score_sign not in SCORE_SIGNS:
            raise OracleFault(f"unknown score_sign {score_sign!r}")
        self.landscape = landscape
        self.score_sign = score_sign

    @property
    def dims(self):
        return self.landscape.dims

    def raw_batch(self, points):
        return self.landscape.loss_batch(points)

    def raw_score(self, v):
        v = np.asarray(v, dtype=np.float64)
        return float(self.raw_batch(v[np.newaxis, :])[0])

    def loss_batch(self, points):
        raw = self.raw_batch(points)
        loss = raw if self.score_sign == "loss-as-is" else -raw
        bad = ~np.isfinite(loss)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise OracleFault(
                f"non-finite score {raw[k]!r}", params=np.asarray(points)[k]
            )
        return loss

    def loss(self, v):
        v = np.asarray(v, dtype=np.float64)
        return float(self.loss_batch(v[np.newaxis, :])[0])

    def close(self):
        pass


class NoisySut:
    """Additive-noise wrapper with its own seeded stream.

    Adds independent N(0, noise_std^2) draws to the base raw score, one per
    evaluation, in call order (row order for batches), so a fixed seed gives
    a reproducible sequence.
    """

    deterministic = False

    def __init__(self, base, noise_std, seed=0):
        if noise_std < 0:
            raise OracleFault("noise_std must be >= 0")
        self.base = base
        self.noise_std = float(noise_std)
        self.score_sign = base.score_sign
        self._rng = np.random.default_rng(seed)

    @property
    def dims(self):
        return self.base.dims

    def raw_batch(self, points):
        raw = self.base.raw_batch(points)
        return raw + self._rng.normal(0.0, self.noise_std, size=raw.shape)

    def raw_score(self, v):
        v = np.asarray(v, dtype=np.float64)
        return float(self.raw_batch(v[np.newaxis, :])[0])

    def loss_batch(self, points):
        raw = self.raw_batch(points)
        loss = raw if self.score_sign == "loss-as-is" else -raw
        bad = ~np.isfinite(loss)
        if np.any(bad):
            k = int(np.flatnonzero(bad)[0])
            raise OracleFault(
                f"non-finite score {raw[k]!r}", params=np.asarray(points)[k]
            )
        return loss

    def loss(self, v):
        v = np.asarray(v, dtype=np.float64)
        return float(self.loss_batch(v[np.newaxis, :])[0])

    def close(self):
        self.base.close()


def evaluate(sut, v, threshold, iteration=0, method_tag=""):
    """Evaluate one parameter vector into an EvalRecord.

    The adversarial flag is (loss > threshold), computed here and nowhere
    else so the flag and the threshold can never drift apart.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != sut.dims:
        raise DimensionMismatch(
            f"expected a vector of length {sut.dims}, got shape {v.shape}"
        )
    raw = sut.raw_score(v)
    if not math.isfinite(raw):
        raise OracleFault(f"non-finite score {raw!r}", params=v)
    loss = raw if sut.score_sign == "loss-as-is" else -raw
    return EvalRecord(
        params=_freeze(v),
        raw_score=raw,
        loss=loss,
        adversarial=loss > threshold,
        iteration=iteration,
        method_tag=method_tag,
    )


def estimate_risk(sut, v, samples):
    """Monte Carlo estimate of the expected loss at ``v``.

    Arithmetic mean of `samples` independent evaluations. Randomness, if
    any, comes from the SUT's own seeded stream (see NoisySut). The mean of
    identical samples is returned exactly, so on a deterministic SUT this
    equals a single evaluation bit-for-bit for every sample count.
    """
    samples = int(samples)
    if samples < 1:
        raise OracleFault("samples must be >= 1")
    losses = [sut.loss(v) for _ in range(samples)]
    lo, hi = min(losses), max(losses)
    if lo == hi:
        return lo
    return float(np.mean(losses))
