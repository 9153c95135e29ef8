"""Bounded box of simulator parameters.

A domain is an axis-aligned box: one closed [lower, upper] interval per
dimension, with a human-readable name per dimension. Parameter vectors are
plain 1-D float64 numpy arrays. Domains are immutable after construction and
safe to share across threads.
"""
import math

import numpy as np

from .errors import DimensionMismatch, DomainError


class ParameterDomain:
    """Closed box of valid parameter vectors.

    Boundary points count as in-domain, so clamped vectors are always valid.
    Zero-width dimensions are rejected at construction: several samplers
    scale their step with the dimension width and break down at width 0.
    """

    def __init__(self, bounds, names=None):
        bounds = [(float(lo), float(hi)) for lo, hi in bounds]
        if not bounds:
            raise DomainError("domain needs at least one dimension")
        if names is None:
            names = [f"p{i}" for i in range(len(bounds))]
        names = [str(s) for s in names]
        if len(names) != len(bounds):
            raise DomainError(
                f"{len(bounds)} bounds but {len(names)} names"
            )
        for i, (lo, hi) in enumerate(bounds):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise DomainError(f"dimension {i} ({names[i]}): bounds must be finite")
            if not lo < hi:
                raise DomainError(
                    f"dimension {i} ({names[i]}): lower ({lo!r}) must be strictly"
                    f" less than upper ({hi!r})"
                )
        self._bounds = tuple(bounds)
        self._names = tuple(names)
        self._lower = np.array([b[0] for b in bounds], dtype=np.float64)
        self._upper = np.array([b[1] for b in bounds], dtype=np.float64)
        self._lower.flags.writeable = False
        self._upper.flags.writeable = False

    @property
    def dims(self):
        return len(self._bounds)

    @property
    def bounds(self):
        return self._bounds

    @property
    def names(self):
        return self._names

    @property
    def lower(self):
        return self._lower

    @property
    def upper(self):
        return self._upper

    def __repr__(self):
        spans = ", ".join(
            f"{name}=[{lo!r}, {hi!r}]" for name, (lo, hi) in zip(self._names, self._bounds)
        )
        return f"ParameterDomain({spans})"

    def __eq__(self, other):
        if not isinstance(other, ParameterDomain):
            return NotImplemented
        return self._bounds == other._bounds and self._names == other._names

    def _check_dims(self, v):
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1 or v.shape[0] != self.dims:
            raise DimensionMismatch(
                f"expected a vector of length {self.dims}, got shape {v.shape}"
            )
        return v

    def contains(self, v):
        """True iff every coordinate lies within its closed bounds."""
        v = self._check_dims(v)
        return bool(np.all(v >= self._lower) and np.all(v <= self._upper))

    def contains_batch(self, points):
        """Row-wise contains() for an (m, dims) array."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.dims:
            raise DimensionMismatch(
                f"expected shape (m, {self.dims}), got {points.shape}"
            )
        return np.all((points >= self._lower) & (points <= self._upper), axis=1)

    def clamp(self, v):
        """Project each coordinate onto its interval. Identity on in-domain
        vectors; idempotent."""
        v = self._check_dims(v)
        return np.clip(v, self._lower, self._upper)

    def clamp_batch(self, points):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.dims:
            raise DimensionMismatch(
                f"expected shape (m, {self.dims}), got {points.shape}"
            )
        return np.clip(points, self._lower, self._upper)

    def width(self, dim):
        """upper - lower of one dimension; strictly positive."""
        if not 0 <= dim < self.dims:
            raise DomainError(f"dimension index {dim} out of range [0, {self.dims})")
        lo, hi = self._bounds[dim]
        return hi - lo

    def widths(self):
        return self._upper - self._lower

    def midpoint(self):
        return self._lower + 0.5 * (self._upper - self._lower)

    def uniform_sample(self, rng):
        """One vector with independent uniform coordinates; always in-domain."""
        return rng.uniform(self._lower, self._upper)

    def uniform_sample_batch(self, m, rng):
        return rng.uniform(self._lower, self._upper, size=(m, self.dims))

    def to_json(self):
        """Serialization used inside run-config files."""
        return [
            {"name": name, "lower": lo, "upper": hi}
            for name, (lo, hi) in zip(self._names, self._bounds)
        ]

    @classmethod
    def from_json(cls, items):
        bounds = [(it["lower"], it["upper"]) for it in items]
        names = [it["name"] for it in items]
        return cls(bounds, names)
