"""Built-in analytic verification landscapes.

Each landscape is a closed-form loss surface over parameter vectors with a
documented adversarial set, used to verify searchers and region discovery
exactly. All evaluation goes through the accumulator kernels plus a shared
numpy formula layer, so repeated evaluations are bit-identical and the
compiled/pure kernel backends agree bitwise.

Catalog:

  basin       A * exp(-|p - center|^2 / (2 scale^2)); one adversarial ball
              when A > threshold (radius scale * sqrt(2 ln(A/T))).
  multi_basin max over several basins; disjoint adversarial components when
              the basins are far separated.
  ridge       A * exp(-(direction . p - offset)^2 / (2 scale^2)); an
              adversarial slab around the hyperplane direction . p = offset.
  edge_trap   max(gain * max_i |p_i| / half_widths[i], basin term). The edge
              term rises toward the box faces and tops out at `gain` (kept
              below the threshold), luring mean-seeking searchers to the
              boundary while the only adversarial points sit in an interior
              basin.
  flat_safe   constant; configure value below the threshold for a surface
              with no adversarial points anywhere.
"""
import math

import numpy as np

from . import _kernels
from .errors import DimensionMismatch, LandscapeError


def _vector(value, name):
    v = np.asarray(value, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise LandscapeError(f"{name} must be a non-empty vector")
    if not np.all(np.isfinite(v)):
        raise LandscapeError(f"{name} must be finite")
    v.flags.writeable = False
    return v


def _finite(value, name):
    x = float(value)
    if not math.isfinite(x):
        raise LandscapeError(f"{name} must be finite")
    return x


def _positive(value, name):
    x = _finite(value, name)
    if x <= 0.0:
        raise LandscapeError(f"{name} must be > 0")
    return x


def _as_points(points, dims):
    points = np.ascontiguousarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != dims:
        raise DimensionMismatch(
            f"expected points of shape (m, {dims}), got {points.shape}"
        )
    return points


class Basin:
    """Isotropic Gaussian bump."""

    kind = "basin"

    def __init__(self, amplitude, center, scale):
        self.amplitude = _finite(amplitude, "amplitude")
        self.center = _vector(center, "center")
        self.scale = _positive(scale, "scale")
        self._denom = 2.0 * (self.scale * self.scale)

    @property
    def dims(self):
        return self.center.shape[0]

    def loss_batch(self, points):
        points = _as_points(points, self.dims)
        acc = _kernels.sq_dist(points, self.center)
        return self.amplitude * np.exp(-(acc / self._denom))

    def adversarial_radius(self, threshold):
        """Radius of the super-threshold ball, or None when empty."""
        if self.amplitude <= threshold:
            return None
        return self.scale * math.sqrt(2.0 * math.log(self.amplitude / threshold))

    def params_json(self):
        return {
            "amplitude": self.amplitude,
            "center": [float(c) for c in self.center],
            "scale": self.scale,
        }


class MultiBasin:
    """Pointwise max over several basins."""

    kind = "multi_basin"

    def __init__(self, basins):
        if not basins:
            raise LandscapeError("multi_basin needs at least one basin")
        self.basins = tuple(basins)
        dims = self.basins[0].dims
        for k, b in enumerate(self.basins):
            if b.dims != dims:
                raise LandscapeError(
                    f"basin {k} has {b.dims} dims, expected {dims}"
                )

    @property
    def dims(self):
        return self.basins[0].dims

    def loss_batch(self, points):
        loss = self.basins[0].loss_batch(points)
        for b in self.basins[1:]:
            loss = np.maximum(loss, b.loss_batch(points))
        return loss

    def params_json(self):
        return {"basins": [b.params_json() for b in self.basins]}


class Ridge:
    """Gaussian slab around a hyperplane."""

    kind = "ridge"

    def __init__(self, amplitude, direction, offset, scale):
        self.amplitude = _finite(amplitude, "amplitude")
        self.direction = _vector(direction, "direction")
        if not np.any(self.direction != 0.0):
            raise LandscapeError("direction must be non-zero")
        self.offset = _finite(offset, "offset")
        self.scale = _positive(scale, "scale")
        self._denom = 2.0 * (self.scale * self.scale)

    @property
    def dims(self):
        return self.direction.shape[0]

    def loss_batch(self, points):
        points = _as_points(points, self.dims)
        t = _kernels.dot(points, self.direction)
        dev = t - self.offset
        return self.amplitude * np.exp(-((dev * dev) / self._denom))

    def params_json(self):
        return {
            "amplitude": self.amplitude,
            "direction": [float(u) for u in self.direction],
            "offset": self.offset,
            "scale": self.scale,
        }


class EdgeTrap:
    """Boundary-seeking gradient with a hidden interior basin.

    The edge term gain * max_i |p_i| / half_widths[i] equals `gain` on the
    faces of the box [-half_widths, half_widths]; with gain below the run
    threshold the faces are never adversarial, reproducing searchers that
    stall on the boundary while the basin holds the actual adversarial set.
    """

    kind = "edge_trap"

    def __init__(self, gain, half_widths, basin):
        self.gain = _positive(gain, "gain")
        self.half_widths = _vector(half_widths, "half_widths")
        if not np.all(self.half_widths > 0.0):
            raise LandscapeError("half_widths must be > 0")
        if not isinstance(basin, Basin):
            raise LandscapeError("edge_trap basin must be a basin definition")
        self.basin = basin
        if basin.dims != self.half_widths.shape[0]:
            raise LandscapeError(
                f"basin has {basin.dims} dims, half_widths has"
                f" {self.half_widths.shape[0]}"
            )

    @property
    def dims(self):
        return self.half_widths.shape[0]

    def loss_batch(self, points):
        points = _as_points(points, self.dims)
        edge = self.gain * _kernels.scaled_absmax(points, self.half_widths)
        return np.maximum(edge, self.basin.loss_batch(points))

    def params_json(self):
        return {
            "gain": self.gain,
            "half_widths": [float(h) for h in self.half_widths],
            "basin": self.basin.params_json(),
        }


class FlatSafe:
    """Constant loss surface."""

    kind = "flat_safe"

    def __init__(self, value, dims):
        self.value = _finite(value, "value")
        dims = int(dims)
        if dims < 1:
            raise LandscapeError("dims must be >= 1")
        self._dims = dims

    @property
    def dims(self):
        return self._dims

    def loss_batch(self, points):
        points = _as_points(points, self.dims)
        return np.full(points.shape[0], self.value, dtype=np.float64)

    def params_json(self):
        return {"value": self.value}


def _basin_from_params(params, dims, where="basin"):
    try:
        b = Basin(params["amplitude"], params["center"], params["scale"])
    except KeyError as exc:
        raise LandscapeError(f"{where}: missing parameter {exc.args[0]!r}") from None
    if dims is not None and b.dims != dims:
        raise LandscapeError(
            f"{where}: center has {b.dims} dims, domain has {dims}"
        )
    return b


def from_params(kind, params, dims=None):
    """Build a landscape from its JSON parameter form.

    `dims` (when given) is checked against vector-valued parameters and is
    required for flat_safe, which has no vector parameter of its own.
    """
    if not isinstance(params, dict):
        raise LandscapeError(f"{kind}: params must be an object")
    if kind == "basin":
        return _basin_from_params(params, dims)
    if kind == "multi_basin":
        raw = params.get("basins")
        if not isinstance(raw, list) or not raw:
            raise LandscapeError("multi_basin: 'basins' must be a non-empty list")
        basins = [
            _basin_from_params(p, dims, where=f"basins[{k}]")
            for k, p in enumerate(raw)
        ]
        return MultiBasin(basins)
    if kind == "ridge":
        try:
            r = Ridge(params["amplitude"], params["direction"], params["offset"],
                      params["scale"])
        except KeyError as exc:
            raise LandscapeError(f"ridge: missing parameter {exc.args[0]!r}") from None
        if dims is not None and r.dims != dims:
            raise LandscapeError(f"ridge: direction has {r.dims} dims, domain has {dims}")
        return r
    if kind == "edge_trap":
        try:
            gain = params["gain"]
            half_widths = params["half_widths"]
            basin_params = params["basin"]
        except KeyError as exc:
            raise LandscapeError(f"edge_trap: missing parameter {exc.args[0]!r}") from None
        basin = _basin_from_params(basin_params, None, where="edge_trap.basin")
        trap = EdgeTrap(gain, half_widths, basin)
        if dims is not None and trap.dims != dims:
            raise LandscapeError(
                f"edge_trap: half_widths has {trap.dims} dims, domain has {dims}"
            )
        return trap
    if kind == "flat_safe":
        if dims is None:
            raise LandscapeError("flat_safe: dims required")
        try:
            return FlatSafe(params["value"], dims)
        except KeyError as exc:
            raise LandscapeError(f"flat_safe: missing parameter {exc.args[0]!r}") from None
    raise LandscapeError(
        f"unknown landscape {kind!r}; known kinds: {', '.join(sorted(CATALOG))}"
    )


CATALOG = {
    "basin": {
        "params": {"amplitude": "real", "center": "vector", "scale": "real > 0"},
        "adversarial_set": "ball of radius scale*sqrt(2 ln(amplitude/T)) around "
                           "center when amplitude > T, else empty",
    },
    "multi_basin": {
        "params": {"basins": "list of basin params"},
        "adversarial_set": "union of the basins' super-threshold balls; "
                           "disjoint components when far separated",
    },
    "ridge": {
        "params": {"amplitude": "real", "direction": "vector", "offset": "real",
                   "scale": "real > 0"},
        "adversarial_set": "slab |direction . p - offset| < scale*sqrt(2 ln(amplitude/T)) "
                           "when amplitude > T, else empty",
    },
    "edge_trap": {
        "params": {"gain": "real > 0", "half_widths": "vector > 0",
                   "basin": "basin params"},
        "adversarial_set": "the interior basin's super-threshold ball (choose "
                           "gain <= T so the boundary stays non-adversarial)",
    },
    "flat_safe": {
        "params": {"value": "real"},
        "adversarial_set": "empty when value <= T",
    },
}


def builtin_catalog():
    """Descriptors of the built-in landscape families: (kind, parameter
    schema, adversarial-set documentation)."""
    return [
        {"kind": kind, **CATALOG[kind]}
        for kind in ("basin", "multi_basin", "ridge", "edge_trap", "flat_safe")
    ]
