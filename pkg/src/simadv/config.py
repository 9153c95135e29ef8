"""Run configuration: a single JSON document describing one run.

Shape:

    {
      "domain": [{"name": "shape0", "lower": -2.0, "upper": 2.0}, ...],
      "sut": {
        "builtin": {"landscape": "basin", "params": {...}},
        ...or "external": {"command": "...", "args": [...],
                           "handshake_timeout": 10.0, "eval_timeout": 30.0,
                           "max_restarts": 0},
        "score_sign": "loss-as-is" | "negate-score",      (optional)
        "noise": {"std": 0.01, "seed": 0}                 (optional, builtin)
      },
      "threshold": 0.5,
      "seed": 0,
      "out": "runs/demo",                                 (optional)
      <exactly one of>
      "search":    {"batch_size", "max_iters", "learning_rate", "variance",
                    "baseline_decay", "init_mode"},
      "baseline":  {"method": "uniform"|"gaussian"|"random-opt", "budget",
                    "center"?},
      "region":    {"spacing", "seed_params"?, "cap"?},
      "landscape": {"axes": [i, j] (indices or names), "resolution": [ri, rj],
                    "fixed"?},
      "bench":     {"methods": [{"method": ...,
                    per-method knobs}...], "runs_per_method", "budget"}
    }

Validation reports the first offending field by path. parse_config returns a
RunConfig whose `resolved` dict echoes the config with every default filled
in; the CLI writes it as the run manifest.
"""
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from . import landscapes
from .baselines import METHODS as BASELINE_METHODS
from .domain import ParameterDomain
from .errors import ConfigError, DomainError, LandscapeError
from .external import ExternalSut, ProcessConfig
from .search import ADV_TESTING_TAG, INIT_MODES
from .sut import SCORE_SIGNS, BuiltinSut, NoisySut

METHOD_SECTIONS = ("search", "baseline", "region", "landscape", "bench")

BENCH_METHODS = (ADV_TESTING_TAG, *BASELINE_METHODS)

SEARCH_DEFAULTS = {
    "batch_size": 8,
    "max_iters": 200,
    "learning_rate": 0.05,
    "variance": 0.05,
    "baseline_decay": 0.9,
    "init_mode": "uniform-random",
}


def _require(obj, key, path):
    if key not in obj:
        raise ConfigError(f"{path}: missing required field {key!r}")
    return obj[key]


def _as_object(value, path):
    if not isinstance(value, dict):
        raise ConfigError(f"{path}: expected an object")
    return value


def _as_list(value, path):
    if not isinstance(value, list):
        raise ConfigError(f"{path}: expected a list")
    return value


def _as_number(value, path, finite=True):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if finite and not math.isfinite(value):
        raise ConfigError(f"{path}: must be finite, got {value!r}")
    return float(value)


def _as_int(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{path}: must be >= {minimum}, got {value}")
    return value


def _as_vector(value, path, dims):
    value = _as_list(value, path)
    if len(value) != dims:
        raise ConfigError(f"{path}: expected {dims} values, got {len(value)}")
    return [_as_number(v, f"{path}[{k}]") for k, v in enumerate(value)]


def _as_choice(value, path, choices):
    if value not in choices:
        raise ConfigError(
            f"{path}: expected one of {', '.join(map(repr, choices))}, "
            f"got {value!r}"
        )
    return value


@dataclass
class RunConfig:
    domain: ParameterDomain
    sut_section: dict      # validated, defaults applied
    threshold: float
    seed: int
    out: str | None
    method: str            # which method section is present
    method_cfg: dict       # validated, defaults applied
    resolved: dict         # full echo for the manifest


def _parse_domain(doc):
    items = _as_list(_require(doc, "domain", "config"), "domain")
    if not items:
        raise ConfigError("domain: must have at least one dimension")
    parsed = []
    for k, item in enumerate(items):
        item = _as_object(item, f"domain[{k}]")
        name = _require(item, "name", f"domain[{k}]")
        lower = _as_number(_require(item, "lower", f"domain[{k}]"),
                           f"domain[{k}].lower")
        upper = _as_number(_require(item, "upper", f"domain[{k}]"),
                           f"domain[{k}].upper")
        parsed.append({"name": str(name), "lower": lower, "upper": upper})
    try:
        return ParameterDomain.from_json(parsed), parsed
    except DomainError as exc:
        raise ConfigError(f"domain: {exc}") from exc


def _parse_sut(doc, domain):
    section = _as_object(_require(doc, "sut", "config"), "sut")
    _no_unknown(section, ("builtin", "external", "score_sign", "noise"), "sut")
    has_builtin = "builtin" in section
    has_external = "external" in section
    if has_builtin == has_external:
        raise ConfigError(
            "sut: exactly one of 'builtin' or 'external' must be present"
        )
    score_sign = _as_choice(section.get("score_sign", "loss-as-is"),
                            "sut.score_sign", SCORE_SIGNS)
    resolved = {"score_sign": score_sign}
    if has_builtin:
        builtin = _as_object(section["builtin"], "sut.builtin")
        _no_unknown(builtin, ("landscape", "params"), "sut.builtin")
        kind = _require(builtin, "landscape", "sut.builtin")
        params = _as_object(_require(builtin, "params", "sut.builtin"),
                            "sut.builtin.params")
        try:
            landscape = landscapes.from_params(kind, params, dims=domain.dims)
        except LandscapeError as exc:
            raise ConfigError(f"sut.builtin: {exc}") from exc
        resolved["builtin"] = {"landscape": kind,
                               "params": landscape.params_json()}
        if "noise" in section:
            noise = _as_object(section["noise"], "sut.noise")
            _no_unknown(noise, ("std", "seed"), "sut.noise")
            std = _as_number(_require(noise, "std", "sut.noise"),
                             "sut.noise.std")
            if std < 0:
                raise ConfigError("sut.noise.std: must be >= 0")
            noise_seed = _as_int(noise.get("seed", 0), "sut.noise.seed")
            resolved["noise"] = {"std": std, "seed": noise_seed}
    else:
        ext = _as_object(section["external"], "sut.external")
        _no_unknown(ext, ("command", "args", "handshake_timeout",
                          "eval_timeout", "max_restarts"), "sut.external")
        command = str(_require(ext, "command", "sut.external"))
        args = [str(a) for a in _as_list(ext.get("args", []),
                                         "sut.external.args")]
        handshake = _as_number(ext.get("handshake_timeout", 10.0),
                               "sut.external.handshake_timeout")
        eval_timeout = _as_number(ext.get("eval_timeout", 30.0),
                                  "sut.external.eval_timeout")
        if handshake <= 0:
            raise ConfigError("sut.external.handshake_timeout: must be > 0")
        if eval_timeout <= 0:
            raise ConfigError("sut.external.eval_timeout: must be > 0")
        max_restarts = _as_int(ext.get("max_restarts", 0),
                               "sut.external.max_restarts", minimum=0)
        if "noise" in section:
            raise ConfigError("sut.noise: only supported for builtin SUTs")
        resolved["external"] = {
            "command": command,
            "args": args,
            "handshake_timeout": handshake,
            "eval_timeout": eval_timeout,
            "max_restarts": max_restarts,
        }
    return resolved


def _no_unknown(section, allowed, path):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"{path}: unknown field {sorted(unknown)[0]!r}")


def _search_knobs(section, path, with_max_iters=True):
    """Shared validation for the search section and bench method entries."""
    out = dict(SEARCH_DEFAULTS)
    if not with_max_iters:
        del out["max_iters"]
    out["batch_size"] = _as_int(section.get("batch_size", out["batch_size"]),
                                f"{path}.batch_size", minimum=1)
    if with_max_iters:
        out["max_iters"] = _as_int(section.get("max_iters", out["max_iters"]),
                                   f"{path}.max_iters", minimum=1)
    for key in ("learning_rate", "variance", "baseline_decay"):
        out[key] = _as_number(section.get(key, out[key]), f"{path}.{key}")
    if out["learning_rate"] <= 0:
        raise ConfigError(f"{path}.learning_rate: must be > 0")
    if out["variance"] <= 0:
        raise ConfigError(f"{path}.variance: must be > 0")
    if not 0.0 <= out["baseline_decay"] < 1.0:
        raise ConfigError(f"{path}.baseline_decay: must be in [0, 1)")
    out["init_mode"] = _as_choice(section.get("init_mode", out["init_mode"]),
                                  f"{path}.init_mode", INIT_MODES)
    return out


def _parse_search(section, domain):
    _no_unknown(section, SEARCH_DEFAULTS, "search")
    return _search_knobs(section, "search")


def _parse_baseline(section, domain):
    _no_unknown(section, ("method", "budget", "center"), "baseline")
    method = _as_choice(_require(section, "method", "baseline"),
                        "baseline.method", BASELINE_METHODS)
    out = {
        "method": method,
        "budget": _as_int(_require(section, "budget", "baseline"),
                          "baseline.budget", minimum=1),
    }
    if "center" in section:
        if method != "gaussian":
            raise ConfigError("baseline.center: only valid for the gaussian method")
        out["center"] = _as_vector(section["center"], "baseline.center",
                                   domain.dims)
    return out


def _parse_region(section, domain):
    _no_unknown(section, ("spacing", "seed_params", "cap"), "region")
    spacing = _as_number(_require(section, "spacing", "region"),
                         "region.spacing")
    if spacing <= 0:
        raise ConfigError("region.spacing: must be > 0")
    out = {
        "spacing": spacing,
        "cap": _as_int(section.get("cap", 100_000), "region.cap", minimum=1),
    }
    if "seed_params" in section:
        seed_params = _as_vector(section["seed_params"], "region.seed_params",
                                 domain.dims)
        if not domain.contains(np.array(seed_params)):
            raise ConfigError("region.seed_params: must lie inside the domain")
        out["seed_params"] = seed_params
    return out


def _resolve_axis(value, path, domain):
    if isinstance(value, str):
        if value not in domain.names:
            raise ConfigError(f"{path}: unknown dimension name {value!r}")
        return domain.names.index(value)
    return _as_int(value, path, minimum=0)


def _parse_landscape(section, domain):
    _no_unknown(section, ("axes", "resolution", "fixed"), "landscape")
    axes = _as_list(_require(section, "axes", "landscape"), "landscape.axes")
    if len(axes) != 2:
        raise ConfigError("landscape.axes: expected exactly two axes")
    axis_i = _resolve_axis(axes[0], "landscape.axes[0]", domain)
    axis_j = _resolve_axis(axes[1], "landscape.axes[1]", domain)
    for k, axis in enumerate((axis_i, axis_j)):
        if axis >= domain.dims:
            raise ConfigError(
                f"landscape.axes[{k}]: index {axis} out of range "
                f"[0, {domain.dims})"
            )
    if axis_i == axis_j:
        raise ConfigError("landscape.axes: the two axes must differ")
    res = _as_list(_require(section, "resolution", "landscape"),
                   "landscape.resolution")
    if len(res) != 2:
        raise ConfigError("landscape.resolution: expected [res_i, res_j]")
    res_i = _as_int(res[0], "landscape.resolution[0]", minimum=2)
    res_j = _as_int(res[1], "landscape.resolution[1]", minimum=2)
    if "fixed" in section:
        fixed = _as_vector(section["fixed"], "landscape.fixed", domain.dims)
        if not domain.contains(np.array(fixed)):
            raise ConfigError("landscape.fixed: must lie inside the domain")
    else:
        fixed = [float(x) for x in domain.midpoint()]
    return {"axes": [axis_i, axis_j], "resolution": [res_i, res_j],
            "fixed": fixed}


def _parse_bench(section, domain):
    _no_unknown(section, ("methods", "runs_per_method", "budget"), "bench")
    methods = _as_list(_require(section, "methods", "bench"), "bench.methods")
    if not methods:
        raise ConfigError("bench.methods: must not be empty")
    parsed_methods = []
    for k, m in enumerate(methods):
        path = f"bench.methods[{k}]"
        m = _as_object(m, path)
        method = _as_choice(_require(m, "method", path),
                            f"{path}.method", BENCH_METHODS)
        if method == ADV_TESTING_TAG:
            # max_iters is derived from the budget, so it is not accepted here
            knobs = tuple(k for k in SEARCH_DEFAULTS if k != "max_iters")
            _no_unknown(m, ("method", *knobs), path)
            entry = {"method": method,
                     **_search_knobs(m, path, with_max_iters=False)}
        elif method == "gaussian":
            _no_unknown(m, ("method", "center"), path)
            entry = {"method": method}
            if "center" in m:
                entry["center"] = _as_vector(m["center"], f"{path}.center",
                                             domain.dims)
        else:
            _no_unknown(m, ("method",), path)
            entry = {"method": method}
        parsed_methods.append(entry)
    budget = _as_int(_require(section, "budget", "bench"), "bench.budget",
                     minimum=1)
    for k, entry in enumerate(parsed_methods):
        if entry["method"] == ADV_TESTING_TAG:
            if budget % entry["batch_size"] != 0:
                raise ConfigError(
                    f"bench.budget: {budget} is not a multiple of "
                    f"bench.methods[{k}].batch_size ({entry['batch_size']})"
                )
    return {
        "methods": parsed_methods,
        "runs_per_method": _as_int(_require(section, "runs_per_method", "bench"),
                                   "bench.runs_per_method", minimum=1),
        "budget": budget,
    }


_METHOD_PARSERS = {
    "search": _parse_search,
    "baseline": _parse_baseline,
    "region": _parse_region,
    "landscape": _parse_landscape,
    "bench": _parse_bench,
}


def parse_config_dict(doc):
    doc = _as_object(doc, "config")
    domain, domain_json = _parse_domain(doc)
    sut_section = _parse_sut(doc, domain)
    threshold = _as_number(_require(doc, "threshold", "config"), "threshold")
    seed = _as_int(doc.get("seed", 0), "seed")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out: expected a string path")

    present = [m for m in METHOD_SECTIONS if m in doc]
    if len(present) != 1:
        raise ConfigError(
            "config: exactly one method section required among "
            f"{', '.join(METHOD_SECTIONS)}; found {present or 'none'}"
        )
    method = present[0]
    method_cfg = _METHOD_PARSERS[method](
        _as_object(doc[method], method), domain
    )

    unknown = set(doc) - {"domain", "sut", "threshold", "seed", "out", method}
    if unknown:
        raise ConfigError(f"config: unknown field {sorted(unknown)[0]!r}")

    resolved = {
        "domain": domain_json,
        "sut": sut_section,
        "threshold": threshold,
        "seed": seed,
        method: method_cfg,
    }
    if out is not None:
        resolved["out"] = out
    return RunConfig(domain, sut_section, threshold, seed, out, method,
                     method_cfg, resolved)


def parse_config(path):
    """Load and validate a run-config file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config_dict(doc)


def build_sut(cfg, jobs=1):
    """Instantiate the configured system under test. External SUTs hold a
    live session pool; call close() (or use as a context manager)."""
    section = cfg.sut_section
    if "builtin" in section:
        landscape = landscapes.from_params(
            section["builtin"]["landscape"], section["builtin"]["params"],
            dims=cfg.domain.dims,
        )
        sut = BuiltinSut(landscape, score_sign=section["score_sign"])
        if "noise" in section:
            sut = NoisySut(sut, section["noise"]["std"],
                           seed=section["noise"]["seed"])
        return sut
    ext = section["external"]
    return ExternalSut(
        ProcessConfig(
            ext["command"], ext["args"],
            handshake_timeout=ext["handshake_timeout"],
            eval_timeout=ext["eval_timeout"],
            max_restarts=ext["max_restarts"],
        ),
        dims=cfg.domain.dims,
        score_sign=section["score_sign"],
        jobs=jobs,
    )
