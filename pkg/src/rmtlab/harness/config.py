"""Declarative experiment configuration.

An experiment is a kind, a size, a replicate count, an ensemble spec, a
master seed and a small map of kind-specific parameters.  Tolerances are
ordinary parameters whose defaults are the acceptance thresholds, so the
test suite and exploratory CLI runs go through the same code path.

Configs can also be read from an INI file, one section per experiment::

    [edge]
    kind = edge-tw
    n = 400
    reps = 2000
    dist = gue
    seed = 7
    ref = rademacher

Keys other than the core fields are treated as parameters.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..ensembles import parse_dist
from ..errors import ConfigurationError

__all__ = ["ExperimentConfig", "KIND_PARAMS", "EXPERIMENT_KINDS", "load_config", "parse_param"]

REQUIRED = object()
TRACE_MOMENT_LIMIT = 2.0**1.5 / math.sqrt(math.pi)


def _float_list(text) -> tuple[float, ...]:
    if isinstance(text, (tuple, list)):
        return tuple(float(v) for v in text)
    return tuple(float(v) for v in str(text).split(",") if v.strip())


# name -> (parser, default); REQUIRED marks parameters without a default
KIND_PARAMS: dict[str, dict[str, tuple[Any, Any]]] = {
    "semicircle": {"tol": (float, 0.02)},
    "bulk-clt": {"k": (int, REQUIRED), "tol": (float, 0.05)},
    "universality": {
        "k": (int, REQUIRED),
        "ref": (str, "goe"),
        "b": (float, -1.0),
        "c": (float, 1.0),
        "alpha": (float, 0.01),
        "se_mult": (float, 3.0),
    },
    "edge-tw": {"ref": (str, ""), "tol": (float, 0.08), "alpha": (float, 0.01)},
    "edge-measure": {
        "r_exp": (float, REQUIRED),
        "bins": (int, 8),
        "x_max": (float, 2.0),
        "tol": (float, 0.15),
    },
    "trace-moment": {"p": (int, 0), "target": (float, TRACE_MOMENT_LIMIT), "rel_tol": (float, 0.15)},
    "pair-correlation": {
        "half_width": (float, 0.05),
        "bins": (int, 30),
        "y_max": (float, 3.0),
        "tol": (float, 0.1),
    },
    "gap-correlation": {
        "theta": (float, 0.5),
        "thetas": (_float_list, (0.25, 0.5, 0.75)),
        "tol": (float, 0.15),
    },
    "prop-shell": {"m1": (float, REQUIRED), "m2": (float, REQUIRED), "se_mult": (float, 3.0)},
    "prop-volume-ratio": {
        "m1": (float, REQUIRED),
        "m2": (float, REQUIRED),
        "k": (int, 0),
        "lo": (float, -0.05),
        "hi": (float, 0.05),
        "se_mult": (float, 3.0),
    },
    "tw-table": {"grid": (str, "-8:6:0.1")},
}
EXPERIMENT_KINDS = tuple(KIND_PARAMS)

# kinds that never touch the ensemble sampler
_NO_DIST = {"prop-shell", "prop-volume-ratio", "tw-table"}


def parse_param(text: str) -> tuple[str, str]:
    """Split a ``key=value`` command-line parameter."""
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigurationError(f"parameters must look like key=value, got {text!r}")
    return key, value.strip()


@dataclass(frozen=True, eq=True)
class ExperimentConfig:
    """One experiment.

    ``params`` is normalised on construction: values are parsed to their
    declared types and defaults are filled in, so two configs that differ
    only in spelling (``tol=0.05`` vs ``tol=5e-2``) compare and serialise
    identically.  Validation happens here, before any sampling.
    """

    kind: str
    n: int = 1
    reps: int = 1
    dist: str = "gaussian"
    seed: int = 0
    workers: int = 1
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KIND_PARAMS:
            raise ConfigurationError(
                f"unknown experiment kind {self.kind!r}; expected one of {', '.join(EXPERIMENT_KINDS)}"
            )
        for name in ("n", "reps", "workers", "seed"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value:
                raise ConfigurationError(f"{name} must be an integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        if self.n < 1:
            raise ConfigurationError(f"n must be >= 1, got {self.n}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.kind not in _NO_DIST:
            # canonical spelling, and fail early on a bad spec
            object.__setattr__(self, "dist", str(parse_dist(self.dist)))
        object.__setattr__(self, "params", self._resolve_params(dict(self.params)))
        self._check_kind()

    def _resolve_params(self, given: dict) -> dict:
        spec = KIND_PARAMS[self.kind]
        unknown = sorted(set(given) - set(spec))
        if unknown:
            raise ConfigurationError(
                f"unknown parameter(s) for {self.kind}: {', '.join(unknown)}; "
                f"accepted: {', '.join(sorted(spec))}"
            )
        out = {}
        for name, (parse, default) in spec.items():
            if name in given:
                try:
                    out[name] = parse(given[name])
                except (TypeError, ValueError):
                    raise ConfigurationError(
                        f"parameter {name!r} for {self.kind} has invalid value {given[name]!r}"
                    ) from None
            elif default is REQUIRED:
                raise ConfigurationError(f"experiment {self.kind} requires parameter {name!r}")
            else:
                out[name] = default
        return out

    def _check_kind(self):
        p, n = self.params, self.n
        if self.kind in ("bulk-clt", "universality") and not 1 <= p["k"] <= n - 1:
            raise ConfigurationError(f"k must be in 1..n-1, got {p['k']}")
        if self.kind == "universality":
            parse_dist(p["ref"])
        if self.kind == "edge-tw" and p["ref"]:
            parse_dist(p["ref"])
        if self.kind == "edge-measure" and not 0 < p["r_exp"] <= 2.0 / 3.0:
            raise ConfigurationError(f"r_exp must be in (0, 2/3], got {p['r_exp']}")
        if self.kind == "trace-moment" and (p["p"] < 0 or p["p"] % 2):
            raise ConfigurationError(f"p must be a positive even integer (0 = automatic), got {p['p']}")
        if self.kind == "gap-correlation" and p["theta"] not in p["thetas"]:
            raise ConfigurationError("theta must be one of thetas")
        if self.kind in ("prop-shell", "prop-volume-ratio") and (p["m1"] <= 0 or p["m2"] <= 0):
            raise ConfigurationError("m1 and m2 must be positive")
        if self.kind == "prop-volume-ratio" and not p["lo"] <= p["hi"]:
            raise ConfigurationError("need lo <= hi")
        if self.kind == "tw-table":
            grid_points(p["grid"])

    def with_workers(self, workers: int) -> "ExperimentConfig":
        return ExperimentConfig(self.kind, self.n, self.reps, self.dist, self.seed, workers, dict(self.params))

    def echo(self) -> dict:
        """Config as plain data for the report.  ``workers`` is left out on purpose:
        the result must not depend on it."""
        params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.params.items())}
        return {
            "kind": self.kind,
            "n": self.n,
            "reps": self.reps,
            "dist": self.dist,
            "seed": self.seed,
            "params": params,
        }


def grid_points(text: str) -> list[float]:
    """Parse ``lo:hi:step`` into an inclusive grid."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ConfigurationError(f"grid must look like lo:hi:step, got {text!r}") from None
    if not (step > 0 and lo <= hi):
        raise ConfigurationError(f"grid needs lo <= hi and step > 0, got {text!r}")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


_CORE = {"kind", "n", "reps", "dist", "seed", "workers"}


def load_config(path, section: str | None = None, overrides: Mapping[str, Any] | None = None):
    """Read experiments from an INI file.

    Returns a dict ``{section_name: ExperimentConfig}``, or a single config
    when ``section`` is given.  A section without a ``kind`` key uses its
    own name as the kind.  ``overrides`` replaces core fields or params.
    """
    parser = configparser.ConfigParser(interpolation=None)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    names = parser.sections()
    if section is not None:
        if section not in names:
            raise ConfigurationError(f"no section [{section}] in {path}")
        names = [section]
    out = {}
    for name in names:
        raw = dict(parser[name])
        raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
        core = {k: raw.pop(k) for k in list(raw) if k in _CORE}
        core.setdefault("kind", name)
        for key in ("n", "reps", "seed", "workers"):
            if key in core:
                try:
                    core[key] = int(core[key])
                except ValueError:
                    raise ConfigurationError(f"[{name}] {key} must be an integer") from None
        out[name] = ExperimentConfig(params=raw, **core)
    return out[section] if section is not None else out
