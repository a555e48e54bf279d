"""Reference laws: semicircle, Airy / Painleve II / Tracy-Widom, sine kernels."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from ..errors import ConfigurationError
from .airy import airy
from .kernels import joint_logdensity, joint_logdensity_grad, r_k_det, sine_kernel
from .painleve import (
    PainleveSolution,
    adaptive_simpson,
    default_solution,
    hastings_mcleod,
    left_asymptote,
    tw2_cdf,
)
from .semicircle import (
    bulk_sigma,
    classical_location,
    edge_center_scale,
    edge_measure_density,
    expected_count,
    semicircle_cdf,
    semicircle_density,
    semicircle_quantile,
)


@dataclass(frozen=True)
class ReferenceCdf:
    """A named reference distribution function, callable on scalars or arrays."""

    kind: str
    fn: Callable

    def __call__(self, x):
        return self.fn(x)

    @classmethod
    def of(cls, kind: str) -> "ReferenceCdf":
        table = {
            "semicircle": semicircle_cdf,
            "std_normal": ndtr,
            "tracy_widom_2": _clamped_tw2,
        }
        if kind not in table:
            raise ConfigurationError(f"unknown reference CDF {kind!r}; expected one of {sorted(table)}")
        return cls(kind, table[kind])


def _clamped_tw2(x):
    # outside [-10, 8] F2 is 0 or 1 to well below double precision
    arr = np.asarray(x, dtype=float)
    out = tw2_cdf(np.clip(arr, -10.0, 8.0))
    out = np.where(arr < -10.0, 0.0, np.where(arr > 8.0, 1.0, out))
    return out if out.ndim else float(out)


__all__ = [
    "ReferenceCdf",
    "airy",
    "adaptive_simpson",
    "bulk_sigma",
    "classical_location",
    "default_solution",
    "edge_center_scale",
    "edge_measure_density",
    "expected_count",
    "hastings_mcleod",
    "joint_logdensity",
    "joint_logdensity_grad",
    "left_asymptote",
    "PainleveSolution",
    "r_k_det",
    "semicircle_cdf",
    "semicircle_density",
    "semicircle_quantile",
    "sine_kernel",
    "tw2_cdf",
]
