"""Semicircle law, classical eigenvalue locations and fluctuation scales.

Everything is in the normalisation where the spectrum fills ``[-1, 1]`` and
the limiting density is ``(2/pi) sqrt(1 - t^2)``.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, EdgeRegimeError

__all__ = [
    "semicircle_density",
    "semicircle_cdf",
    "semicircle_quantile",
    "classical_location",
    "bulk_sigma",
    "edge_center_scale",
    "expected_count",
    "edge_measure_density",
]


def semicircle_density(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) <= 1.0
    return np.where(inside, (2.0 / np.pi) * np.sqrt(np.clip(1.0 - t * t, 0.0, None)), 0.0)


def _half_mass(t):
    # G(t) - 1/2 for |t| <= 1
    return (t * np.sqrt(1.0 - t * t) + np.arcsin(t)) / np.pi


def semicircle_cdf(t):
    """``G(t) = 1/2 + (t sqrt(1-t^2) + asin t) / pi`` on ``[-1, 1]``, clamped outside."""
    t = np.asarray(t, dtype=float)
    c = np.clip(t, -1.0, 1.0)
    out = np.clip(0.5 + _half_mass(c), 0.0, 1.0)
    return out if out.ndim else float(out)


def semicircle_quantile(p):
    """Inverse of :func:`semicircle_cdf` for ``0 < p < 1``.

    Solved for ``|p - 1/2|`` on ``[0, 1]`` and reflected, so the result is
    exactly odd: ``G^{-1}(1 - p) == -G^{-1}(p)``.
    """
    p = np.asarray(p, dtype=float)
    if np.any(~((p > 0.0) & (p < 1.0))):
        raise DomainError("semicircle_quantile needs 0 < p < 1")
    q = np.abs(p - 0.5)
    lo = np.zeros_like(q)
    hi = np.ones_like(q)
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        below = _half_mass(mid) < q
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(3):
        slope = (2.0 / np.pi) * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
        step = np.divide(_half_mass(t) - q, slope, out=np.zeros_like(t), where=slope > 1e-8)
        t = np.clip(t - step, lo, hi)
    t = np.where(q == 0.0, 0.0, np.copysign(t, p - 0.5))
    return t if t.ndim else float(t)


def classical_location(k: int, n: int) -> float:
    """``G^{-1}(k/n)``, the first-order position of the k-th smallest eigenvalue."""
    if not (1 <= k <= n - 1):
        raise DomainError(f"classical_location needs 1 <= k <= n-1, got k={k}, n={n}")
    return semicircle_quantile(k / n)


def bulk_sigma(k: int, n: int) -> float:
    """Fluctuation scale of the k-th GUE eigenvalue, ``sqrt(ln n / (8 n^2 (1 - t^2)))``.

    This is the bulk CLT scale ``(ln n / (4 (1 - t^2) n))^{1/2}`` quoted for a
    spectrum with edge ``sqrt(2n)``, divided by ``sqrt(2n)``.
    """
    if n < 3:
        raise DomainError("bulk_sigma needs n >= 3")
    t = classical_location(k, n)
    if abs(t) > 0.99:
        raise EdgeRegimeError(
            f"classical location {t:.4f} of k={k} is in the edge regime; use edge_center_scale"
        )
    return math.sqrt(math.log(n) / (8.0 * n * n * (1.0 - t * t)))


def edge_center_scale(k: int, n: int) -> tuple[float, float]:
    """Centre and scale of eigenvalue number ``n - k`` (k eigenvalues above it).

    ``1 - (3 pi k / (4 sqrt(2) n))^{2/3}`` and
    ``((1/(12 pi))^{2/3} ln k / (n^{1/3} k^{2/3}))^{1/2} / sqrt(2n)``.
    """
    if k < 2:
        raise DomainError("edge_center_scale needs k >= 2 so that ln k > 0")
    if k >= n:
        raise DomainError(f"edge_center_scale needs k < n, got k={k}, n={n}")
    center = 1.0 - (3.0 * math.pi * k / (4.0 * math.sqrt(2.0) * n)) ** (2.0 / 3.0)
    var = (1.0 / (12.0 * math.pi)) ** (2.0 / 3.0) * math.log(k) / (n ** (1.0 / 3.0) * k ** (2.0 / 3.0))
    return center, math.sqrt(var) / math.sqrt(2.0 * n)


def expected_count(interval, n: int) -> float:
    """``n (G(b) - G(a))``: mean number of eigenvalues in ``[a, b]`` to first order."""
    a, b = interval
    if not a < b:
        raise DomainError(f"expected_count needs a < b, got [{a}, {b}]")
    return n * (semicircle_cdf(b) - semicircle_cdf(a))


def edge_measure_density(x):
    """Limit density ``(2 sqrt 2 / pi) sqrt(x)`` of the rescaled edge measure (0 for x < 0)."""
    x = np.asarray(x, dtype=float)
    out = np.where(x >= 0.0, (2.0 * math.sqrt(2.0) / math.pi) * np.sqrt(np.clip(x, 0.0, None)), 0.0)
    return out if out.ndim else float(out)
