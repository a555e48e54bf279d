"""Independent brute-force references.

Nothing here calls into :mod:`rmtlab.laws` or :mod:`rmtlab.spectra`: the
Fredholm determinant uses SciPy's Airy routine, the small-n quadrature
writes out the joint density itself, and the shell probability has its own
incomplete-gamma evaluation.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.linalg
from scipy.special import airy as scipy_airy

from .errors import ConfigurationError, DomainError, OracleError
from .ensembles import ShellSpec

__all__ = [
    "airy_kernel_fredholm_tw2",
    "smalln_event_probability",
    "regularized_gamma_p",
    "regularized_gamma_q",
    "chi_sum_probability",
    "chi_shell_probability",
]

FREDHOLM_LENGTH = 20.0


def airy_kernel_fredholm_tw2(x: float, order: int = 120, check: bool = False) -> float:
    """``det(I - K_Airy)`` on ``[x, x + 20]`` by Gauss-Legendre Nystrom discretisation.

    With ``check=True`` the value is recomputed at ``order // 2`` nodes and an
    ``OracleError`` is raised if the two differ by more than 1e-8.
    """
    if not -10.0 <= x <= 8.0:
        raise DomainError(f"airy_kernel_fredholm_tw2 needs -10 <= x <= 8, got {x}")
    if not 20 <= order <= 200:
        raise DomainError(f"order must be in [20, 200], got {order}")
    value = _fredholm(x, order)
    if check:
        coarse = _fredholm(x, order // 2)
        if abs(value - coarse) > 1e-8:
            raise OracleError(
                f"Fredholm determinant not converged at x={x}: {value} vs {coarse} (order {order})"
            )
    return value


def _fredholm(x, m):
    nodes, weights = np.polynomial.legendre.leggauss(m)
    half = FREDHOLM_LENGTH / 2.0
    s = x + half * (nodes + 1.0)
    w = half * weights
    ai, aip, _, _ = scipy_airy(s)
    ds = s[:, None] - s[None, :]
    np.fill_diagonal(ds, 1.0)
    kern = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / ds
    np.fill_diagonal(kern, aip * aip - s * ai * ai)
    root = np.sqrt(w)
    mat = np.eye(m) - root[:, None] * kern * root[None, :]
    lu, piv = scipy.linalg.lu_factor(mat, check_finite=False)
    swaps = np.count_nonzero(piv != np.arange(m))
    det = float(np.prod(np.diag(lu)))
    return -det if swaps % 2 else det


def _gl_segments(lo, hi, breaks, nodes, weights):
    """Composite Gauss-Legendre points on ``[lo, hi]`` split at ``breaks`` (per-point arrays)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    cuts = [lo] + [np.clip(b, lo, hi) for b in sorted(breaks)] + [hi]
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        xs.append(mid[..., None] + half[..., None] * nodes)
        ws.append(half[..., None] * weights)
    return np.concatenate(xs, axis=-1), np.concatenate(ws, axis=-1)


def _ordered_integral(n, beta, k, a, b, box, m):
    # integral of prod_{i<j} (x_j - x_i)^beta exp(-beta n sum x^2) over
    # -box < x_1 < ... < x_n < box with a <= x_k <= b
    nodes, weights = np.polynomial.legendre.leggauss(m)
    breaks = sorted({a, b, -1.0, 1.0})

    def limits(level, lower):
        hi = np.full(np.shape(lower), box)
        lo = np.asarray(lower, dtype=float)
        if level == k - 1:
            lo = np.maximum(lo, a)
            hi = np.maximum(np.minimum(hi, b), lo)
        return lo, hi

    def inner(prefix, lower, first):
        # vectorise the remaining (at most two) levels
        coords = []
        weight = np.ones(())
        for level in range(first, n):
            lo, hi = limits(level, lower)
            x, w = _gl_segments(lo, hi, breaks, nodes, weights)
            coords = [c[..., None] for c in coords] + [x]
            weight = weight[..., None] * w
            lower = x
        allc = [np.full(coords[-1].shape, p) for p in prefix] + [
            np.broadcast_to(c, coords[-1].shape) for c in coords
        ]
        logd = -beta * n * sum(c * c for c in allc)
        vand = np.ones(coords[-1].shape)
        for i in range(n):
            for j in range(i + 1, n):
                vand = vand * np.abs(allc[j] - allc[i]) ** beta
        return float(np.sum(weight * vand * np.exp(logd)))

    if n <= 2:
        return inner([], np.full((), -box), 0)
    lo, hi = limits(0, np.full((), -box))
    x1, w1 = _gl_segments(lo, hi, breaks, nodes, weights)
    return sum(wi * inner([xi], np.full((), xi), 1) for xi, wi in zip(x1, w1))


def smalln_event_probability(n: int, beta: int, k: int, interval, tol: float = 1e-6) -> float:
    """``P(a <= lambda_k <= b)`` for the ``n <= 3`` GOE/GUE by direct quadrature.

    The joint density ``prod |l_i - l_j|^beta exp(-beta n sum l_i^2)`` is
    integrated over the ordered region with nested composite Gauss-Legendre
    rules whose node count doubles until two refinements agree to ``tol``.
    ``k`` is 1-based in ascending order.
    """
    if not 1 <= n <= 3:
        raise DomainError(f"smalln_event_probability supports n <= 3, got {n}")
    if beta not in (1, 2):
        raise ConfigurationError(f"beta must be 1 or 2, got {beta}")
    if not 1 <= k <= n:
        raise DomainError(f"k must be in 1..{n}, got {k}")
    a, b = (float(v) for v in interval)
    if not a <= b:
        raise DomainError("interval must satisfy a <= b")
    # tail mass beyond the box is ~exp(-beta n box^2), far below 1e-12
    box = max(2.0, 0.5 + math.sqrt(32.0 / (beta * n)))
    a, b = max(a, -box), min(b, box)
    if a >= b:
        return 0.0
    prev = None
    for m in (12, 24, 48):
        z = _ordered_integral(n, beta, 1, -box, box, box, m)
        p = _ordered_integral(n, beta, k, a, b, box, m) / z
        if prev is not None and abs(p - prev) < tol:
            return min(max(p, 0.0), 1.0)
        prev = p
    raise OracleError(f"small-n quadrature did not converge (last change {abs(p - prev):.2e})")


def _gamma_series(a, x):
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    else:
        raise OracleError("incomplete gamma series did not converge")
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a, x):
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise OracleError("incomplete gamma continued fraction did not converge")
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def regularized_gamma_p(a: float, x: float) -> float:
    """Lower regularised incomplete gamma ``P(a, x)``."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def regularized_gamma_q(a: float, x: float) -> float:
    """Upper regularised incomplete gamma ``Q(a, x) = 1 - P(a, x)``."""
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def chi_sum_probability(d: int, lo: float, hi: float) -> float:
    """``P(lo <= S <= hi)`` for ``S = sum of d i.i.d. N(0, 1/4)^2``, i.e. ``S ~ chi2_d / 4``."""
    if hi <= lo:
        return 0.0
    a = d / 2.0
    xl, xh = 2.0 * max(lo, 0.0), 2.0 * hi
    if xl >= a + 1.0:
        return max(regularized_gamma_q(a, xl) - regularized_gamma_q(a, xh), 0.0)
    return max(regularized_gamma_p(a, xh) - regularized_gamma_p(a, xl), 0.0)


def chi_shell_probability(n: int, shell: ShellSpec) -> float:
    """Probability that a Gaussian raw matrix (entries ``N(0, 1/4)``) lies in ``shell``."""
    lo, hi = shell.bounds(n)
    return chi_sum_probability(n * (n + 1) // 2, lo, hi)
