"""Hastings-McLeod solution of Painleve II and the GUE Tracy-Widom CDF.

``u'' = t u + 2 u^3`` with ``u(t) ~ Ai(t)`` as ``t -> +inf``.  The solution is
shot downward from ``t_max`` with Airy boundary data.  Going left, errors in
that shot grow like ``exp((2 sqrt 2 / 3) |t|^{3/2})``, so below ``t = -2``
the solution is instead pinned between the shot value at ``-2`` and the
left asymptotic series at ``t_min`` and solved as a two-point boundary value
problem, which is well conditioned.

``F2(x) = exp(-int_x^inf (t - x) u(t)^2 dt)``; the integral is split into
precomputed per-cell adaptive-Simpson pieces on the solution grid plus an
exact Airy tail beyond ``t_max``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import CubicHermiteSpline

from ..errors import DomainError, NumericError
from .airy import airy

__all__ = [
    "PainleveSolution",
    "hastings_mcleod",
    "left_asymptote",
    "adaptive_simpson",
    "tw2_cdf",
    "default_solution",
]

T_MATCH = -2.0
GRID_STEP = 1.0 / 200.0
X_RANGE = (-10.0, 8.0)


def left_asymptote(t: float) -> tuple[float, float]:
    """``u ~ sqrt(-t/2) (1 + 1/(8t^3) - 73/(128t^6) + 10657/(1024t^9))`` and its derivative."""
    coefs = (1.0, 1.0 / 8.0, -73.0 / 128.0, 10657.0 / 1024.0)
    s = sum(c * t ** (-3 * i) for i, c in enumerate(coefs))
    ds = sum(-3 * i * c * t ** (-3 * i - 1) for i, c in enumerate(coefs) if i)
    root = math.sqrt(-t / 2.0)
    return root * s, -s / (4.0 * root) + root * ds


def _rhs(t, y):
    return np.vstack([y[1], t * y[0] + 2.0 * y[0] ** 3]) if np.ndim(y) == 2 else [
        y[1],
        t * y[0] + 2.0 * y[0] ** 3,
    ]


@dataclass(frozen=True, eq=False)
class PainleveSolution:
    """Hastings-McLeod solution sampled on a descending grid.

    ``boundary`` holds ``(Ai(t_max), Ai'(t_max))``.  Calling the object
    evaluates the cubic Hermite interpolant of ``u``.
    """

    grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    boundary: tuple[float, float]
    tol: float
    _spline: CubicHermiteSpline = field(init=False, repr=False)

    def __post_init__(self):
        spline = CubicHermiteSpline(self.grid[::-1], self.u[::-1], self.u_prime[::-1])
        object.__setattr__(self, "_spline", spline)

    @property
    def t_max(self) -> float:
        return float(self.grid[0])

    @property
    def t_min(self) -> float:
        return float(self.grid[-1])

    def __call__(self, t):
        return self._spline(t)

    def derivative(self, t, order: int = 1):
        return self._spline(t, order)


def hastings_mcleod(t_min: float = -10.0, t_max: float = 8.0, tol: float = 1e-10) -> PainleveSolution:
    """Integrate Painleve II from ``t_max`` down to ``t_min`` on the Hastings-McLeod branch."""
    if not (t_min < -2.0 < 2.0 < t_max <= 10.0):
        raise DomainError(f"need t_min < -2 < 2 < t_max <= 10, got ({t_min}, {t_max})")
    if not 0 < tol < 1e-4:
        raise DomainError(f"tol must be in (0, 1e-4), got {tol}")
    ai, aip = airy(t_max)
    # rtol bounds the local error relative to u; atol sits far below u(t_max)
    shot = solve_ivp(
        _rhs,
        (t_max, T_MATCH),
        [ai, aip],
        method="DOP853",
        rtol=tol,
        atol=abs(ai) * tol * 1e-3,
        dense_output=True,
    )
    if shot.status != 0:
        raise NumericError(f"Painleve integration failed: {shot.message}")
    u_match = float(shot.sol(T_MATCH)[0])
    u_left, _ = left_asymptote(t_min)

    mesh = np.linspace(t_min, T_MATCH, 400)
    guess = np.array([left_asymptote(t) for t in mesh]).T
    # blend the guess into the shot value so both boundary conditions start satisfied
    w = (mesh - t_min) / (T_MATCH - t_min)
    guess[0] = guess[0] + w * (u_match - guess[0, -1])
    bvp = solve_bvp(
        _rhs,
        lambda ya, yb: np.array([ya[0] - u_left, yb[0] - u_match]),
        mesh,
        guess,
        tol=max(tol, 1e-10),
        bc_tol=tol,
        max_nodes=200000,
    )
    if bvp.status != 0:
        raise NumericError(f"Painleve boundary value solve failed: {bvp.message}")

    steps = int(round((t_max - t_min) / GRID_STEP))
    grid = np.linspace(t_max, t_min, steps + 1)
    right = grid >= T_MATCH
    y = np.empty((2, grid.size))
    y[:, right] = shot.sol(grid[right])
    y[:, ~right] = bvp.sol(grid[~right])
    y[0, 0], y[1, 0] = ai, aip
    if not np.all(np.isfinite(y)) or np.any(y[0] <= 0):
        raise NumericError("Painleve solution left the Hastings-McLeod branch")
    return PainleveSolution(grid, y[0].copy(), y[1].copy(), (ai, aip), tol)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 40) -> float:
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``."""

    def simpson(fa, fm, fb, h):
        return h * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, m - a)
        right = simpson(fm, frm, fb, b - m)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol:
            return left + right + delta / 15.0
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth - 1) + recurse(
            m, b, fm, frm, fb, right, tol / 2, depth - 1
        )

    if a == b:
        return 0.0
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, max_depth)


class _TracyWidom2:
    """Cumulative tables for ``int_t^{t_max} u^2`` and ``int_t^{t_max} s u^2``."""

    def __init__(self, sol: PainleveSolution, tol: float = 1e-10):
        self.sol = sol
        self.tol = tol
        grid = sol.grid
        cells = grid.size - 1
        i0 = np.zeros(grid.size)
        i1 = np.zeros(grid.size)
        cell_tol = tol / cells
        u2 = lambda t: float(sol(t)) ** 2
        tu2 = lambda t: t * float(sol(t)) ** 2
        for i in range(cells):
            lo, hi = grid[i + 1], grid[i]
            i0[i + 1] = i0[i] + adaptive_simpson(u2, lo, hi, cell_tol)
            i1[i + 1] = i1[i] + adaptive_simpson(tu2, lo, hi, cell_tol)
        self.i0, self.i1 = i0, i1
        ai, aip = sol.boundary
        tm = sol.t_max
        self.tail0 = aip * aip - tm * ai * ai
        self.tail1 = -(tm * tm * ai * ai - tm * aip * aip + ai * aip) / 3.0

    def log_cdf(self, x: float) -> float:
        sol = self.sol
        if x >= sol.t_max:
            # u = Ai beyond t_max: close-form tail integrals
            a, ap = airy(x)
            t0 = ap * ap - x * a * a
            t1 = -(x * x * a * a - x * ap * ap + a * ap) / 3.0
            return -(t1 - x * t0)
        # grid is descending; node j is the first node at or below x
        j = int(np.searchsorted(-sol.grid, -x, side="left"))
        node = sol.grid[j - 1] if j > 0 else sol.t_max
        idx = j - 1 if j > 0 else 0
        partial = adaptive_simpson(lambda t: (t - x) * float(sol(t)) ** 2, x, node, self.tol / 100)
        total = partial + (self.i1[idx] - x * self.i0[idx]) + (self.tail1 - x * self.tail0)
        return -total

    def __call__(self, x):
        return math.exp(self.log_cdf(x))


@lru_cache(maxsize=1)
def default_solution() -> PainleveSolution:
    """Hastings-McLeod solution at the default ``(t_min, t_max, tol) = (-10, 8, 1e-10)``."""
    return hastings_mcleod(-10.0, 8.0, 1e-10)


@lru_cache(maxsize=1)
def _default_tw2() -> _TracyWidom2:
    return _TracyWidom2(default_solution())


def tw2_cdf(x):
    """GUE Tracy-Widom distribution ``F2(x)`` for ``-10 <= x <= 8`` (scalars or arrays)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~((arr >= X_RANGE[0]) & (arr <= X_RANGE[1]))):
        raise DomainError(f"tw2_cdf is supported on [{X_RANGE[0]}, {X_RANGE[1]}]")
    tw = _default_tw2()
    if arr.ndim == 0:
        return tw(float(arr))
    return np.array([tw(float(v)) for v in arr.ravel()]).reshape(arr.shape)
