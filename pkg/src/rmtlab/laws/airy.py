"""Airy function Ai and its derivative on ``[-12, 12]``.

* ``|t| <= 5``: Maclaurin series from the recurrence
  ``(j+2)(j+1) c_{j+2} = c_{j-1}``.
* ``t > 5``: the exponentially decaying asymptotic expansion, truncated at
  its smallest term.
* ``t < -5``: the oscillatory asymptotic expansion loses accuracy
  (its smallest term is ~1e-7 at t = -5), so the values at -5 are carried
  along ``Ai'' = t Ai`` with local Taylor steps, which is stable there.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError

__all__ = ["airy", "AI0", "AIP0"]

# 3^{-2/3} / Gamma(2/3) and -3^{-1/3} / Gamma(1/3)
AI0 = 0.355028053887817239260
AIP0 = -0.258819403792806798405

T_RANGE = 12.0
_N_COEF = 160


def _maclaurin_coefficients():
    c = np.zeros(_N_COEF)
    c[0], c[1] = AI0, AIP0
    for j in range(1, _N_COEF - 2):
        c[j + 2] = c[j - 1] / ((j + 2) * (j + 1))
    return c


_C = _maclaurin_coefficients()
_DC = _C[1:] * np.arange(1, _N_COEF)


def _maclaurin(t):
    return float(np.polynomial.polynomial.polyval(t, _C)), float(
        np.polynomial.polynomial.polyval(t, _DC)
    )


def _asymptotic_right(t):
    zeta = 2.0 / 3.0 * t**1.5
    u, v = 1.0, 1.0
    su, sv = 1.0, 1.0
    prev = math.inf
    k = 1
    while True:
        u_next = u * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        v_next = -u_next * (6 * k + 1) / (6 * k - 1)
        term = u_next / zeta**k
        if abs(term) >= prev or abs(term) < 1e-17:
            break
        sign = -1.0 if k % 2 else 1.0
        su += sign * term
        sv += sign * v_next / zeta**k
        prev = abs(term)
        u = u_next
        k += 1
    pre = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    return pre * su / t**0.25, -pre * sv * t**0.25


def _taylor_step(t0, y, yp, h, terms=40):
    a = [y, yp, 0.5 * t0 * y]
    for j in range(1, terms):
        a.append((t0 * a[j] + a[j - 1]) / ((j + 2) * (j + 1)))
    val = 0.0
    der = 0.0
    for j in range(len(a) - 1, -1, -1):
        val = val * h + a[j]
        if j:
            der = der * h + j * a[j]
    return val, der


def _continue_left(t):
    t0 = -5.0
    y, yp = _maclaurin(t0)
    steps = max(1, math.ceil((t0 - t) / 0.25))
    h = (t - t0) / steps
    for _ in range(steps):
        y, yp = _taylor_step(t0, y, yp, h)
        t0 += h
    return y, yp


def airy(t: float) -> tuple[float, float]:
    """Return ``(Ai(t), Ai'(t))`` with absolute error below 1e-11 for ``|t| <= 12``."""
    t = float(t)
    if not -T_RANGE <= t <= T_RANGE:
        raise DomainError(f"airy is supported on [-12, 12], got {t}")
    if t > 5.0:
        return _asymptotic_right(t)
    if t < -5.0:
        return _continue_left(t)
    return _maclaurin(t)
