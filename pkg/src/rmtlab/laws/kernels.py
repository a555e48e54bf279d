"""Sine kernels, their correlation determinants and the GOE/GUE joint eigenvalue density."""
from __future__ import annotations

import numpy as np

from ..errors import ConfigurationError, DomainError

__all__ = ["sine_kernel", "r_k_det", "joint_logdensity", "joint_logdensity_grad"]

MAX_K = 6


def _check_beta(beta):
    if beta not in (1, 2):
        raise ConfigurationError(f"beta must be 1 or 2, got {beta}")


def sine_kernel(y, z, beta: int = 2):
    """Normalised sine kernel ``sin(pi r) / (pi r)`` with ``r = y - z``.

    For ``beta = 1`` the term ``sin(pi (y + z)) / (pi (y + z))`` is added.
    ``r = 0`` evaluates to 1.
    """
    _check_beta(beta)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    out = np.sinc(y - z)
    if beta == 1:
        out = out + np.sinc(y + z)
    return out if out.ndim else float(out)


def r_k_det(points, beta: int = 2) -> float:
    """``det(K(y_i, y_j))`` for ``1 <= k <= 6`` points."""
    pts = np.asarray(points, dtype=float).ravel()
    if not 1 <= pts.size <= MAX_K:
        raise DomainError(f"r_k_det supports 1..{MAX_K} points, got {pts.size}")
    kmat = sine_kernel(pts[:, None], pts[None, :], beta)
    return float(np.linalg.det(np.atleast_2d(kmat)))


def joint_logdensity(lambdas, beta: int, n: int | None = None) -> float:
    """Unnormalised log density ``beta sum_{i<j} ln|l_i - l_j| - beta n sum l_i^2``.

    Returns ``-inf`` when two eigenvalues coincide.  ``n`` defaults to the
    number of eigenvalues.
    """
    _check_beta(beta)
    lam = np.asarray(lambdas, dtype=float).ravel()
    if not np.all(np.isfinite(lam)):
        raise DomainError("eigenvalues must be finite")
    if n is None:
        n = lam.size
    iu = np.triu_indices(lam.size, 1)
    gaps = np.abs(lam[:, None] - lam[None, :])[iu]
    if np.any(gaps == 0.0):
        return -np.inf
    return float(beta * np.sum(np.log(gaps)) - beta * n * np.dot(lam, lam))


def joint_logdensity_grad(lambdas, beta: int, n: int | None = None) -> np.ndarray:
    """Gradient of :func:`joint_logdensity` in the eigenvalues."""
    _check_beta(beta)
    lam = np.asarray(lambdas, dtype=float).ravel()
    if n is None:
        n = lam.size
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, np.inf)
    return beta * np.sum(1.0 / diff, axis=1) - 2.0 * beta * n * lam
