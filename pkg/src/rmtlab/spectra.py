"""Eigenvalues of symmetric matrices (values only).

Two routes share one contract: ``method="lapack"`` runs LAPACK's Householder
reduction followed by the root-free implicit QL/QR iteration (``dsyev`` /
``dsterf``) and is what Monte Carlo runs use; ``method="ql"`` is the
in-package Householder + Wilkinson-shifted implicit QL.  ``charpoly_oracle``
is an independent small-n reference based on leading principal minors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, DomainError, NumericError
from .matrices import SymmetricMatrix, TridiagonalMatrix

__all__ = [
    "Spectrum",
    "TridiagonalMatrix",
    "tridiagonalize",
    "eigenvalues",
    "tridiagonal_ql",
    "charpoly_oracle",
    "merge_pairs",
    "conservation_error",
]

MAX_QL_ITERATIONS = 50


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of one sample, sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ConfigurationError("a spectrum needs at least one value")
        if np.any(np.diff(v) < 0):
            raise ConfigurationError("spectrum values must be sorted ascending")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def _as_dense(m) -> np.ndarray:
    if isinstance(m, SymmetricMatrix):
        return m.dense()
    if isinstance(m, TridiagonalMatrix):
        return m.dense()
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise NumericError("matrix has non-finite entries")
    return a


def tridiagonalize(m) -> TridiagonalMatrix:
    """Reduce a symmetric matrix to tridiagonal form with Householder reflections."""
    if isinstance(m, TridiagonalMatrix):
        return m
    a = _as_dense(m).copy()
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        alpha = -math.copysign(math.hypot(x[0], tail), x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        b = a[k + 1:, k + 1:]
        p = b @ v
        q = p - (v @ p) * v
        b -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        a[k + 1, k] = a[k, k + 1] = alpha
        a[k + 2:, k] = a[k, k + 2:] = 0.0
    return TridiagonalMatrix(np.diag(a).copy(), np.diag(a, -1).copy())


def tridiagonal_ql(t: TridiagonalMatrix) -> np.ndarray:
    """Unsorted eigenvalues of ``t`` by implicit QL with Wilkinson-type shifts."""
    d = t.diag.copy()
    n = d.size
    e = np.zeros(n)
    e[: n - 1] = t.offdiag
    eps = np.finfo(float).eps
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > MAX_QL_ITERATIONS:
                raise NumericError(f"QL iteration did not converge for eigenvalue {l}")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def eigenvalues(m, method: str = "lapack") -> Spectrum:
    """Sorted eigenvalues of a symmetric or tridiagonal matrix.

    Parameters
    ----------
    m : SymmetricMatrix, TridiagonalMatrix or array_like
        Input matrix; dense arrays must be symmetric.
    method : {"lapack", "ql"}
        ``lapack`` uses ``dsyev``/``dsterf``; ``ql`` the pure-numpy route.
    """
    if method not in ("lapack", "ql"):
        raise ConfigurationError(f"unknown eigenvalue method {method!r}")
    if isinstance(m, TridiagonalMatrix):
        if method == "lapack":
            if m.n == 1:
                vals = m.diag.copy()
            else:
                vals = scipy.linalg.eigvalsh_tridiagonal(
                    m.diag, m.offdiag, lapack_driver="sterf", check_finite=False
                )
        else:
            vals = tridiagonal_ql(m)
    else:
        a = _as_dense(m)
        if method == "lapack":
            try:
                vals = scipy.linalg.eigh(a, eigvals_only=True, driver="ev", check_finite=False)
            except scipy.linalg.LinAlgError as exc:
                raise NumericError(str(exc)) from exc
        else:
            vals = tridiagonal_ql(tridiagonalize(a))
    return Spectrum(np.sort(vals))


def merge_pairs(spec: Spectrum, tol: float | None = None) -> Spectrum:
    """Collapse the doubled spectrum of a GUE embedding to the ``n`` Hermitian eigenvalues.

    With ``tol`` set, raises ``NumericError`` when a pair differs by more than
    ``tol * max(1, max|lambda|)``.
    """
    v = spec.values
    if v.size % 2:
        raise ConfigurationError("an embedded spectrum has even length")
    lo, hi = v[0::2], v[1::2]
    if tol is not None:
        gap = float(np.max(hi - lo))
        if gap > tol * max(1.0, float(np.max(np.abs(v)))):
            raise NumericError(f"embedded eigenvalues are not paired (gap {gap:.3e})")
    return Spectrum(0.5 * (lo + hi))


def conservation_error(spec: Spectrum, m) -> float:
    """Normalised trace / Frobenius mismatch between a spectrum and its source.

    Returns ``max(|sum l - tr A| / (n ||A||), |sum l^2 - ||A||_F^2| / (n ||A||^2))``
    with ``||A||`` the spectral norm; the contract is that this stays below 1e-10.
    """
    v = spec.values
    if isinstance(m, (SymmetricMatrix, TridiagonalMatrix)):
        tr, fro2 = m.trace(), m.frobenius_sq()
    else:
        a = _as_dense(m)
        tr, fro2 = float(np.trace(a)), float(np.sum(a * a))
    norm = float(np.max(np.abs(v)))
    if norm == 0.0:
        return max(abs(tr), fro2)
    n = v.size
    return max(
        abs(math.fsum(v) - tr) / (n * norm),
        abs(math.fsum(v * v) - fro2) / (n * norm * norm),
    )


def _det(a) -> float:
    """Determinant by cofactor expansion along the first row."""
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = 0.0
    for j in range(n):
        if a[0][j] == 0.0:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        total += (-1) ** j * a[0][j] * _det(minor)
    return total


def _count_below(a, x) -> int:
    # sign changes in the leading principal minors of A - xI = #eigenvalues < x
    n = len(a)
    shifted = [[a[i][j] - (x if i == j else 0.0) for j in range(n)] for i in range(n)]
    count = 0
    prev = 1.0
    for k in range(1, n + 1):
        cur = _det([row[:k] for row in shifted[:k]])
        if cur == 0.0:
            cur = -1e-300 * math.copysign(1.0, prev)
        if (cur < 0) != (prev < 0):
            count += 1
        prev = cur
    return count


def charpoly_oracle(m) -> Spectrum:
    """Eigenvalues of a matrix with ``n <= 4`` by bisection on ``det(A - xI)``.

    Leading principal minors of ``A - xI`` are expanded by cofactors; the
    number of sign changes along the sequence counts eigenvalues below ``x``,
    which keeps repeated roots bracketed.  ``n = 1, 2`` use closed forms.
    """
    a = _as_dense(m)
    n = a.shape[0]
    if n > 4:
        raise DomainError(f"charpoly_oracle supports n <= 4, got n={n}")
    if n == 1:
        return Spectrum(a[0].copy())
    if n == 2:
        mid = 0.5 * (a[0, 0] + a[1, 1])
        rad = math.hypot(0.5 * (a[0, 0] - a[1, 1]), a[0, 1])
        return Spectrum(np.array([mid - rad, mid + rad]))
    rows = a.tolist()
    bound = max(sum(abs(v) for v in row) for row in rows) + 1.0
    out = []
    for k in range(n):
        lo, hi = -bound, bound
        # k-th eigenvalue is the smallest x with count_below(x) > k
        while hi - lo > 1e-13 * bound:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if _count_below(rows, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return Spectrum(np.array(out))
