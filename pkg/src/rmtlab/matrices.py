"""Storage types for sampled matrices.

``SymmetricMatrix`` keeps only the free raw entries ``xi_ij`` (i <= j) and
applies the ``1/sqrt(n)`` normalisation when a dense array is requested, so a
sample always satisfies ``a_ij == a_ji`` bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, NumericError


@lru_cache(maxsize=4)
def packed_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major upper-triangle indices (diagonal included) for an ``n x n`` matrix."""
    rows, cols = np.triu_indices(n)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def pack_upper(a: np.ndarray) -> np.ndarray:
    """Return the packed upper triangle of a square array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigurationError(f"expected a square array, got shape {a.shape}")
    rows, cols = packed_indices(a.shape[0])
    return a[rows, cols].copy()


@dataclass(frozen=True, eq=False)
class SymmetricMatrix:
    """Real symmetric matrix ``A = (xi_ij * scale)`` stored as its upper triangle.

    Parameters
    ----------
    n : int
        Dimension.
    entries : ndarray, shape (n*(n+1)/2,)
        Raw entries ``xi_ij`` for ``i <= j`` in row-major order.
    scale : float, optional
        Factor applied on read; defaults to ``1/sqrt(n)``.  The GUE embedding
        uses ``1/sqrt(n/2)`` because its raw entries belong to the ``n/2``
        dimensional Hermitian matrix.
    """

    n: int
    entries: np.ndarray
    scale: float = field(default=None)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {self.n}")
        entries = np.ascontiguousarray(self.entries, dtype=float)
        if entries.shape != (self.n * (self.n + 1) // 2,):
            raise ConfigurationError(
                f"expected {self.n * (self.n + 1) // 2} packed entries, got shape {entries.shape}"
            )
        if not np.all(np.isfinite(entries)):
            raise NumericError("matrix entries must be finite")
        entries.setflags(write=False)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "entries", entries)
        if self.scale is None:
            object.__setattr__(self, "scale", 1.0 / np.sqrt(self.n))

    @classmethod
    def from_dense(cls, a, scale: float = 1.0) -> "SymmetricMatrix":
        """Wrap an already-scaled dense symmetric array (upper triangle is used)."""
        a = np.asarray(a, dtype=float)
        return cls(a.shape[0], pack_upper(a) / scale, scale)

    def raw_dense(self) -> np.ndarray:
        """Dense array of raw entries ``xi_ij``."""
        rows, cols = packed_indices(self.n)
        out = np.empty((self.n, self.n))
        out[rows, cols] = self.entries
        out[cols, rows] = self.entries
        return out

    def dense(self) -> np.ndarray:
        """Dense array of scaled entries ``a_ij = xi_ij * scale``."""
        return self.raw_dense() * self.scale

    def entry(self, i: int, j: int) -> float:
        """Scaled entry ``a_ij`` (0-based indices)."""
        if i > j:
            i, j = j, i
        # offset of row i in packed storage: sum_{r<i} (n - r)
        k = i * self.n - i * (i - 1) // 2 + (j - i)
        return float(self.entries[k] * self.scale)

    def raw_sum_of_squares(self) -> float:
        """``sum_{i<=j} xi_ij**2``; the coordinate used by shells."""
        return float(np.dot(self.entries, self.entries))

    def trace(self) -> float:
        rows, cols = packed_indices(self.n)
        return float(self.entries[rows == cols].sum() * self.scale)

    def frobenius_sq(self) -> float:
        """``||A||_F**2``; off-diagonal entries count twice."""
        rows, cols = packed_indices(self.n)
        diag = rows == cols
        e2 = self.entries * self.entries
        return float((2.0 * e2.sum() - e2[diag].sum()) * self.scale**2)


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix given by its diagonal and first off-diagonal."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.ascontiguousarray(self.diag, dtype=float)
        e = np.ascontiguousarray(self.offdiag, dtype=float)
        if d.ndim != 1 or d.size < 1 or e.shape != (d.size - 1,):
            raise ConfigurationError(
                f"inconsistent tridiagonal lengths: diag {d.shape}, offdiag {e.shape}"
            )
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise NumericError("tridiagonal entries must be finite")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def trace(self) -> float:
        return float(self.diag.sum())

    def frobenius_sq(self) -> float:
        return float(self.diag @ self.diag + 2.0 * (self.offdiag @ self.offdiag))
