"""Samplers for Wigner matrices, GOE/GUE references and shell-restricted measures.

All samplers are pure functions of their arguments and a 64-bit seed.  Raw
entries ``xi_ij`` are normalised to mean 0 and variance 1/4, and the sampled
matrix is ``A_n = (xi_ij / sqrt(n))`` so the spectrum fills ``[-1, 1]``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, SamplingError
from .matrices import SymmetricMatrix, TridiagonalMatrix, pack_upper, packed_indices

__all__ = [
    "EntryDistribution",
    "ShellSpec",
    "EnsembleSpec",
    "make_rng",
    "replicate_seed",
    "parse_dist",
    "sample_wigner",
    "sample_goe",
    "sample_gue_embedded",
    "sample_beta_tridiagonal",
    "sample_shell",
    "shell_acceptance_rate",
    "SymmetricMatrix",
    "TridiagonalMatrix",
]

KINDS = ("gaussian", "rademacher", "uniform", "student_t")
SHELL_MODES = ("uniform_volume", "gaussian_conditioned")
SHELL_BUDGET = 10**6
_MASK64 = (1 << 64) - 1


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for a 64-bit integer seed (a Generator passes through)."""
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ConfigurationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def replicate_seed(master_seed: int, index: int) -> int:
    """Seed of replicate ``index`` under ``master_seed``.

    ``splitmix64(splitmix64(master_seed) ^ index)``: a pure function of the
    pair, so results never depend on how replicates are scheduled.
    """
    if index < 0:
        raise ConfigurationError("replicate index must be non-negative")
    return _splitmix64(_splitmix64(int(master_seed) & _MASK64) ^ (int(index) & _MASK64))


@dataclass(frozen=True)
class EntryDistribution:
    """Symmetric law of a raw entry, normalised to variance exactly 1/4.

    ``kind`` is one of ``gaussian``, ``rademacher`` (values +-1/2), ``uniform``
    (on ``[-sqrt(3)/2, sqrt(3)/2]``) or ``student_t`` with ``tail_exponent``
    degrees of freedom, rescaled by ``sqrt((nu - 2) / nu) / 2``.
    """

    kind: str
    tail_exponent: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown entry distribution {self.kind!r}; expected one of {KINDS}")
        if self.kind == "student_t":
            if self.tail_exponent is None or not self.tail_exponent > 2:
                raise ConfigurationError(
                    f"student_t needs tail_exponent > 2 for finite variance, got {self.tail_exponent}"
                )
            if self.tail_exponent < 18:
                warnings.warn(self.notes[0], RuntimeWarning, stacklevel=3)
        elif self.tail_exponent is not None:
            raise ConfigurationError(f"tail_exponent only applies to student_t, not {self.kind}")

    @property
    def notes(self) -> tuple[str, ...]:
        """Recorded warnings about the law (empty when nothing to report)."""
        if self.kind == "student_t" and self.tail_exponent < 18:
            return (
                f"student_t tail exponent {self.tail_exponent:g} < 18: "
                "outside the polynomial-decay regime of the edge theorems",
            )
        return ()

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "gaussian":
            return 0.5 * rng.standard_normal(size)
        if self.kind == "rademacher":
            return np.where(rng.random(size) < 0.5, -0.5, 0.5)
        if self.kind == "uniform":
            half = math.sqrt(3.0) / 2.0
            return rng.uniform(-half, half, size)
        nu = float(self.tail_exponent)
        return rng.standard_t(nu, size) * (math.sqrt((nu - 2.0) / nu) / 2.0)

    def logdensity(self, x) -> np.ndarray:
        """``-f(x) = ln g(x)`` for the continuous kinds (Rademacher has no density)."""
        x = np.asarray(x, dtype=float)
        if self.kind == "gaussian":
            return -2.0 * x * x + math.log(2.0 / math.pi) / 2.0
        if self.kind == "uniform":
            half = math.sqrt(3.0) / 2.0
            return np.where(np.abs(x) <= half, -math.log(2.0 * half), -np.inf)
        if self.kind == "student_t":
            nu = float(self.tail_exponent)
            s = math.sqrt((nu - 2.0) / nu) / 2.0
            t = x / s
            c = (
                math.lgamma((nu + 1) / 2)
                - math.lgamma(nu / 2)
                - 0.5 * math.log(nu * math.pi)
                - math.log(s)
            )
            return c - (nu + 1) / 2 * np.log1p(t * t / nu)
        raise ConfigurationError("rademacher is discrete; it has no density")


@dataclass(frozen=True)
class ShellSpec:
    """Shell ``n(n+1)/8 - m_lower*n <= sum_{i<=j} xi_ij^2 <= n(n+1)/8 + m_upper*n``."""

    m_lower: float
    m_upper: float

    def __post_init__(self):
        if not (self.m_lower > 0 and self.m_upper > 0):
            raise ConfigurationError(
                f"shell widths must be positive, got m_lower={self.m_lower}, m_upper={self.m_upper}"
            )

    def bounds(self, n: int) -> tuple[float, float]:
        """Bounds on ``sum xi^2``.  A negative lower bound is clamped to 0 (the shell is a ball)."""
        if n < 1:
            raise ConfigurationError("shell needs n >= 1")
        center = n * (n + 1) / 8.0
        return max(center - self.m_lower * n, 0.0), center + self.m_upper * n

    def contains(self, n: int, sum_sq: float) -> bool:
        lo, hi = self.bounds(n)
        return lo <= sum_sq <= hi


def _check_n(n):
    if int(n) != n or n < 1:
        raise ConfigurationError(f"dimension must be a positive integer, got {n}")
    return int(n)


def sample_wigner(n: int, dist: EntryDistribution, seed) -> SymmetricMatrix:
    """Wigner matrix with all ``n(n+1)/2`` free entries drawn i.i.d. from ``dist``."""
    n = _check_n(n)
    if not isinstance(dist, EntryDistribution):
        raise ConfigurationError(f"expected an EntryDistribution, got {type(dist).__name__}")
    rng = make_rng(seed)
    return SymmetricMatrix(n, dist.sample(rng, n * (n + 1) // 2))


def sample_goe(n: int, seed) -> SymmetricMatrix:
    """GOE: off-diagonal ``a_ij ~ N(0, 1/(4n))``, diagonal ``a_ii ~ N(0, 1/(2n))``."""
    n = _check_n(n)
    rng = make_rng(seed)
    rows, cols = packed_indices(n)
    z = rng.standard_normal(rows.size)
    return SymmetricMatrix(n, np.where(rows == cols, z / math.sqrt(2.0), 0.5 * z))


def sample_gue_embedded(n: int, seed) -> SymmetricMatrix:
    """GUE matrix ``H = X + iY`` returned as its real embedding ``[[X, -Y], [Y, X]]``.

    ``Re h_ij, Im h_ij ~ N(0, 1/(8n))`` off the diagonal and ``h_ii ~ N(0, 1/(4n))``.
    The embedding has dimension ``2n`` and carries every eigenvalue of ``H``
    with multiplicity two; use :func:`rmtlab.spectra.merge_pairs` to recover
    the ``n`` GUE eigenvalues.
    """
    n = _check_n(n)
    rng = make_rng(seed)
    rows, cols = packed_indices(n)
    off = rows != cols
    x = np.empty((n, n))
    re = rng.standard_normal(rows.size)
    vals = np.where(off, re / math.sqrt(8.0), 0.5 * re)
    x[rows, cols] = vals
    x[cols, rows] = vals
    y = np.zeros((n, n))
    im = rng.standard_normal(int(off.sum())) / math.sqrt(8.0)
    y[rows[off], cols[off]] = im
    y[cols[off], rows[off]] = -im
    big = np.block([[x, -y], [y, x]])
    return SymmetricMatrix(2 * n, pack_upper(big), scale=1.0 / math.sqrt(n))


def sample_beta_tridiagonal(n: int, beta: int, seed) -> TridiagonalMatrix:
    """Tridiagonal model whose eigenvalues follow the GOE (beta=1) or GUE (beta=2) law.

    Diagonal ``N(0, 1/(2 beta n))``; off-diagonal ``chi_{beta(n-i)} / (2 sqrt(beta n))``
    for ``i = 1..n-1``.  This matches ``const * prod |l_i - l_j|^beta
    exp(-beta n sum l_i^2)``.
    """
    n = _check_n(n)
    if beta not in (1, 2):
        raise ConfigurationError(f"beta must be 1 or 2, got {beta}")
    rng = make_rng(seed)
    diag = rng.standard_normal(n) / math.sqrt(2.0 * beta * n)
    dof = beta * np.arange(n - 1, 0, -1, dtype=float)
    off = np.sqrt(rng.chisquare(dof)) / (2.0 * math.sqrt(beta * n)) if n > 1 else np.empty(0)
    return TridiagonalMatrix(diag, off)


def _shell_uniform(rng, d, lo, hi):
    # radius density ~ r^(d-1) on [sqrt(lo), sqrt(hi)]  <=>  r^d uniform
    log_ratio = 0.5 * d * (math.log(lo) - math.log(hi)) if lo > 0 else -math.inf
    q = math.exp(log_ratio)
    while True:
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        r = math.sqrt(hi) * (q + rng.random() * (1.0 - q)) ** (1.0 / d)
        x = r * u
        s = float(np.dot(x, x))
        if lo <= s <= hi:  # rounding can push a boundary draw outside by an ulp
            return x


def _shell_gaussian(rng, d, lo, hi, budget, batch=256):
    tried = 0
    while tried < budget:
        m = min(batch, budget - tried)
        x = 0.5 * rng.standard_normal((m, d))
        s = np.einsum("ij,ij->i", x, x)
        hit = np.flatnonzero((s >= lo) & (s <= hi))
        if hit.size:
            return x[hit[0]]
        tried += m
    raise SamplingError(
        f"no draw landed in the shell after {budget} attempts (acceptance rate < {1.0 / budget:.1e})",
        acceptance_rate=0.0,
    )


def sample_shell(n: int, shell: ShellSpec, mode: str, seed, budget: int = SHELL_BUDGET) -> SymmetricMatrix:
    """Sample a matrix whose raw entries lie in ``shell``.

    ``uniform_volume`` draws uniformly from the volume of the shell in the
    ``n(n+1)/2`` raw coordinates; ``gaussian_conditioned`` rejection-samples
    i.i.d. ``N(0, 1/4)`` entries until ``sum xi^2`` falls in the shell.
    """
    n = _check_n(n)
    if mode not in SHELL_MODES:
        raise ConfigurationError(f"unknown shell mode {mode!r}; expected one of {SHELL_MODES}")
    lo, hi = shell.bounds(n)
    d = n * (n + 1) // 2
    rng = make_rng(seed)
    if mode == "uniform_volume":
        x = _shell_uniform(rng, d, lo, hi)
    else:
        x = _shell_gaussian(rng, d, lo, hi, budget)
    return SymmetricMatrix(n, x)


def shell_acceptance_rate(n: int, shell: ShellSpec, attempts: int, seed, batch: int = 4096) -> float:
    """Fraction of i.i.d. ``N(0, 1/4)`` raw matrices whose ``sum xi^2`` lies in ``shell``."""
    n = _check_n(n)
    lo, hi = shell.bounds(n)
    d = n * (n + 1) // 2
    rng = make_rng(seed)
    hits = 0
    done = 0
    while done < attempts:
        m = min(batch, attempts - done)
        x = 0.5 * rng.standard_normal((m, d))
        s = np.einsum("ij,ij->i", x, x)
        hits += int(np.count_nonzero((s >= lo) & (s <= hi)))
        done += m
    return hits / attempts


@dataclass(frozen=True)
class EnsembleSpec:
    """Parsed distribution spec string (see :func:`parse_dist`)."""

    name: str
    entry: EntryDistribution | None = None
    beta: int | None = None

    @property
    def is_real_symmetric_wigner(self) -> bool:
        return self.entry is not None

    def __str__(self):
        if self.entry is not None and self.entry.kind == "student_t":
            return f"student_t:{self.entry.tail_exponent:g}"
        if self.name == "tridiag":
            return f"tridiag:{self.beta}"
        return self.name

    def sample(self, n: int, seed):
        """Draw one matrix: ``SymmetricMatrix`` or ``TridiagonalMatrix`` for ``tridiag``."""
        if self.entry is not None:
            return sample_wigner(n, self.entry, seed)
        if self.name == "goe":
            return sample_goe(n, seed)
        if self.name == "gue":
            return sample_gue_embedded(n, seed)
        return sample_beta_tridiagonal(n, self.beta, seed)


def parse_dist(spec: str) -> EnsembleSpec:
    """Parse ``gaussian | goe | gue | rademacher | uniform | student_t:<dof> | tridiag:<beta>``."""
    text = spec.strip().lower()
    name, _, arg = text.partition(":")
    if name in ("gaussian", "rademacher", "uniform"):
        if arg:
            raise ConfigurationError(f"{name} takes no parameter: {spec!r}")
        return EnsembleSpec(name, EntryDistribution(name))
    if name in ("goe", "gue"):
        if arg:
            raise ConfigurationError(f"{name} takes no parameter: {spec!r}")
        return EnsembleSpec(name, beta=1 if name == "goe" else 2)
    if name == "student_t":
        try:
            dof = float(arg)
        except ValueError:
            raise ConfigurationError(f"student_t needs a numeric dof, got {spec!r}") from None
        return EnsembleSpec(name, EntryDistribution("student_t", dof))
    if name == "tridiag":
        if arg not in ("1", "2"):
            raise ConfigurationError(f"tridiag needs beta 1 or 2, got {spec!r}")
        return EnsembleSpec(name, beta=int(arg))
    raise ConfigurationError(f"unknown distribution spec {spec!r}")
