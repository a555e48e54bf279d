"""Estimators and tests that turn spectra into distributional statistics.

Everything here consumes sorted :class:`~rmtlab.spectra.Spectrum` objects (or
plain arrays of per-replicate statistics) and is deterministic given its
inputs; randomness lives entirely in the samplers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .laws import ReferenceCdf, bulk_sigma, classical_location, edge_measure_density
from .spectra import Spectrum

__all__ = [
    "KsResult",
    "kolmogorov_sf",
    "ks_one_sample",
    "ks_two_sample",
    "normalize_bulk",
    "rescale_edge",
    "trace_moment",
    "EdgeMeasure",
    "edge_measure",
    "edge_measure_l1",
    "CorrelationEstimate",
    "pair_correlation",
    "gap_correlation",
    "counting_statistic",
    "IntervalEstimate",
    "interval_probability",
]

SERIES_CUTOFF = 1e-12
MIN_PAIR_SPECTRA = 50
MIN_GAP_SPECTRA = 500
MIN_BIN_PAIRS = 20


# ---------------------------------------------------------------- KS tests


@dataclass(frozen=True)
class KsResult:
    """Kolmogorov-Smirnov distance with its asymptotic p-value."""

    d: float
    p_value: float
    n_eff: float

    def as_dict(self) -> dict:
        return {"d": self.d, "p_value": self.p_value, "n_eff": self.n_eff}


def kolmogorov_sf(t: float) -> float:
    """Survival function of the Kolmogorov distribution, ``P(K > t)``.

    Uses ``2 sum (-1)^{k-1} exp(-2 k^2 t^2)`` for ``t >= 1`` and the
    Jacobi-theta dual ``1 - sqrt(2 pi)/t sum exp(-(2k-1)^2 pi^2 / (8 t^2))``
    below, where the alternating series converges slowly.  Both are cut off
    once a term drops below 1e-12.
    """
    t = float(t)
    if t <= 0.0:
        return 1.0
    if t < 1.0:
        total = 0.0
        k = 1
        while True:
            term = math.exp(-((2 * k - 1) ** 2) * math.pi**2 / (8.0 * t * t))
            total += term
            if term < SERIES_CUTOFF:
                break
            k += 1
        return min(max(1.0 - math.sqrt(2.0 * math.pi) / t * total, 0.0), 1.0)
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * t * t)
        total += term if k % 2 else -term
        if term < SERIES_CUTOFF:
            break
        k += 1
    return min(max(2.0 * total, 0.0), 1.0)


def _finite_sorted(x, name="sample"):
    arr = np.asarray(x, dtype=float).ravel()
    if arr.size == 0:
        raise DomainError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return np.sort(arr)


def ks_one_sample(sample, cdf) -> KsResult:
    """One-sample KS distance of ``sample`` against a reference CDF.

    Parameters
    ----------
    sample : array_like
        Nonempty, finite observations.
    cdf : ReferenceCdf, str or callable
        Reference distribution function; a string is looked up with
        :meth:`ReferenceCdf.of`.
    """
    if isinstance(cdf, str):
        cdf = ReferenceCdf.of(cdf)
    x = _finite_sorted(sample)
    m = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, m + 1)
    d = float(max(np.max(i / m - f), np.max(f - (i - 1) / m), 0.0))
    d = min(d, 1.0)
    return KsResult(d, kolmogorov_sf(math.sqrt(m) * d), float(m))


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS distance; the p-value uses ``n_eff = m n / (m + n)``."""
    xa = _finite_sorted(a, "first sample")
    xb = _finite_sorted(b, "second sample")
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / xa.size
    fb = np.searchsorted(xb, grid, side="right") / xb.size
    d = float(np.max(np.abs(fa - fb)))
    n_eff = xa.size * xb.size / (xa.size + xb.size)
    return KsResult(d, kolmogorov_sf(math.sqrt(n_eff) * d), float(n_eff))


# ----------------------------------------------------- single-spectrum stats


def _values(spec) -> np.ndarray:
    return spec.values if isinstance(spec, Spectrum) else np.asarray(spec, dtype=float)


def normalize_bulk(spec, k: int, n: int) -> float:
    """``(lambda_k - G^{-1}(k/n)) / sigma(k, n)`` for the 1-based index ``k``."""
    v = _values(spec)
    if v.size != n:
        raise DomainError(f"spectrum has {v.size} values, expected n={n}")
    return (float(v[k - 1]) - classical_location(k, n)) / bulk_sigma(k, n)


def rescale_edge(spec, n: int | None = None) -> float:
    """Edge statistic ``(lambda_max - 1) * 2 n^{2/3}``."""
    v = _values(spec)
    if v.size == 0:
        raise DomainError("empty spectrum")
    n = v.size if n is None else n
    return (float(v[-1]) - 1.0) * 2.0 * n ** (2.0 / 3.0)


def trace_moment(spec, p: int) -> float:
    """``(sum_i lambda_i^p) p^{3/2} / n`` for even ``p >= 2`` (compensated sum)."""
    if int(p) != p or p < 2 or p % 2:
        raise DomainError(f"trace_moment needs an even integer p >= 2, got {p}")
    v = _values(spec)
    if v.size == 0:
        raise DomainError("empty spectrum")
    p = int(p)
    return math.fsum(v**p) * p**1.5 / v.size


@dataclass(frozen=True)
class EdgeMeasure:
    """Rescaled edge points ``theta = (1 - lambda) / r_n`` with common point mass."""

    theta: np.ndarray
    mass: float
    window: tuple[float, float]

    @property
    def total_mass(self) -> float:
        return self.theta.size * self.mass


def edge_measure(spec, r_n: float, window: tuple[float, float] = (0.0, 2.0)) -> EdgeMeasure:
    """Points of the rescaled edge measure falling in ``window``.

    Each eigenvalue ``lambda_k`` maps to ``theta_k = (1 - lambda_k) / r_n`` and
    carries mass ``1 / (n r_n^{3/2})``.
    """
    if not r_n > 0:
        raise DomainError(f"r_n must be positive, got {r_n}")
    v = _values(spec)
    n = v.size
    if r_n * n ** (2.0 / 3.0) < 1.0:
        raise DomainError("edge measure needs r_n n^{2/3} >= 1")
    lo, hi = window
    theta = (1.0 - v[::-1]) / r_n
    theta = theta[(theta >= lo) & (theta <= hi)]
    return EdgeMeasure(theta, 1.0 / (n * r_n**1.5), (float(lo), float(hi)))


def edge_measure_l1(measures, bins: int = 8, x_max: float = 2.0):
    """Histogram density of pooled edge measures and its L1 distance to ``(2 sqrt 2/pi) sqrt x``.

    The reference is averaged over each bin (exact, since the antiderivative is
    closed-form), so the comparison carries no discretisation bias from the
    square-root cusp at 0.

    Returns
    -------
    edges, density, reference, l1
    """
    measures = list(measures)
    if not measures:
        raise DomainError("no edge measures supplied")
    edges = np.linspace(0.0, x_max, bins + 1)
    width = np.diff(edges)
    dens = np.zeros(bins)
    for m in measures:
        counts, _ = np.histogram(m.theta, bins=edges)
        dens += counts * m.mass
    dens /= len(measures) * width
    c = edge_measure_density(1.0)
    ref = c * (2.0 / 3.0) * (edges[1:] ** 1.5 - edges[:-1] ** 1.5) / width
    l1 = float(np.sum(np.abs(dens - ref) * width))
    return edges, dens, ref, l1


def counting_statistic(spec, interval) -> int:
    """Number of eigenvalues in the closed interval ``[a, b]``."""
    a, b = interval
    if not a < b:
        raise DomainError(f"interval must satisfy a < b, got {interval}")
    v = _values(spec)
    return int(np.searchsorted(v, b, side="right") - np.searchsorted(v, a, side="left"))


# ------------------------------------------------------ multi-spectrum stats


@dataclass(frozen=True)
class CorrelationEstimate:
    """Binned two-point correlation ``R_2(y)`` of unfolded eigenvalues.

    ``flagged`` marks bins with fewer than 20 pairs; those are excluded by
    :meth:`max_deviation`.
    """

    bin_edges: np.ndarray
    values: np.ndarray
    counts: np.ndarray
    expected: np.ndarray
    n: int
    reps: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def flagged(self) -> np.ndarray:
        return self.counts < MIN_BIN_PAIRS

    @property
    def stderr(self) -> np.ndarray:
        # Poisson counting error on the pair counts
        return np.sqrt(np.maximum(self.counts, 1)) / self.expected

    def __call__(self, y):
        """Estimate at separation ``y`` (pairs are unordered, so ``y`` and ``-y`` agree)."""
        y = np.abs(np.asarray(y, dtype=float))
        idx = np.clip(np.searchsorted(self.bin_edges, y, side="right") - 1, 0, self.values.size - 1)
        out = self.values[idx]
        return out if out.ndim else float(out)

    def max_deviation(self, reference) -> float:
        ok = ~self.flagged
        if not np.any(ok):
            raise NumericError("every correlation bin is flagged")
        return float(np.max(np.abs(self.values[ok] - reference(self.bin_centers[ok]))))


def pair_correlation(
    spectra, half_width: float = 0.05, bins: int = 30, y_max: float = 3.0, n: int | None = None
) -> CorrelationEstimate:
    """Estimate ``R_2(y)`` around 0 from many spectra.

    Eigenvalues in ``[-w, w]`` are unfolded with the semicircle density at
    the origin, ``rho_1(0) = 2n/pi``.  Pair separations in ``(0, y_max]`` are
    histogrammed and divided by the count expected for independent points in
    the same window: ``rho^2 (L dy - d(y^2)/2)`` per spectrum, with ``L`` the
    unfolded window length and ``rho`` the observed mean intensity.
    """
    spectra = list(spectra)
    if len(spectra) < MIN_PAIR_SPECTRA:
        raise DomainError(f"pair_correlation needs >= {MIN_PAIR_SPECTRA} spectra, got {len(spectra)}")
    if not 0 < half_width <= 0.1:
        raise DomainError(f"half_width must be in (0, 0.1], got {half_width}")
    if n is None:
        n = _values(spectra[0]).size
    rho0 = 2.0 * n / math.pi
    length = 2.0 * half_width * rho0
    if y_max >= length:
        raise DomainError(f"y_max={y_max} does not fit in the unfolded window of length {length:.3g}")
    edges = np.linspace(0.0, y_max, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    total_points = 0
    for spec in spectra:
        v = _values(spec)
        lo, hi = np.searchsorted(v, [-half_width, half_width], side="left")
        y = v[lo:hi] * rho0
        total_points += y.size
        if y.size < 2:
            continue
        sep = (y[None, :] - y[:, None])[np.triu_indices(y.size, 1)]
        counts += np.histogram(sep[(sep > 0) & (sep <= y_max)], bins=edges)[0]
    rho = total_points / (len(spectra) * length)
    expected = len(spectra) * rho * rho * (length * np.diff(edges) - 0.5 * np.diff(edges**2))
    if not np.all(expected > 0):
        raise NumericError("no eigenvalues inside the correlation window")
    return CorrelationEstimate(edges, counts / expected, counts, expected, int(n), len(spectra))


def gap_correlation(spectra, k1: int, k2: int, n: int) -> float:
    """Pearson correlation of the bulk-normalised eigenvalues ``k1`` and ``k2`` across spectra."""
    spectra = list(spectra)
    if len(spectra) < MIN_GAP_SPECTRA:
        raise DomainError(f"gap_correlation needs >= {MIN_GAP_SPECTRA} spectra, got {len(spectra)}")
    # validates both indices (edge-regime error if either leaves the bulk)
    bulk_sigma(k1, n)
    bulk_sigma(k2, n)
    if k1 == k2:
        return 1.0
    a = np.array([normalize_bulk(s, k1, n) for s in spectra])
    b = np.array([normalize_bulk(s, k2, n) for s in spectra])
    return pearson(a, b)


def pearson(a, b) -> float:
    """Pearson correlation; raises ``NumericError`` on a constant input."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da, db = a - a.mean(), b - b.mean()
    den = math.sqrt(float(np.dot(da, da)) * float(np.dot(db, db)))
    if den == 0.0:
        raise NumericError("degenerate variance in correlation")
    return float(min(max(np.dot(da, db) / den, -1.0), 1.0))


@dataclass(frozen=True)
class IntervalEstimate:
    probability: float
    stderr: float
    count: int
    size: int
    bounds: tuple[float, float]


def interval_probability(samples, b: float, c: float, n: int) -> IntervalEstimate:
    """Frequency of ``b sqrt(ln n)/sqrt(n) <= x <= c sqrt(ln n)/sqrt(n)`` with binomial SE."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise DomainError("no samples")
    if b > c:
        raise DomainError(f"need b <= c, got b={b}, c={c}")
    unit = math.sqrt(math.log(n) / n)
    lo, hi = b * unit, c * unit
    hits = int(np.count_nonzero((x >= lo) & (x <= hi)))
    p = hits / x.size
    return IntervalEstimate(p, math.sqrt(p * (1.0 - p) / x.size), hits, x.size, (lo, hi))
