import math

import numpy as np
import pytest
from scipy.special import gammainc

from rmtlab.ensembles import ShellSpec, make_rng, sample_goe
from rmtlab.errors import ConfigurationError, DomainError
from rmtlab.oracles import (
    airy_kernel_fredholm_tw2,
    chi_shell_probability,
    chi_sum_probability,
    regularized_gamma_p,
    regularized_gamma_q,
    smalln_event_probability,
)


# --- Fredholm determinant -----------------------------------------------------

def test_fredholm_right_tail_is_one():
    assert airy_kernel_fredholm_tw2(8.0) == pytest.approx(1.0, abs=1e-8)


def test_fredholm_monotone():
    xs = np.arange(-6.0, 4.01, 0.5)
    vals = [airy_kernel_fredholm_tw2(x) for x in xs]
    assert np.all(np.diff(vals) >= 0)


def test_fredholm_self_convergence_at_zero():
    assert abs(airy_kernel_fredholm_tw2(0.0, 80) - airy_kernel_fredholm_tw2(0.0, 160)) < 1e-8


@pytest.mark.parametrize("x", [-5.0, -2.0, 0.0, 3.0])
def test_fredholm_check_mode_passes(x):
    airy_kernel_fredholm_tw2(x, check=True)


def test_fredholm_rejects_bad_arguments():
    with pytest.raises(DomainError):
        airy_kernel_fredholm_tw2(-11.0)
    with pytest.raises(DomainError):
        airy_kernel_fredholm_tw2(0.0, order=10)


def test_fredholm_frozen_values():
    # F2(-2), F2(0): values frozen from this oracle at order 160
    assert airy_kernel_fredholm_tw2(-2.0, 160) == pytest.approx(0.41322414, abs=1e-7)
    assert airy_kernel_fredholm_tw2(0.0, 160) == pytest.approx(0.96937, abs=1e-5)


# --- small-n quadrature -------------------------------------------------------

@pytest.mark.parametrize("n,beta", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2)])
def test_smalln_full_range_is_one(n, beta):
    assert smalln_event_probability(n, beta, 1, (-10, 10)) == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("beta", [1, 2])
def test_smalln_median_symmetry(beta):
    right = smalln_event_probability(3, beta, 2, (0.0, 0.3))
    left = smalln_event_probability(3, beta, 2, (-0.3, 0.0))
    assert right == pytest.approx(left, abs=1e-4)


def test_smalln_n1_is_gaussian():
    # n = 1, beta = 1: lambda ~ N(0, 1/2)
    p = smalln_event_probability(1, 1, 1, (0.0, 0.5))
    assert p == pytest.approx(0.5 * math.erf(0.5), abs=1e-6)


def test_smalln_matches_goe2_monte_carlo():
    p = smalln_event_probability(2, 1, 2, (0.0, 0.5))
    reps = 10**6
    ent = np.array([sample_goe(2, s).entries for s in range(reps)]) / math.sqrt(2.0)
    a, b, c = ent[:, 0], ent[:, 1], ent[:, 2]
    lam_max = 0.5 * (a + c) + np.sqrt(0.25 * (a - c) ** 2 + b * b)
    hits = np.mean((lam_max >= 0.0) & (lam_max <= 0.5))
    se = math.sqrt(p * (1 - p) / reps)
    assert abs(hits - p) < 3 * se


def test_smalln_rejects_large_n_and_bad_beta():
    with pytest.raises(DomainError):
        smalln_event_probability(4, 1, 1, (0, 1))
    with pytest.raises(ConfigurationError):
        smalln_event_probability(2, 4, 1, (0, 1))


# --- chi-square shell ---------------------------------------------------------

@pytest.mark.parametrize("a,x", [(0.5, 0.1), (3.0, 2.0), (10.0, 15.0), (105.0, 90.0), (105.0, 130.0)])
def test_regularized_gamma_matches_scipy(a, x):
    assert regularized_gamma_p(a, x) == pytest.approx(gammainc(a, x), abs=1e-13)
    assert regularized_gamma_p(a, x) + regularized_gamma_q(a, x) == pytest.approx(1.0, abs=1e-14)


def test_chi_shell_wide_is_one():
    assert chi_shell_probability(20, ShellSpec(1e6, 1e6)) == pytest.approx(1.0, abs=1e-12)


def test_chi_shell_zero_width_is_zero():
    assert chi_sum_probability(210, 52.5, 52.5) == 0.0


def test_chi_shell_matches_monte_carlo():
    n, shell = 20, ShellSpec(3.0, 3.0)
    exact = chi_shell_probability(n, shell)
    lo, hi = shell.bounds(n)
    rng = make_rng(77)
    reps, d = 10**6, n * (n + 1) // 2
    hits = 0
    for _ in range(20):
        s = np.sum(rng.normal(0, 0.5, size=(reps // 20, d)) ** 2, axis=1)
        hits += np.count_nonzero((s >= lo) & (s <= hi))
    se = math.sqrt(max(exact * (1 - exact), 1.0 / reps) / reps)
    assert abs(hits / reps - exact) <= 3 * se


def test_chi_shell_narrow_matches_monte_carlo():
    # a shell narrow enough that the probability is far from 1
    n, shell = 20, ShellSpec(0.25, 0.25)
    exact = chi_shell_probability(n, shell)
    assert 0.5 < exact < 0.8
    lo, hi = shell.bounds(n)
    rng = make_rng(78)
    s = np.concatenate([np.sum(rng.normal(0, 0.5, size=(50000, 210)) ** 2, axis=1) for _ in range(4)])
    rate = np.mean((s >= lo) & (s <= hi))
    assert abs(rate - exact) <= 3 * math.sqrt(exact * (1 - exact) / s.size)
