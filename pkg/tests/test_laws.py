import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import airy as scipy_airy

from rmtlab.errors import ConfigurationError, DomainError, EdgeRegimeError
from rmtlab.laws import (
    ReferenceCdf,
    airy,
    bulk_sigma,
    classical_location,
    default_solution,
    edge_center_scale,
    edge_measure_density,
    expected_count,
    hastings_mcleod,
    joint_logdensity,
    joint_logdensity_grad,
    r_k_det,
    semicircle_cdf,
    semicircle_density,
    semicircle_quantile,
    sine_kernel,
    tw2_cdf,
)
from rmtlab.oracles import airy_kernel_fredholm_tw2
from rmtlab.stats import ks_one_sample


# --- semicircle ---------------------------------------------------------------

def test_semicircle_cdf_fixed_points():
    assert semicircle_cdf(0.0) == 0.5
    assert semicircle_cdf(1.0) == 1.0 and semicircle_cdf(-1.0) == 0.0
    assert semicircle_cdf(3.0) == 1.0 and semicircle_cdf(-3.0) == 0.0


def test_semicircle_cdf_at_half():
    # independent route: numerical integration of the density
    ref = quad(lambda x: 2 / math.pi * math.sqrt(1 - x * x), -1, 0.5, epsabs=1e-14)[0]
    assert ref == pytest.approx(0.8044988905, abs=1e-9)
    assert semicircle_cdf(0.5) == pytest.approx(0.80450, abs=1e-5)
    assert semicircle_cdf(0.5) == pytest.approx(ref, abs=1e-13)


def test_semicircle_density_integrates_to_one():
    assert quad(semicircle_density, -1, 1)[0] == pytest.approx(1.0, abs=1e-10)


def test_quantile_examples():
    assert semicircle_quantile(0.5) == 0.0
    assert semicircle_quantile(0.80450) == pytest.approx(0.5, abs=1e-4)


def test_quantile_round_trip_and_symmetry():
    p = np.round(np.arange(0.01, 0.995, 0.01), 10)
    q = semicircle_quantile(p)
    assert np.max(np.abs(semicircle_cdf(q) - p)) < 1e-12
    assert np.max(np.abs(semicircle_quantile(1 - p) + q)) < 1e-13


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        semicircle_quantile(p)


def test_classical_location():
    assert classical_location(500, 1000) == 0.0
    for k in (1, 17, 250, 499):
        assert classical_location(k, 1000) == pytest.approx(-classical_location(1000 - k, 1000), abs=1e-12)
    locs = [classical_location(k, 1000) for k in range(490, 511)]
    assert np.all(np.diff(locs) > 0)
    with pytest.raises(DomainError):
        classical_location(1000, 1000)
    with pytest.raises(DomainError):
        classical_location(0, 1000)


def test_bulk_sigma_formula_and_symmetry():
    n = 1000
    assert bulk_sigma(500, n) == pytest.approx(math.sqrt(math.log(n) / (8 * n * n)), rel=1e-15)
    for k in (100, 300, 450):
        assert bulk_sigma(k, n) == pytest.approx(bulk_sigma(n - k, n), rel=1e-14)
    with pytest.raises(EdgeRegimeError):
        bulk_sigma(1, 10**5)


def test_bulk_sigma_monte_carlo(gue1000_spectra):
    sd = gue1000_spectra[:, 499].std(ddof=1)
    assert abs(sd / bulk_sigma(500, 1000) - 1) < 0.15


def test_edge_center_scale_shape():
    n = 1000
    centers = [edge_center_scale(k, n)[0] for k in range(2, 200)]
    assert max(centers) < 1
    assert np.all(np.diff(centers) < 0)
    with pytest.raises(DomainError):
        edge_center_scale(1, n)


@pytest.mark.xfail(strict=True, reason=(
    "at n=1000, k=30 the ln k normalisation is far from its limit: the simulated eigenvalue "
    "n-k sits several scales away from the quoted centre (KS ~ 0.77)"
))
def test_edge_center_scale_monte_carlo(gue1000_spectra):
    n, k = 1000, 30
    center, scale = edge_center_scale(k, n)
    z = (gue1000_spectra[:, n - k - 1] - center) / scale
    assert ks_one_sample(z, "std_normal").d < 0.08


# --- Airy ---------------------------------------------------------------------

def test_airy_at_zero():
    ai, aip = airy(0.0)
    assert ai == pytest.approx(0.355028053887817, abs=1e-11)
    assert aip == pytest.approx(-0.258819403792807, abs=1e-11)


def test_airy_matches_scipy():
    t = np.linspace(-12, 12, 2401)
    ours = np.array([airy(x) for x in t])
    ref = np.column_stack(scipy_airy(t)[:2])
    assert np.max(np.abs(ours - ref)) < 1e-11


def test_airy_ode_residual():
    # fourth-order stencil: the three-point one has truncation error h^2 t^2 Ai / 12
    h = 1e-2
    for t in np.linspace(-11.5, 11.5, 47):
        f = [airy(t + j * h)[0] for j in (-2, -1, 0, 1, 2)]
        second = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        assert abs(second - t * airy(t)[0]) < 1e-6


def test_airy_domain():
    with pytest.raises(DomainError):
        airy(12.5)


# --- Painleve II --------------------------------------------------------------

def test_hastings_mcleod_invariants():
    sol = default_solution()
    assert np.all(sol.u > 0)
    ai, aip = airy(sol.t_max)
    assert sol.u[0] == ai and sol.u_prime[0] == aip
    left = sol.grid <= -8
    assert np.max(np.abs(sol.u[left] / np.sqrt(-sol.grid[left] / 2) - 1)) < 0.01
    assert abs(sol(-8.0) / math.sqrt(4.0) - 1) < 0.01


def test_hastings_mcleod_ode_residual():
    sol = default_solution()
    h = sol.grid[0] - sol.grid[1]
    up = sol.u_prime
    # fourth-order central difference of u' on the descending grid
    upp = -(-up[4:] + 8 * up[3:-1] - 8 * up[1:-3] + up[:-4]) / (12 * h)
    t, u = sol.grid[2:-2], sol.u[2:-2]
    assert np.max(np.abs(upp - t * u - 2 * u**3)) < 1e-6


def test_hastings_mcleod_converges_under_tightening():
    coarse = hastings_mcleod(-10, 8, 1e-8)
    fine = default_solution()
    assert abs(coarse(-8.0) - fine(-8.0)) < 1e-6
    assert abs(fine(-8.0) / 2 - 1) < 0.01


def test_hastings_mcleod_domain():
    with pytest.raises(DomainError):
        hastings_mcleod(-1, 8, 1e-10)
    with pytest.raises(DomainError):
        hastings_mcleod(-10, 12, 1e-10)


# --- Tracy-Widom --------------------------------------------------------------

def test_tw2_right_tail():
    assert abs(tw2_cdf(8.0) - 1) < 1e-8


def test_tw2_monotone():
    x = np.round(np.arange(-10, 8.0001, 0.1), 10)
    f = tw2_cdf(x)
    assert np.all(np.diff(f) >= 0)
    assert f[0] < 1e-20 and f[-1] <= 1.0


@pytest.mark.parametrize("x", [-4.0, -2.0, 0.0, 2.0])
def test_tw2_against_fredholm(x):
    assert abs(tw2_cdf(x) - airy_kernel_fredholm_tw2(x, 160, check=True)) < 1e-6


def test_tw2_frozen_values():
    # frozen from the Fredholm oracle
    assert tw2_cdf(-2.0) == pytest.approx(0.41322414, abs=1e-7)
    assert tw2_cdf(-3.0) == pytest.approx(airy_kernel_fredholm_tw2(-3.0, 160), abs=1e-8)


def test_tw2_domain():
    with pytest.raises(DomainError):
        tw2_cdf(9.0)


def test_reference_cdfs_are_monotone_and_bounded():
    grid = np.linspace(-12, 12, 481)
    for kind in ("semicircle", "std_normal", "tracy_widom_2"):
        f = np.asarray(ReferenceCdf.of(kind)(grid))
        assert np.all(np.diff(f) >= 0)
        assert f[0] == pytest.approx(0, abs=1e-12) and f[-1] == pytest.approx(1, abs=1e-12)
    with pytest.raises(ConfigurationError):
        ReferenceCdf.of("tracy_widom_1")


# --- kernels and joint density ------------------------------------------------

def test_sine_kernel_examples():
    assert sine_kernel(0.3, 0.3, 2) == 1.0
    for r in (1, 2, -3):
        assert abs(sine_kernel(r, 0.0, 2)) < 1e-15
    assert sine_kernel(0.5, 0.0, 2) == pytest.approx(2 / math.pi, abs=1e-15)
    assert sine_kernel(0.25, 0.25, 1) == pytest.approx(1 + math.sin(math.pi * 0.5) / (math.pi * 0.5))


def test_r_k_det_examples():
    assert r_k_det([0.7], 2) == pytest.approx(1.0)
    for r in (0.1, 0.5, 1.3):
        s = math.sin(math.pi * r) / (math.pi * r)
        assert r_k_det([0.0, r], 2) == pytest.approx(1 - s * s, abs=1e-14)
    assert r_k_det([0.0, 1e-6], 2) < 1e-10
    with pytest.raises(DomainError):
        r_k_det(np.arange(7.0), 2)


def test_joint_logdensity_examples():
    assert joint_logdensity([0.1, 0.1, 0.3], 1) == -math.inf
    lam = np.array([-0.3, 0.05, 0.4, 0.2])
    assert joint_logdensity(lam, 2) == pytest.approx(joint_logdensity(lam[::-1].copy(), 2), abs=1e-12)
    a, b = 0.01, 0.02
    lhs = joint_logdensity([-a, a], 1) - joint_logdensity([-b, b], 1)
    rhs = math.log(2 * a / (2 * b)) - 2 * (2 * a * a - 2 * b * b)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 6])
@pytest.mark.parametrize("beta", [1, 2])
def test_joint_logdensity_gradient(n, beta):
    lam = np.sort(np.random.default_rng(n * 10 + beta).uniform(-1, 1, n))
    g = joint_logdensity_grad(lam, beta)
    h = 1e-6
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fd = (joint_logdensity(lam + e, beta) - joint_logdensity(lam - e, beta)) / (2 * h)
        assert abs(fd - g[i]) < 1e-6 * max(1.0, abs(g[i]))


def test_edge_measure_density_examples():
    assert edge_measure_density(0.0) == 0.0
    assert edge_measure_density(-0.5) == 0.0
    assert edge_measure_density(1.0) == pytest.approx(2 * math.sqrt(2) / math.pi, abs=1e-15)
    assert edge_measure_density(1.0) == pytest.approx(0.90032, abs=1e-5)


def test_expected_count_examples():
    assert expected_count((-1, 1), 1000) == pytest.approx(1000)
    assert expected_count((0, 1), 1000) == pytest.approx(500)
    ref = 1000 * quad(semicircle_density, -0.1, 0.1)[0]
    # closed form 2000 (0.1 sqrt(0.99) + asin 0.1) / pi
    assert ref == pytest.approx(127.1114, abs=1e-3)
    assert expected_count((-0.1, 0.1), 1000) == pytest.approx(ref, abs=1e-9)
