import numpy as np
import pytest

from driftfolio import (
    DegenerateDirectionError,
    InvestorProfile,
    UncertaintySet,
    ValidationError,
    build_constraint_geometry,
    cholesky_factor,
    evaluate_g,
    expected_utility_constant,
    merton_constrained,
    optimal_value_given_mu,
    solve_robust,
    spectral_decompose,
    verify_saddle_point,
    worst_case_drift,
    worst_case_drift_for_strategy,
)
from driftfolio.oracles import sample_sphere
from conftest import random_market, random_uncertainty, rng_for


def _random_instance(seed, d, gamma=0.0, kappa=None):
    rng = rng_for(seed)
    market = random_market(rng, d)
    profile = InvestorProfile(gamma=gamma, h=float(rng.uniform(0.5, 1.5)))
    uncertainty = random_uncertainty(rng, d, kappa=kappa)
    return market, profile, uncertainty


def test_symmetric_instance_closed_form(symmetric_instance):
    market, profile, uncertainty = symmetric_instance
    sol = solve_robust(market, profile, uncertainty)
    kappa = uncertainty.kappa
    assert sol.pi_star == pytest.approx([0.5, 0.5], abs=1e-14)
    assert sol.psi == pytest.approx(kappa, abs=1e-14)
    assert sol.mu_star == pytest.approx(0.3 - kappa / np.sqrt(2), abs=1e-14)
    assert sol.value == pytest.approx(0.3 - kappa / np.sqrt(2) - 0.25, abs=1e-14)


@pytest.mark.parametrize("seed,d,gamma", [(1, 2, 0.0), (2, 4, -1.0), (3, 6, 0.5)])
def test_strategies_satisfy_sum_constraint(seed, d, gamma):
    market, profile, uncertainty = _random_instance(seed, d, gamma)
    geometry = build_constraint_geometry(market)
    pi_hat = merton_constrained(geometry, profile, uncertainty.nu)
    assert np.sum(pi_hat) == pytest.approx(profile.h, abs=1e-12)
    sol = solve_robust(market, profile, uncertainty)
    assert np.sum(sol.pi_star) == pytest.approx(profile.h, abs=1e-12)


@pytest.mark.parametrize("seed,d,gamma", [(11, 3, 0.0), (12, 5, -1.0), (13, 8, 0.5)])
def test_rho_star_on_boundary_and_dominates_sphere_samples(seed, d, gamma):
    market, profile, uncertainty = _random_instance(seed, d, gamma)
    geometry = build_constraint_geometry(market)
    spectral = spectral_decompose(geometry, cholesky_factor(uncertainty.Gamma))
    mu_star, rho_star, psi = worst_case_drift(spectral, geometry, profile, uncertainty)

    kappa = uncertainty.kappa
    assert np.linalg.norm(rho_star) == pytest.approx(kappa, rel=1e-12)
    assert 0.0 < psi <= kappa * (1.0 + 1e-12)
    # the v1 coefficient of rho* is -psi by construction
    assert rho_star @ spectral.eigenvectors[:, 0] == pytest.approx(-psi, abs=1e-12)
    assert uncertainty.contains(mu_star)

    g_star = evaluate_g(rho_star, spectral, geometry, profile, uncertainty.nu)
    samples = sample_sphere(d, kappa, 2000, rng_for(seed + 1000))
    g_samples = evaluate_g(samples, spectral, geometry, profile, uncertainty.nu)
    assert g_star <= np.min(g_samples) + 1e-12


def test_evaluate_g_batch_matches_scalar():
    market, profile, uncertainty = _random_instance(21, 4)
    geometry = build_constraint_geometry(market)
    spectral = spectral_decompose(geometry, cholesky_factor(uncertainty.Gamma))
    rhos = rng_for(5).standard_normal((7, 4))
    batch = evaluate_g(rhos, spectral, geometry, profile, uncertainty.nu)
    singles = [evaluate_g(r, spectral, geometry, profile, uncertainty.nu) for r in rhos]
    assert batch == pytest.approx(singles, rel=1e-13)


def test_value_decreases_with_kappa():
    market, profile, _ = _random_instance(31, 4, gamma=-0.5)
    nu = 0.2 * np.ones(4)
    values = []
    for kappa in [0.0, 0.1, 0.5, 1.0, 2.0]:
        uset = UncertaintySet(nu=nu, Gamma=np.eye(4), kappa=kappa)
        values.append(solve_robust(market, profile, uset).value)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_kappa_zero_branch_is_the_merton_solution():
    market, profile, uncertainty = _random_instance(41, 3)
    uset = UncertaintySet(nu=uncertainty.nu, Gamma=uncertainty.Gamma, kappa=0.0)
    sol = solve_robust(market, profile, uset)
    assert sol.psi is None
    assert np.array_equal(sol.rho_star, np.zeros(3))
    assert np.array_equal(sol.mu_star, uncertainty.nu)
    geometry = build_constraint_geometry(market)
    expected = merton_constrained(geometry, profile, uncertainty.nu)
    assert np.array_equal(sol.pi_star, expected)
    assert sol.value == pytest.approx(
        optimal_value_given_mu(market, profile, uncertainty.nu), rel=1e-12
    )


def test_worst_case_drift_for_strategy():
    _, _, uncertainty = _random_instance(51, 4)
    theta = np.array([0.4, -0.1, 0.5, 0.2])
    mu = worst_case_drift_for_strategy(theta, uncertainty)
    # on the ellipsoid boundary ...
    diff = mu - uncertainty.nu
    q = diff @ np.linalg.solve(uncertainty.Gamma, diff)
    assert q == pytest.approx(uncertainty.kappa**2, rel=1e-12)
    # ... and minimizing theta^T mu against sampled ellipsoid points
    z = sample_sphere(4, uncertainty.kappa, 2000, rng_for(52))
    tau = cholesky_factor(uncertainty.Gamma)
    mus = uncertainty.nu + z @ tau.T
    assert theta @ mu <= np.min(mus @ theta) + 1e-12
    with pytest.raises(DegenerateDirectionError):
        worst_case_drift_for_strategy(np.zeros(4), uncertainty)


@pytest.mark.parametrize("gamma", [-1.0, 0.0, 0.5])
def test_optimal_value_attained_by_merton_strategy(gamma):
    market, profile, uncertainty = _random_instance(61, 5, gamma)
    geometry = build_constraint_geometry(market)
    mu = uncertainty.nu
    pi_hat = merton_constrained(geometry, profile, mu)
    v_opt = optimal_value_given_mu(market, profile, mu)
    assert expected_utility_constant(market, pi_hat, mu, gamma) == pytest.approx(
        v_opt, rel=1e-10
    )
    # no sampled feasible strategy beats it
    rng = rng_for(62)
    for _ in range(200):
        noise = rng.standard_normal(5)
        pi = pi_hat + noise - noise.mean()
        assert expected_utility_constant(market, pi, mu, gamma) <= v_opt + 1e-10 * (
            1.0 + abs(v_opt)
        )


def test_saddle_report_passes_on_random_instance():
    market, profile, uncertainty = _random_instance(71, 4, gamma=0.5)
    sol = solve_robust(market, profile, uncertainty)
    report = verify_saddle_point(market, profile, uncertainty, sol, n_samples=3000, seed=9)
    assert report.passed
    assert report.worst_pi is None and report.worst_mu is None


def test_dimension_mismatch_rejected():
    market, profile, _ = _random_instance(81, 3)
    uset = UncertaintySet(nu=np.zeros(4), Gamma=np.eye(4), kappa=0.5)
    with pytest.raises(ValidationError):
        solve_robust(market, profile, uset)
