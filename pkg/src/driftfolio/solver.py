"""Worst-case drift and optimal constant strategy for the robust problem.

Pipeline for kappa > 0: diagonalize tau^T A tau, solve the scalar boundary
equation F(psi) = kappa^2 by bisection (F is strictly increasing on (0,
kappa]), assemble rho* in the eigenbasis, then mu* = nu + tau rho* and
pi* = A mu* / (1 - gamma) + h c. kappa = 0 reduces to the non-robust
constrained Merton solution at the reference drift.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular

from .errors import (
    ConvergenceError,
    DegenerateDirectionError,
    InternalConsistencyError,
    ValidationError,
)
from .geometry import ConstraintGeometry, build_constraint_geometry
from .model import InvestorProfile, MarketModel, UncertaintySet
from .spectral import SpectralData, cholesky_factor, spectral_decompose
from .utility import (
    certainty_equivalent_constant,
    expected_utility_constant,
    growth_moments,
    utility_from_moments,
)

PSI_MAX_ITER = 200
# two closed forms for pi* (eigenbasis and Gamma^{-1} representation) must agree
DUAL_REP_RTOL = 1e-9


def merton_constrained(geometry: ConstraintGeometry, profile: InvestorProfile, mu) -> np.ndarray:
    """Optimal constant strategy A mu / (1 - gamma) + h c for a known drift."""
    mu = np.asarray(mu, dtype=float)
    return geometry.A @ mu / profile.one_minus_gamma + profile.h * geometry.c


def optimal_value_given_mu(market: MarketModel, profile: InvestorProfile, mu) -> float:
    """Optimal expected utility sup_pi E_mu[U_gamma(X_T^pi)] in closed form.

    Uses the reduction to the (d-1)-asset unconstrained market with
    sigma~ = D sigma, r~ = (1-h) r + h mu_d - (1-gamma) ||h sigma^T e_d||^2 / 2
    and excess drift mu~ - r~ 1 = D mu - h (1-gamma) D sigma sigma^T e_d.
    """
    mu = np.asarray(mu, dtype=float)
    gamma, h = profile.gamma, profile.h
    D_full = np.zeros((market.d - 1, market.d))
    D_full[:, : market.d - 1] = np.eye(market.d - 1)
    D_full[:, -1] = -1.0
    S = market.covariance
    r_t = (
        (1.0 - h) * market.r
        + h * mu[-1]
        - 0.5 * (1.0 - gamma) * h**2 * S[-1, -1]
    )
    excess = D_full @ mu - h * (1.0 - gamma) * (D_full @ S[:, -1])
    reduced = D_full @ S @ D_full.T
    q = float(excess @ cho_solve(cho_factor(reduced, lower=True), excess))
    growth = r_t + q / (2.0 * (1.0 - gamma))
    if gamma == 0.0:
        return float(np.log(market.x0) + growth * market.T)
    with np.errstate(over="ignore", under="ignore"):
        return float(market.x0**gamma / gamma * np.exp(gamma * market.T * growth))


def evaluate_g(rho, spectral: SpectralData, geometry: ConstraintGeometry,
               profile: InvestorProfile, nu):
    """The dual objective g(rho) = rho^T tau^T A tau rho / (2(1-gamma)) + b^T rho.

    Accepts a single rho or a batch of rows; minimizing g over the ball
    ||rho|| <= kappa and setting mu = nu + tau rho solves the inner problem.
    """
    rho = np.asarray(rho, dtype=float)
    nu = np.asarray(nu, dtype=float)
    M = spectral.tau.T @ geometry.A @ spectral.tau
    b = spectral.tau.T @ (profile.h * geometry.c + geometry.A @ nu / profile.one_minus_gamma)
    if rho.ndim == 1:
        return float(rho @ M @ rho / (2.0 * profile.one_minus_gamma) + b @ rho)
    quad = np.einsum("ij,jk,ik->i", rho, M, rho)
    return quad / (2.0 * profile.one_minus_gamma) + rho @ b


def _eigenbasis_weights(spectral: SpectralData, geometry: ConstraintGeometry,
                        profile: InvestorProfile, nu) -> np.ndarray:
    """w_i = <h tau^T c + lambda_i / (1-gamma) tau^{-1} nu, v_i> for all i."""
    nu = np.asarray(nu, dtype=float)
    q = profile.h * (spectral.tau.T @ geometry.c)
    z = solve_triangular(spectral.tau, nu, lower=True)
    V = spectral.eigenvectors
    return V.T @ q + spectral.eigenvalues / profile.one_minus_gamma * (V.T @ z)


def solve_psi(spectral: SpectralData, geometry: ConstraintGeometry,
              profile: InvestorProfile, nu, kappa: float) -> float:
    """The unique psi in (0, kappa] placing rho* on the sphere ||rho|| = kappa.

    Solves F(psi) = kappa^2 with
    F(psi) = psi^2 + sum_{i>=2} w_i^2 / (lambda_i/(1-gamma) + h/(psi n1))^2,
    n1 = ||tau^{-1} 1||. F is strictly increasing, so plain bisection on
    (0, kappa] converges unconditionally; the i = 1 term is psi^2 exactly.
    """
    if not kappa > 0:
        raise ValidationError(f"solve_psi needs kappa > 0, got {kappa}")
    w = _eigenbasis_weights(spectral, geometry, profile, nu)[1:]
    lam = spectral.eigenvalues[1:] / profile.one_minus_gamma
    coef = profile.h / spectral.kernel_norm
    kappa2 = kappa**2

    def F(psi):
        return psi**2 + float(np.sum(w**2 / (lam + coef / psi) ** 2))

    if F(kappa) <= kappa2 * (1.0 + 1e-14):
        return float(kappa)  # symmetric instances: all i >= 2 weights vanish
    lo, hi = 1e-14 * kappa, kappa
    for _ in range(PSI_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if F(mid) < kappa2:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4.0 * np.finfo(float).eps * hi:
            break
    psi = 0.5 * (lo + hi)
    if abs(F(psi) - kappa2) > 1e-10 * kappa2:
        raise ConvergenceError(
            f"bisection for psi left residual {F(psi) - kappa2:.3e} at psi={psi!r}"
        )
    return float(psi)


def worst_case_drift(spectral: SpectralData, geometry: ConstraintGeometry,
                     profile: InvestorProfile, uncertainty: UncertaintySet):
    """(mu*, rho*, psi): the minimizer of g on the ball of radius kappa.

    rho* = -sum_i (lambda_i/(1-gamma) + h/(psi n1))^{-1} w_i v_i; the v_1
    coefficient equals -psi by construction.
    """
    psi = solve_psi(spectral, geometry, profile, uncertainty.nu, uncertainty.kappa)
    w = _eigenbasis_weights(spectral, geometry, profile, uncertainty.nu)
    denom = spectral.eigenvalues / profile.one_minus_gamma + profile.h / (
        psi * spectral.kernel_norm
    )
    coeffs = -w / denom
    rho_star = spectral.eigenvectors @ coeffs
    mu_star = uncertainty.nu + spectral.tau @ rho_star
    return mu_star, rho_star, psi


def robust_strategy(mu_star, rho_star, psi: float, spectral: SpectralData,
                    geometry: ConstraintGeometry, profile: InvestorProfile) -> np.ndarray:
    """pi* = A mu* / (1-gamma) + h c, checked against the dual representation
    -h / (psi ||tau^{-1} 1||) Gamma^{-1} (mu* - nu)."""
    pi_star = merton_constrained(geometry, profile, mu_star)
    gamma_inv_diff = solve_triangular(spectral.tau.T, rho_star, lower=False)
    dual = -profile.h / (psi * spectral.kernel_norm) * gamma_inv_diff
    dev = np.max(np.abs(pi_star - dual))
    # round-off in A mu* grows with ||mu*||, which is O(kappa) for large kappa
    cancel = (
        np.finfo(float).eps
        * np.max(np.abs(mu_star))
        * np.max(np.abs(geometry.A))
        / profile.one_minus_gamma
    )
    if dev > DUAL_REP_RTOL * (1.0 + np.max(np.abs(pi_star))) + 64.0 * cancel:
        raise InternalConsistencyError(
            f"the two closed forms for pi* disagree by {dev:.3e}"
        )
    return pi_star


def worst_case_drift_for_strategy(theta, uncertainty: UncertaintySet) -> np.ndarray:
    """The drift in K minimizing theta^T mu: nu - kappa Gamma theta / sqrt(theta^T Gamma theta)."""
    theta = np.asarray(theta, dtype=float)
    if not np.any(theta):
        raise DegenerateDirectionError(
            "theta = 0: every drift in the ellipsoid is equally bad"
        )
    g_theta = uncertainty.Gamma @ theta
    return uncertainty.nu - uncertainty.kappa / np.sqrt(theta @ g_theta) * g_theta


@dataclass(frozen=True)
class RobustSolution:
    """Solution of the robust problem. psi is None on the kappa = 0 branch."""

    psi: float | None
    rho_star: np.ndarray
    mu_star: np.ndarray
    pi_star: np.ndarray
    value: float
    ce: float
    kappa: float
    gamma: float
    h: float


def solve_robust(market: MarketModel, profile: InvestorProfile,
                 uncertainty: UncertaintySet) -> RobustSolution:
    """Full pipeline: geometry, spectrum, psi, mu*, pi*, minimax value."""
    if uncertainty.d != market.d:
        raise ValidationError(
            f"uncertainty set dimension {uncertainty.d} != market dimension {market.d}"
        )
    geometry = build_constraint_geometry(market)
    if uncertainty.kappa == 0.0:
        mu_star = uncertainty.nu.copy()
        rho_star = np.zeros(market.d)
        pi_star = merton_constrained(geometry, profile, mu_star)
        psi = None
    else:
        tau = cholesky_factor(uncertainty.Gamma)
        spectral = spectral_decompose(geometry, tau)
        mu_star, rho_star, psi = worst_case_drift(spectral, geometry, profile, uncertainty)
        pi_star = robust_strategy(mu_star, rho_star, psi, spectral, geometry, profile)
    value = expected_utility_constant(market, pi_star, mu_star, profile.gamma)
    ce = certainty_equivalent_constant(market, pi_star, mu_star, profile.gamma)
    return RobustSolution(
        psi=psi,
        rho_star=rho_star,
        mu_star=mu_star,
        pi_star=pi_star,
        value=float(value),
        ce=ce,
        kappa=float(uncertainty.kappa),
        gamma=profile.gamma,
        h=profile.h,
    )


def sample_drifts(uncertainty: UncertaintySet, n: int, rng) -> np.ndarray:
    """n drifts uniform on the ellipsoid K (Gaussian direction, radius kappa u^{1/d})."""
    d = uncertainty.d
    z = rng.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    radii = uncertainty.kappa * rng.uniform(size=(n, 1)) ** (1.0 / d)
    tau = cholesky_factor(uncertainty.Gamma)
    return uncertainty.nu + (radii * z) @ tau.T


def sample_strategies(d: int, h: float, n: int, rng, spread: float = 1.0) -> np.ndarray:
    """n strategies with <pi, 1> = h: scaled Dirichlet compositions plus
    signed perturbations inside the hyperplane orthogonal to 1."""
    base = h * rng.dirichlet(np.ones(d), size=n)
    noise = spread * rng.standard_normal((n, d))
    noise -= noise.mean(axis=1, keepdims=True)
    return base + noise


@dataclass(frozen=True)
class SaddleReport:
    """Sampled verification of the saddle-point property of (pi*, mu*)."""

    investor_slack: float  # max over sampled pi of E_{mu*}[U(pi)] - value
    market_slack: float  # max over sampled mu of value - E_mu[U(pi*)]
    minimax_gap: float  # |optimal_value_given_mu(mu*) - value|
    tol: float
    gap_tol: float
    n_samples: int
    seed: int
    worst_pi: np.ndarray | None
    worst_mu: np.ndarray | None

    @property
    def passed(self) -> bool:
        return (
            self.investor_slack <= self.tol
            and self.market_slack <= self.tol
            and self.minimax_gap <= self.gap_tol
        )


def verify_saddle_point(market: MarketModel, profile: InvestorProfile,
                        uncertainty: UncertaintySet, solution: RobustSolution,
                        n_samples: int = 10_000, seed: int = 0,
                        rel_tol: float = 1e-8) -> SaddleReport:
    """Check E_{mu*}[U(pi)] <= value <= E_mu[U(pi*)] on random (mu, pi) samples
    and the minimax equality value = optimal_value_given_mu(mu*)."""
    rng = np.random.Generator(np.random.Philox(seed))
    gamma = profile.gamma
    value = solution.value
    tol = rel_tol * (1.0 + abs(value))

    pis = sample_strategies(market.d, profile.h, n_samples, rng)
    vols = pis @ market.sigma
    s_pi = np.einsum("ij,ij->i", vols, vols)
    b_pi = market.r + pis @ (solution.mu_star - market.r) - 0.5 * s_pi
    u_pi = np.asarray(utility_from_moments(market.x0, market.T, gamma, b_pi, s_pi))
    investor_slack = float(np.max(u_pi) - value)
    worst_pi = pis[int(np.argmax(u_pi))] if investor_slack > tol else None

    mus = sample_drifts(uncertainty, n_samples, rng)
    b_star, s_star = growth_moments(market, solution.pi_star, solution.mu_star)
    b_mu = market.r + mus @ solution.pi_star - market.r * np.sum(solution.pi_star) - 0.5 * s_star
    u_mu = np.asarray(utility_from_moments(market.x0, market.T, gamma, b_mu, s_star))
    market_slack = float(value - np.min(u_mu))
    worst_mu = mus[int(np.argmin(u_mu))] if market_slack > tol else None

    gap = abs(optimal_value_given_mu(market, profile, solution.mu_star) - value)
    gap_tol = 1e-10 * (1.0 + abs(value))
    return SaddleReport(
        investor_slack=investor_slack,
        market_slack=market_slack,
        minimax_gap=float(gap),
        tol=tol,
        gap_tol=gap_tol,
        n_samples=n_samples,
        seed=seed,
        worst_pi=worst_pi,
        worst_mu=worst_mu,
    )
