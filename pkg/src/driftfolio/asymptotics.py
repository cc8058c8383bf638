"""Large-uncertainty limits and the robustness metrics COA and RDR.

As kappa grows, psi(kappa)/kappa -> 1, mu*/kappa -> -1 / ||tau^{-1} 1|| and
pi* converges to the generalized uniform diversification strategy
h Gamma^{-1} 1 / (1^T Gamma^{-1} 1), which no longer depends on sigma or nu.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve

from .errors import ValidationError
from .geometry import build_constraint_geometry
from .model import InvestorProfile, MarketModel, UncertaintySet
from .solver import (
    RobustSolution,
    merton_constrained,
    robust_strategy,
    solve_robust,
    worst_case_drift,
)
from .spectral import cholesky_factor, spectral_decompose
from .utility import certainty_equivalent_constant, expected_utility_constant


def limit_strategy(Gamma, h: float) -> np.ndarray:
    """Limit of pi*(kappa) for kappa -> inf: h Gamma^{-1} 1 / (1^T Gamma^{-1} 1)."""
    if not h > 0:
        raise ValidationError(f"constraint level must be positive, got h={h}")
    tau = cholesky_factor(Gamma)
    ones = np.ones(tau.shape[0])
    w = cho_solve((tau, True), ones)
    return h / (ones @ w) * w


@dataclass(frozen=True)
class DiagnosticsRow:
    """One kappa of the convergence diagnostics."""

    kappa: float
    psi: float
    psi_over_kappa: float
    mu_direction_error: float  # || mu*/kappa + 1 / ||tau^{-1} 1|| ||
    dist_to_limit: float  # || pi*(kappa) - limit_strategy ||


def asymptotic_diagnostics(market: MarketModel, profile: InvestorProfile,
                           nu, Gamma, kappas) -> list[DiagnosticsRow]:
    """Convergence diagnostics on an ascending positive kappa grid."""
    kappas = [float(k) for k in kappas]
    if any(k <= 0 for k in kappas) or any(b <= a for a, b in zip(kappas, kappas[1:])):
        raise ValidationError("kappa grid must be positive and strictly ascending")
    geometry = build_constraint_geometry(market)
    tau = cholesky_factor(Gamma)
    spectral = spectral_decompose(geometry, tau)
    limit = limit_strategy(Gamma, profile.h)
    kernel_dir = np.ones(market.d) / spectral.kernel_norm
    rows = []
    for kappa in kappas:
        uset = UncertaintySet(nu=np.asarray(nu, dtype=float), Gamma=np.asarray(Gamma, dtype=float), kappa=kappa)
        mu_star, rho_star, psi = worst_case_drift(spectral, geometry, profile, uset)
        pi_star = robust_strategy(mu_star, rho_star, psi, spectral, geometry, profile)
        rows.append(
            DiagnosticsRow(
                kappa=kappa,
                psi=psi,
                psi_over_kappa=psi / kappa,
                mu_direction_error=float(np.linalg.norm(mu_star / kappa + kernel_dir)),
                dist_to_limit=float(np.linalg.norm(pi_star - limit)),
            )
        )
    return rows


@dataclass(frozen=True)
class RobustnessReport:
    """COA/RDR and the four certainty equivalents they are built from.

    coa = ce_nu_hat - ce_nu_star: certainty-equivalent loss from playing the
    robust strategy when the reference drift nu is actually correct.
    rdr = ce_mustar_star - ce_mustar_hat: gain from the robust strategy over
    the naive one when the worst-case drift materializes. The *_closed_form
    twins come from the analytic representation with the common factor
    L = 1 - exp(-T (mu*-nu)^T A (mu*-nu) / (2(1-gamma))).
    """

    coa: float
    rdr: float
    ce_nu_hat: float
    ce_nu_star: float
    ce_mustar_star: float
    ce_mustar_hat: float
    coa_closed_form: float
    rdr_closed_form: float
    coa_utility_diff: float | None = None
    rdr_utility_diff: float | None = None


def compute_coa_rdr(market: MarketModel, profile: InvestorProfile,
                    uncertainty: UncertaintySet,
                    utility_difference: bool = False) -> RobustnessReport:
    """Cost of ambiguity and reward for distributional robustness.

    The certainty-equivalent definition is primary; the closed forms are
    reported alongside as a cross-check. With utility_difference=True the
    plain expected-utility differences are reported as well (diagnostic
    variant, not part of the acceptance contract).
    """
    geometry = build_constraint_geometry(market)
    solution = solve_robust(market, profile, uncertainty)
    pi_hat = merton_constrained(geometry, profile, uncertainty.nu)
    pi_star, mu_star = solution.pi_star, solution.mu_star
    nu, gamma = uncertainty.nu, profile.gamma

    ce_nu_hat = certainty_equivalent_constant(market, pi_hat, nu, gamma)
    ce_nu_star = certainty_equivalent_constant(market, pi_star, nu, gamma)
    ce_mustar_star = certainty_equivalent_constant(market, pi_star, mu_star, gamma)
    ce_mustar_hat = certainty_equivalent_constant(market, pi_hat, mu_star, gamma)

    A, c, S = geometry.A, geometry.c, market.covariance
    T, h = market.T, profile.h
    og = profile.one_minus_gamma
    diff = mu_star - nu
    L_bar = 1.0 - np.exp(-T / (2.0 * og) * (diff @ A @ diff))
    scale = market.x0 * np.exp(market.r * T)
    common = -h * market.r - 0.5 * og * h**2 * (c @ S @ c)
    coa_cf = scale * L_bar * np.exp(T * (common + h * (c @ nu) + (nu @ A @ nu) / (2.0 * og)))
    rdr_cf = scale * L_bar * np.exp(
        T * (common + h * (c @ mu_star) + (mu_star @ A @ mu_star) / (2.0 * og))
    )

    ud_coa = ud_rdr = None
    if utility_difference:
        ud_coa = expected_utility_constant(market, pi_hat, nu, gamma) - expected_utility_constant(
            market, pi_star, nu, gamma
        )
        ud_rdr = expected_utility_constant(
            market, pi_star, mu_star, gamma
        ) - expected_utility_constant(market, pi_hat, mu_star, gamma)

    return RobustnessReport(
        coa=ce_nu_hat - ce_nu_star,
        rdr=ce_mustar_star - ce_mustar_hat,
        ce_nu_hat=ce_nu_hat,
        ce_nu_star=ce_nu_star,
        ce_mustar_star=ce_mustar_star,
        ce_mustar_hat=ce_mustar_hat,
        coa_closed_form=float(coa_cf),
        rdr_closed_form=float(rdr_cf),
        coa_utility_diff=ud_coa,
        rdr_utility_diff=ud_rdr,
    )


@dataclass(frozen=True)
class ConstraintComparison:
    """Robust values at constraint levels h and h' >= h; tightening the
    constraint upward cannot improve the worst-case value."""

    h: float
    h_prime: float
    value_h: float
    value_h_prime: float
    higher_level_no_better: bool  # value(h') <= value(h)
    c_dot_mu_star: float  # c^T mu*(kappa) at level h; negative for large kappa
    solution_h: RobustSolution
    solution_h_prime: RobustSolution


def compare_constraint_levels(market: MarketModel, profile: InvestorProfile,
                              h_prime: float, uncertainty: UncertaintySet) -> ConstraintComparison:
    """Solve the robust problem at levels h and h' >= h and compare values."""
    if h_prime < profile.h:
        raise ValidationError(f"need h' >= h, got h'={h_prime} < h={profile.h}")
    geometry = build_constraint_geometry(market)
    sol_h = solve_robust(market, profile, uncertainty)
    profile_hp = InvestorProfile(gamma=profile.gamma, h=h_prime)
    sol_hp = solve_robust(market, profile_hp, uncertainty)
    return ConstraintComparison(
        h=profile.h,
        h_prime=h_prime,
        value_h=sol_h.value,
        value_h_prime=sol_hp.value,
        higher_level_no_better=bool(sol_hp.value <= sol_h.value),
        c_dot_mu_star=float(geometry.c @ sol_h.mu_star),
        solution_h=sol_h,
        solution_h_prime=sol_hp,
    )
