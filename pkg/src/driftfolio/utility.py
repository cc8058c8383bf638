"""Closed-form expected utility of constant strategies and its inverse.

For a constant strategy pi under drift mu the terminal wealth is lognormal:
log X_T = log x0 + b T + sqrt(T) <sigma^T pi, Z> with growth exponent
b = r + pi^T (mu - r 1) - ||sigma^T pi||^2 / 2, which gives

    E[U_gamma(X_T)] = x0^gamma / gamma
                      * exp(gamma T b + gamma^2 T ||sigma^T pi||^2 / 2)

for gamma != 0 and log x0 + T b for gamma = 0. Certainty equivalents are
evaluated in log space so extreme drifts cannot overflow.
"""
from __future__ import annotations

import numpy as np

from .errors import UtilityRangeError, ValidationError
from .model import GAMMA_MAX, MarketModel, UncertaintySet


def _check_gamma(gamma: float) -> None:
    if not gamma <= GAMMA_MAX:
        raise ValidationError(f"gamma must be <= {GAMMA_MAX}, got {gamma}")


def growth_moments(market: MarketModel, pi, mu):
    """Growth exponent b and portfolio variance rate s = ||sigma^T pi||^2."""
    pi = np.asarray(pi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    vol = market.sigma.T @ pi
    s = float(vol @ vol)
    b = market.r + float(pi @ (mu - market.r)) - 0.5 * s
    return b, s


def utility_from_moments(x0: float, T: float, gamma: float, b, s):
    """Vectorized expected utility from growth exponent(s) b and variance rate(s) s."""
    b = np.asarray(b, dtype=float)
    s = np.asarray(s, dtype=float)
    if gamma == 0.0:
        out = np.log(x0) + T * b
    else:
        with np.errstate(over="ignore", under="ignore"):
            out = (
                x0**gamma
                / gamma
                * np.exp(gamma * T * b + 0.5 * gamma**2 * T * s)
            )
    return out if out.ndim else float(out)


def expected_utility_constant(market: MarketModel, pi, mu, gamma: float) -> float:
    """E_mu[U_gamma(X_T^pi)] for a strategy held constant over [0, T]."""
    _check_gamma(gamma)
    b, s = growth_moments(market, pi, mu)
    return utility_from_moments(market.x0, market.T, gamma, b, s)


def certainty_equivalent(value: float, gamma: float) -> float:
    """U_gamma^{-1}(value). Checks that value lies in the range of U_gamma."""
    _check_gamma(gamma)
    if gamma == 0.0:
        return float(np.exp(value))
    if gamma > 0 and not value > 0:
        raise UtilityRangeError(
            f"power utility with gamma={gamma} has range (0, inf); got value {value}"
        )
    if gamma < 0 and not value < 0:
        raise UtilityRangeError(
            f"power utility with gamma={gamma} has range (-inf, 0); got value {value}"
        )
    return float((gamma * value) ** (1.0 / gamma))


def certainty_equivalent_constant(market: MarketModel, pi, mu, gamma: float) -> float:
    """U_gamma^{-1}(E_mu[U_gamma(X_T^pi)]) evaluated directly in log space.

    Equals x0 exp(T (r + pi^T (mu - r 1) - (1 - gamma) ||sigma^T pi||^2 / 2))
    for every gamma < 1, so it stays finite where the plain utility would
    under- or overflow.
    """
    _check_gamma(gamma)
    b, s = growth_moments(market, pi, mu)
    with np.errstate(over="ignore", under="ignore"):
        return float(market.x0 * np.exp(market.T * (b + 0.5 * gamma * s)))


def bond_only_optimal(uncertainty: UncertaintySet, r: float) -> bool:
    """True iff r 1 lies in the uncertainty set.

    In that case the pure bond strategy pi = 0 is optimal for the
    unconstrained-admissibility worst-case problem.
    """
    target = r * np.ones(uncertainty.d)
    return uncertainty.contains(target)
