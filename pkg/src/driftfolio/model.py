"""Core domain types: market model, investor profile, drift uncertainty set.

All types are immutable after construction and validate their invariants in
``__post_init__``; instances can be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# sigma counts as full row rank iff s_min > RANK_RTOL * s_max
RANK_RTOL = 1e-10
# formulas divide by 1 - gamma, so keep a safety margin below 1
GAMMA_MAX = 1.0 - 1e-8
# default relative tolerance for the algebraic identity checks
IDENTITY_RTOL = 1e-10


def _as_matrix(x, name):
    a = np.array(x, dtype=float)
    if a.ndim != 2:
        raise ValidationError(f"{name} must be a 2-d matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def _as_vector(x, name):
    a = np.atleast_1d(np.array(x, dtype=float))
    if a.ndim != 1:
        raise ValidationError(f"{name} must be a 1-d vector, got ndim={a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True)
class MarketModel:
    """Black-Scholes type market: d risky assets driven by m Brownian motions.

    sigma is the d x m volatility matrix (full row rank), r the risk-free
    rate, T the horizon and x0 the initial wealth.
    """

    d: int
    m: int
    r: float
    sigma: np.ndarray
    T: float
    x0: float

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError(f"need at least two risky assets, got d={self.d}")
        if self.m < self.d:
            raise ValidationError(f"need m >= d, got m={self.m}, d={self.d}")
        if not self.T > 0:
            raise ValidationError(f"horizon must be positive, got T={self.T}")
        if not self.x0 > 0:
            raise ValidationError(f"initial wealth must be positive, got x0={self.x0}")
        sigma = _as_matrix(self.sigma, "sigma")
        if sigma.shape != (self.d, self.m):
            raise ValidationError(
                f"sigma must have shape ({self.d}, {self.m}), got {sigma.shape}"
            )
        svals = np.linalg.svd(sigma, compute_uv=False)
        if svals[-1] <= RANK_RTOL * svals[0]:
            raise ValidationError(
                "sigma is rank deficient: smallest singular value "
                f"{svals[-1]:.3e} vs largest {svals[0]:.3e}"
            )
        sigma.setflags(write=False)
        object.__setattr__(self, "sigma", sigma)

    @property
    def covariance(self) -> np.ndarray:
        """sigma sigma^T, the d x d instantaneous covariance of returns."""
        return self.sigma @ self.sigma.T


@dataclass(frozen=True)
class InvestorProfile:
    """Risk aversion gamma (< 1) and total risky-investment level h (> 0).

    gamma = 0 selects logarithmic utility, any other value power utility
    x^gamma / gamma; the strategy constraint is <pi, 1> = h.
    """

    gamma: float
    h: float

    def __post_init__(self):
        if not self.gamma <= GAMMA_MAX:
            raise ValidationError(f"gamma must be <= {GAMMA_MAX}, got {self.gamma}")
        if not self.h > 0:
            raise ValidationError(f"constraint level must be positive, got h={self.h}")

    @property
    def one_minus_gamma(self) -> float:
        return 1.0 - self.gamma


@dataclass(frozen=True)
class UncertaintySet:
    """Ellipsoid of admissible drifts: (mu - nu)^T Gamma^{-1} (mu - nu) <= kappa^2."""

    nu: np.ndarray
    Gamma: np.ndarray
    kappa: float

    def __post_init__(self):
        nu = _as_vector(self.nu, "nu")
        Gamma = _as_matrix(self.Gamma, "Gamma")
        d = nu.shape[0]
        if Gamma.shape != (d, d):
            raise ValidationError(
                f"Gamma must have shape ({d}, {d}), got {Gamma.shape}"
            )
        sym_dev = np.max(np.abs(Gamma - Gamma.T))
        if sym_dev > IDENTITY_RTOL * (1.0 + np.max(np.abs(Gamma))):
            raise ValidationError(f"Gamma is not symmetric (max asymmetry {sym_dev:.3e})")
        try:
            np.linalg.cholesky(Gamma)
        except np.linalg.LinAlgError:
            raise ValidationError("Gamma is not positive definite") from None
        if not self.kappa >= 0:
            raise ValidationError(f"kappa must be >= 0, got {self.kappa}")
        nu.setflags(write=False)
        Gamma.setflags(write=False)
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "Gamma", Gamma)

    @property
    def d(self) -> int:
        return self.nu.shape[0]

    def contains(self, mu) -> bool:
        """Membership test, boundary inclusive."""
        diff = np.asarray(mu, dtype=float) - self.nu
        q = diff @ np.linalg.solve(self.Gamma, diff)
        return bool(q <= self.kappa**2 * (1.0 + 1e-12))
