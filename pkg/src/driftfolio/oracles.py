"""Independent verification tools: brute-force dual search and Monte Carlo.

Brute force minimizes g over the sphere ||rho|| = kappa (the minimum of g
on the ball is attained on the boundary) by dense uniform sampling plus a
shrinking-step tangent-space refinement. Monte Carlo samples the terminal
wealth of constant strategies from its exact lognormal law, so there is no
discretization bias to account for.

All randomness comes from numpy's counter-based Philox generator, keyed by
an explicit seed, so sample streams are reproducible across platforms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .model import MarketModel


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def sample_sphere(dim: int, kappa: float, n: int, rng) -> np.ndarray:
    """n points uniform on the sphere of radius kappa (normalized Gaussians)."""
    z = rng.standard_normal((n, dim))
    return kappa * z / np.linalg.norm(z, axis=1, keepdims=True)


def brute_force_worst_case(g, dim: int, kappa: float, n_grid: int = 100_000,
                           n_refine: int = 60, seed: int = 0):
    """(rho_best, g_best) over the boundary sphere ||rho|| = kappa.

    g must accept a batch of rho rows. After the dense scan, n_refine rounds
    of coordinate descent in the tangent space at the incumbent (projected
    back to the sphere, step halved when no direction improves) polish the
    best point. Deterministic for a fixed seed.
    """
    if not kappa > 0:
        raise ValidationError(f"kappa must be positive, got {kappa}")
    if n_grid < 1000:
        raise ValidationError(f"n_grid must be at least 1000, got {n_grid}")
    rng = _rng(seed)
    rhos = sample_sphere(dim, kappa, n_grid, rng)
    vals = np.asarray(g(rhos))
    best = int(np.argmin(vals))
    rho, g_rho = rhos[best], float(vals[best])

    step = 0.5 * kappa
    for _ in range(n_refine):
        # orthonormal tangent basis at rho: null space of the radial direction
        radial = rho / np.linalg.norm(rho)
        q, _ = np.linalg.qr(np.column_stack([radial, np.eye(dim)])[:, : dim])
        tangent = q[:, 1:]
        candidates = rho + step * np.concatenate([tangent.T, -tangent.T])
        candidates *= kappa / np.linalg.norm(candidates, axis=1, keepdims=True)
        cand_vals = np.asarray(g(candidates))
        k = int(np.argmin(cand_vals))
        if cand_vals[k] < g_rho:
            rho, g_rho = candidates[k], float(cand_vals[k])
        else:
            step *= 0.5
    return rho, g_rho


def simulate_terminal_wealth(market: MarketModel, pi, mu, n_paths: int,
                             seed: int = 0, chunk: int = 200_000) -> np.ndarray:
    """Exact lognormal samples of X_T for a constant strategy.

    log X_T = log x0 + (r + pi^T (mu - r 1) - ||sigma^T pi||^2 / 2) T
              + sqrt(T) <sigma^T pi, Z>,   Z standard normal in m dimensions.
    """
    if n_paths < 1:
        raise ValidationError(f"n_paths must be >= 1, got {n_paths}")
    pi = np.asarray(pi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    vol = market.sigma.T @ pi
    if np.any(pi) and not np.any(vol):
        # impossible for full-rank sigma; guards a corrupted market object
        raise ValidationError("sigma^T pi vanished for a nonzero pi")
    s = float(vol @ vol)
    drift = market.r + float(pi @ (mu - market.r)) - 0.5 * s
    log_x0 = np.log(market.x0)
    rng = _rng(seed)
    out = np.empty(n_paths)
    for start in range(0, n_paths, chunk):
        stop = min(start + chunk, n_paths)
        z = rng.standard_normal((stop - start, market.m))
        out[start:stop] = np.exp(
            log_x0 + drift * market.T + np.sqrt(market.T) * z @ vol
        )
    return out


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with standard error = sample std / sqrt(n_paths)."""

    mean: float
    stderr: float
    n_paths: int
    seed: int | None = None

    def within(self, reference: float, n_sigmas: float = 3.0) -> bool:
        return abs(self.mean - reference) <= n_sigmas * self.stderr


def mc_expected_utility(samples, gamma: float, seed: int | None = None) -> McEstimate:
    """Pathwise U_gamma applied to wealth samples, with mean and stderr."""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValidationError("no wealth samples given")
    if np.any(samples <= 0):
        raise ValidationError("wealth samples must be strictly positive")
    if gamma == 0.0:
        utils = np.log(samples)
    else:
        utils = samples**gamma / gamma
    n = samples.size
    stderr = float(utils.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean=float(utils.mean()), stderr=stderr, n_paths=n, seed=seed)


def mc_estimate_utility(market: MarketModel, pi, mu, gamma: float,
                        n_paths: int, seed: int = 0) -> McEstimate:
    """Convenience wrapper: simulate terminal wealth and estimate E[U_gamma]."""
    samples = simulate_terminal_wealth(market, pi, mu, n_paths, seed=seed)
    return mc_expected_utility(samples, gamma, seed=seed)
