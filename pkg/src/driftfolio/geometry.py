"""Reduction of the sum constraint <pi, 1> = h to an unconstrained problem.

The pairwise-difference matrix D eliminates the last asset, and the derived
quantities A = D^T (D S D^T)^{-1} D and c = (I - A S) e_d (with S = sigma
sigma^T) carry the whole constrained problem: the optimal strategy for a
known drift mu is A mu / (1 - gamma) + h c.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import SingularGeometryError, ValidationError
from .model import IDENTITY_RTOL, MarketModel


def build_difference_matrix(d: int) -> np.ndarray:
    """The (d-1) x d matrix with rows e_i - e_d, i = 1..d-1."""
    if d < 2:
        raise ValidationError(f"difference matrix needs d >= 2, got d={d}")
    D = np.zeros((d - 1, d))
    D[:, : d - 1] = np.eye(d - 1)
    D[:, d - 1] = -1.0
    return D


@dataclass(frozen=True)
class ConstraintGeometry:
    """D, A and c for one market. A is symmetric PSD with kernel span{1}."""

    D: np.ndarray
    A: np.ndarray
    c: np.ndarray

    @property
    def d(self) -> int:
        return self.A.shape[0]


def build_constraint_geometry(market: MarketModel) -> ConstraintGeometry:
    """Assemble A and c; the inner inverse uses a Cholesky factorization."""
    D = build_difference_matrix(market.d)
    S = market.covariance
    reduced = D @ S @ D.T
    try:
        factor = cho_factor(reduced, lower=True)
    except np.linalg.LinAlgError:
        raise SingularGeometryError(
            "D sigma sigma^T D^T is not positive definite; sigma is rank deficient"
        ) from None
    A = D.T @ cho_solve(factor, D)
    A = 0.5 * (A + A.T)  # symmetrize away factorization round-off
    e_d = np.zeros(market.d)
    e_d[-1] = 1.0
    c = e_d - A @ (S @ e_d)
    for arr in (D, A, c):
        arr.setflags(write=False)
    return ConstraintGeometry(D=D, A=A, c=c)


@dataclass(frozen=True)
class IdentityReport:
    """Max-abs deviations of the four algebraic identities of A and c."""

    dev_kernel: float  # || A 1 ||_max
    dev_projection: float  # || A S A - A ||_max
    dev_c_orthogonal: float  # || c^T S A ||_max
    dev_c_sum: float  # | c^T 1 - 1 |
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(
            self.dev_kernel, self.dev_projection, self.dev_c_orthogonal, self.dev_c_sum
        )

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def check_identities(
    geometry: ConstraintGeometry, market: MarketModel, tol: float | None = None
) -> IdentityReport:
    """Diagnostic check of A 1 = 0, A S A = A, c^T S A = 0 and c^T 1 = 1."""
    A, c = geometry.A, geometry.c
    S = market.covariance
    ones = np.ones(geometry.d)
    if tol is None:
        tol = IDENTITY_RTOL * (1.0 + np.max(np.abs(A)))
    return IdentityReport(
        dev_kernel=float(np.max(np.abs(A @ ones))),
        dev_projection=float(np.max(np.abs(A @ S @ A - A))),
        dev_c_orthogonal=float(np.max(np.abs(c @ S @ A))),
        dev_c_sum=float(abs(c @ ones - 1.0)),
        tol=float(tol),
    )
