"""Cholesky factor of the ellipsoid shape and spectrum of tau^T A tau.

tau^T A tau inherits from A a one-dimensional kernel spanned by tau^{-1} 1;
its normalized version is pinned as the first eigenvector (exact direction
and sign), the corresponding eigenvalue is clamped to exactly zero, and the
remaining eigenvectors are re-orthogonalized against it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh, solve_triangular

from .errors import (
    DegenerateSpectrumError,
    KernelMismatchError,
    NotPositiveDefiniteError,
)
from .geometry import ConstraintGeometry

# eigenvalue treated as zero iff below ZERO_EIG_RTOL * max(lambda_max, 1)
ZERO_EIG_RTOL = 1e-10


def cholesky_factor(Gamma) -> np.ndarray:
    """Lower-triangular tau with tau tau^T = Gamma."""
    Gamma = np.asarray(Gamma, dtype=float)
    try:
        return np.linalg.cholesky(Gamma)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(
            "Gamma is not positive definite (Cholesky pivot <= 0)"
        ) from None


@dataclass(frozen=True)
class SpectralData:
    """Eigendecomposition of tau^T A tau, eigenvalues ascending.

    eigenvectors holds v_1..v_d as columns; v_1 = tau^{-1} 1 / ||tau^{-1} 1||
    by construction and eigenvalues[0] == 0 exactly.
    """

    tau: np.ndarray
    tau_inv_one: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def d(self) -> int:
        return self.tau.shape[0]

    @property
    def kernel_norm(self) -> float:
        """||tau^{-1} 1||, the normalization constant of v_1."""
        return float(np.linalg.norm(self.tau_inv_one))


def spectral_decompose(geometry: ConstraintGeometry, tau) -> SpectralData:
    """Symmetric eigendecomposition of tau^T A tau with the kernel pinned."""
    tau = np.asarray(tau, dtype=float)
    M = tau.T @ geometry.A @ tau
    M = 0.5 * (M + M.T)
    lams, V = eigh(M)

    zero_cut = ZERO_EIG_RTOL * max(lams[-1], 1.0)
    n_zero = int(np.sum(lams < zero_cut))
    if n_zero > 1:
        raise DegenerateSpectrumError(
            f"{n_zero} eigenvalues below {zero_cut:.3e}; the kernel of tau^T A tau "
            "must be one-dimensional"
        )
    if n_zero == 0:
        raise KernelMismatchError(
            f"smallest eigenvalue {lams[0]:.3e} is above the zero threshold "
            f"{zero_cut:.3e}; expected a zero eigenvalue with eigenvector tau^{{-1}} 1"
        )
    lams = lams.copy()
    lams[0] = 0.0

    tau_inv_one = solve_triangular(tau, np.ones(geometry.d), lower=True)
    v1 = tau_inv_one / np.linalg.norm(tau_inv_one)
    V = V.copy()
    V[:, 0] = v1
    # re-orthogonalize the positive-eigenvalue vectors against the exact kernel
    for i in range(1, geometry.d):
        V[:, i] -= (v1 @ V[:, i]) * v1
        V[:, i] /= np.linalg.norm(V[:, i])

    lams.setflags(write=False)
    V.setflags(write=False)
    tau = tau.copy()
    tau.setflags(write=False)
    tau_inv_one.setflags(write=False)
    return SpectralData(tau=tau, tau_inv_one=tau_inv_one, eigenvalues=lams, eigenvectors=V)
