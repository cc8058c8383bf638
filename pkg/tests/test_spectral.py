import numpy as np
import pytest

from driftfolio import (
    NotPositiveDefiniteError,
    build_constraint_geometry,
    cholesky_factor,
    spectral_decompose,
)
from conftest import random_market, random_uncertainty, rng_for


def _random_spectral(seed, d):
    rng = rng_for(seed)
    market = random_market(rng, d)
    geometry = build_constraint_geometry(market)
    tau = cholesky_factor(random_uncertainty(rng, d).Gamma)
    return geometry, tau, spectral_decompose(geometry, tau)


@pytest.mark.parametrize("d", [2, 4, 8])
def test_reconstruction_and_orthonormality(d):
    geometry, tau, sp = _random_spectral(101 + d, d)
    M = tau.T @ geometry.A @ tau
    recon = sp.eigenvectors @ np.diag(sp.eigenvalues) @ sp.eigenvectors.T
    assert np.max(np.abs(recon - M)) <= 1e-11 * (1.0 + np.max(np.abs(M)))
    gram = sp.eigenvectors.T @ sp.eigenvectors
    assert np.max(np.abs(gram - np.eye(d))) <= 1e-12


def test_kernel_eigenvector_is_pinned_exactly():
    geometry, tau, sp = _random_spectral(7, 5)
    assert sp.eigenvalues[0] == 0.0
    assert np.all(np.diff(sp.eigenvalues) >= 0)
    expected = sp.tau_inv_one / np.linalg.norm(sp.tau_inv_one)
    assert np.array_equal(sp.eigenvectors[:, 0], expected)
    # kernel_norm is the normalization constant ||tau^{-1} 1||
    assert sp.kernel_norm == pytest.approx(
        np.linalg.norm(np.linalg.solve(tau, np.ones(5))), rel=1e-13
    )


def test_positive_eigenvalues_strictly_positive():
    _, _, sp = _random_spectral(13, 6)
    assert np.all(sp.eigenvalues[1:] > 0)


def test_identity_gamma_reduces_to_a_spectrum():
    rng = rng_for(29)
    market = random_market(rng, 4)
    geometry = build_constraint_geometry(market)
    sp = spectral_decompose(geometry, np.eye(4))
    lam_a = np.linalg.eigvalsh(geometry.A)
    lam_a[0] = 0.0
    assert sp.eigenvalues == pytest.approx(lam_a, abs=1e-12)
    assert sp.eigenvectors[:, 0] == pytest.approx(np.ones(4) / 2.0, abs=1e-15)


def test_non_positive_definite_gamma_rejected():
    with pytest.raises(NotPositiveDefiniteError):
        cholesky_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
