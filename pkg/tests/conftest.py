import numpy as np
import pytest

from driftfolio import (
    InvestorProfile,
    MarketModel,
    UncertaintySet,
    ValidationError,
    load_problem_spec,
)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def random_market(rng, d: int, m: int | None = None) -> MarketModel:
    """Well-conditioned random market: diagonal-dominant sigma, retried if the
    draw is too ill-conditioned for tight identity checks."""
    m = d if m is None else m
    while True:
        sigma = 0.3 * np.eye(d, m) + 0.08 * rng.standard_normal((d, m))
        if np.linalg.cond(sigma @ sigma.T) > 2.5e3:
            continue
        try:
            return MarketModel(
                d=d,
                m=m,
                r=float(rng.uniform(-0.02, 0.05)),
                sigma=sigma,
                T=float(rng.uniform(0.5, 2.0)),
                x0=float(rng.uniform(0.5, 2.0)),
            )
        except ValidationError:
            continue


def random_uncertainty(rng, d: int, kappa: float | None = None) -> UncertaintySet:
    B = rng.standard_normal((d, d))
    Gamma = B @ B.T / d + 0.5 * np.eye(d)
    nu = rng.uniform(-0.1, 0.4, size=d)
    if kappa is None:
        kappa = float(rng.uniform(0.05, 1.0))
    return UncertaintySet(nu=nu, Gamma=Gamma, kappa=kappa)


@pytest.fixture
def symmetric_instance():
    """d = 2 hand-checkable setup: sigma = I, Gamma = I, nu = 0.3, log utility."""
    market = MarketModel(d=2, m=2, r=0.0, sigma=np.eye(2), T=1.0, x0=1.0)
    profile = InvestorProfile(gamma=0.0, h=1.0)
    uncertainty = UncertaintySet(nu=0.3 * np.ones(2), Gamma=np.eye(2), kappa=0.1)
    return market, profile, uncertainty


@pytest.fixture(scope="session")
def eight_asset_spec():
    return load_problem_spec("example-8asset")
