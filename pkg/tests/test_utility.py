import numpy as np
import pytest

from driftfolio import (
    MarketModel,
    UncertaintySet,
    UtilityRangeError,
    ValidationError,
    bond_only_optimal,
    certainty_equivalent,
    certainty_equivalent_constant,
    expected_utility_constant,
)
from driftfolio.utility import growth_moments
from conftest import random_market, rng_for


def test_growth_moments_match_manual_computation():
    market = MarketModel(
        d=2, m=2, r=0.01, sigma=np.array([[0.2, 0.0], [0.1, 0.3]]), T=2.0, x0=1.5
    )
    pi = np.array([0.4, 0.6])
    mu = np.array([0.05, 0.08])
    b, s = growth_moments(market, pi, mu)
    vol = market.sigma.T @ pi
    assert s == pytest.approx(vol @ vol, abs=1e-15)
    assert b == pytest.approx(0.01 + pi @ (mu - 0.01) - 0.5 * s, abs=1e-15)


def test_log_utility_value():
    market = MarketModel(d=2, m=2, r=0.0, sigma=np.eye(2), T=1.0, x0=2.0)
    pi = np.array([0.5, 0.5])
    mu = np.array([0.3, 0.3])
    # b = 0.3 - 0.25, s = 0.5
    assert expected_utility_constant(market, pi, mu, 0.0) == pytest.approx(
        np.log(2.0) + 0.05, abs=1e-14
    )


@pytest.mark.parametrize("gamma", [-2.0, -1.0, -0.3, 0.0, 0.4, 0.9])
def test_certainty_equivalent_inverts_utility(gamma):
    rng = rng_for(23)
    market = random_market(rng, 3)
    pi = rng.uniform(-0.5, 1.0, size=3)
    mu = rng.uniform(0.0, 0.2, size=3)
    value = expected_utility_constant(market, pi, mu, gamma)
    ce = certainty_equivalent(value, gamma)
    assert ce == pytest.approx(
        certainty_equivalent_constant(market, pi, mu, gamma), rel=1e-12
    )
    # re-applying the utility recovers the value
    back = np.log(ce) if gamma == 0.0 else ce**gamma / gamma
    assert back == pytest.approx(value, rel=1e-12)


def test_certainty_equivalent_range_checks():
    with pytest.raises(UtilityRangeError):
        certainty_equivalent(-1.0, 0.5)  # positive gamma needs positive value
    with pytest.raises(UtilityRangeError):
        certainty_equivalent(1.0, -1.0)  # negative gamma needs negative value
    with pytest.raises(ValidationError):
        certainty_equivalent(1.0, 1.0)  # gamma must stay below 1


def test_log_space_ce_survives_extreme_drift():
    market = MarketModel(d=2, m=2, r=0.0, sigma=np.eye(2), T=1.0, x0=1.0)
    pi = np.array([0.5, 0.5])
    mu = np.array([-1e6, -1e6])
    gamma = -1.0
    # plain utility overflows to -inf, the log-space CE stays finite (tiny)
    ce = certainty_equivalent_constant(market, pi, mu, gamma)
    assert ce >= 0.0 and np.isfinite(ce)


def test_bond_only_optimal_is_ellipsoid_membership():
    uset = UncertaintySet(nu=0.3 * np.ones(2), Gamma=np.eye(2), kappa=0.4)
    assert not bond_only_optimal(uset, r=0.0)  # distance 0.3*sqrt(2) > 0.4
    uset_wide = UncertaintySet(nu=0.3 * np.ones(2), Gamma=np.eye(2), kappa=0.43)
    assert bond_only_optimal(uset_wide, r=0.0)  # 0.3*sqrt(2) ~ 0.4243 < 0.43
