import numpy as np
import pytest

from relperf import Market, lognormal_market, market_from_csv, market_to_csv


def test_expect_p_basic():
    m = Market(p=[0.5, 0.5], z=[0.5, 1.5])
    assert m.expect_p([1.0, 1.0]) == pytest.approx(1.0)
    assert m.expect_p(m.z) == pytest.approx(1.0)
    m2 = Market(p=[0.25, 0.75], z=[2.8, 0.4])
    assert m2.expect_p([4.0, 0.0]) == pytest.approx(1.0)


def test_expect_q_is_probability(hand_market):
    assert hand_market.expect_q(np.full(2, 3.7)) == pytest.approx(3.7)


def test_expect_q_hand_values(hand_market):
    # E^Q[(2, 2/3)] = 1/2*1/2*2 + 1/2*3/2*2/3 = 1
    assert hand_market.expect_q([2.0, 2.0 / 3.0]) == pytest.approx(1.0, abs=1e-14)
    # E^Q[z^{-1/2}] = E_P[z^{1/2}] = (sqrt(.5) + sqrt(1.5))/2
    expected = (np.sqrt(0.5) + np.sqrt(1.5)) / 2.0
    assert expected == pytest.approx(0.96593, abs=1e-5)
    got = hand_market.expect_q(hand_market.z ** (-0.5))
    assert got == pytest.approx(expected, abs=1e-14)


def test_expect_q_matrix_argument(hand_market):
    f = np.column_stack([hand_market.z**0.0, hand_market.z ** (-1.0)])
    out = hand_market.expect_q(f)
    assert out.shape == (2,)
    np.testing.assert_allclose(out, [1.0, 1.0], atol=1e-14)


def test_lognormal_theta_zero_is_deterministic():
    m = lognormal_market(0.0, 1.0, 16)
    np.testing.assert_allclose(m.z, 1.0, atol=1e-15)


def test_lognormal_density_normalized_exactly():
    m = lognormal_market(0.3, 1.0, 64)
    assert abs(m.p @ m.z - 1.0) <= 1e-15
    assert abs(m.p.sum() - 1.0) <= 1e-14


def test_lognormal_inverse_density_prices_the_constant():
    m = lognormal_market(0.3, 1.0, 64)
    assert m.expect_q(1.0 / m.z) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("r", [-1.0, 0.5, 2.0])
def test_lognormal_moments(r):
    """E_P[z^r] = exp(r(r-1) theta^2 T / 2) for lognormal z."""
    theta, horizon = 0.3, 1.0
    m = lognormal_market(theta, horizon, 64)
    exact = np.exp(r * (r - 1.0) * theta**2 * horizon / 2.0)
    assert m.expect_p(m.z**r) == pytest.approx(exact, rel=1e-8)


def test_lognormal_drops_negligible_weights():
    m = lognormal_market(0.3, 1.0, 200)
    assert np.all(m.p >= 1e-300)
    assert abs(m.p.sum() - 1.0) <= 1e-14


def test_csv_round_trip(tmp_path):
    m = lognormal_market(0.2, 2.0, 16)
    path = tmp_path / "market.csv"
    market_to_csv(m, path)
    back = market_from_csv(path)
    np.testing.assert_array_equal(back.p, m.p)
    np.testing.assert_array_equal(back.z, m.z)


def test_validation():
    with pytest.raises(ValueError):
        Market(p=[0.5, 0.6], z=[1.0, 1.0])  # probabilities do not sum to 1
    with pytest.raises(ValueError):
        Market(p=[0.5, 0.5], z=[1.0, 2.0])  # E_P[z] != 1
    with pytest.raises(ValueError):
        Market(p=[1.0, 0.0], z=[1.0, 1.0])  # zero probability atom
    with pytest.raises(ValueError):
        Market(p=[0.5, 0.5], z=[-0.5, 2.5])  # negative density
    with pytest.raises(ValueError):
        lognormal_market(0.3, 1.0, 1)
