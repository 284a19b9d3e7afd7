import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twohop import (
    NetworkParams,
    occupancy_distribution,
    relay_service_rate,
    solve_rbp,
    throughput_capacity,
    transmission_probabilities,
)

DESK = NetworkParams(n=20, m=4, nu=1, delta=1.0, B=5)
CASE1 = NetworkParams(n=100, m=8, nu=1, delta=1.0, B=8)


def occupancy_direct(n: int, B: int, rho: float) -> np.ndarray:
    """Oracle: evaluate the stationary weights with explicit binomials."""
    weights = [math.comb(n - 3 + k, k) * rho**k for k in range(B + 1)]
    total = sum(weights)
    return np.array([w / total for w in weights])


def relay_rate_sum(n: int, k: int, p_rd: float) -> float:
    """Oracle: the combinatorial average the closed form collapses."""
    return sum(
        math.comb(n - 2, i) * math.comb(k - 1, i - 1)
        / math.comb(n - 3 + k, k) * (i * p_rd / (n - 2))
        for i in range(1, k + 1)
    )


def test_occupancy_distribution_example():
    # C = (1, 2, 3), weights (1, 1, 0.75) at rho = 0.5
    pi = occupancy_distribution(4, 2, 0.5)
    assert np.allclose(pi, [4 / 11, 4 / 11, 3 / 11], atol=1e-15)


@given(
    n=st.integers(2, 30).map(lambda k: 2 * k),
    B=st.integers(1, 12),
    rho=st.floats(0.0, 3.0, allow_nan=False),
)
def test_occupancy_matches_direct_evaluation(n, B, rho):
    pi = occupancy_distribution(n, B, rho)
    assert abs(pi.sum() - 1.0) <= 1e-12
    assert (pi >= 0).all()
    assert np.allclose(pi, occupancy_direct(n, B, rho), rtol=1e-12, atol=1e-15)


@given(n=st.integers(2, 200).map(lambda k: 2 * k), B=st.integers(1, 40))
def test_occupancy_at_unit_ratio_closed_form(n, B):
    # at rho_s = 1 the blocking mass telescopes to (n-2)/(n-2+B)
    pi = occupancy_distribution(n, B, 1.0)
    assert abs(pi[B] - (n - 2) / (n - 2 + B)) <= 1e-12


def test_occupancy_rescaling_survives_extreme_weights():
    pi = occupancy_distribution(400, 1000, 0.99)
    assert np.isfinite(pi).all() and abs(pi.sum() - 1.0) <= 1e-12


def test_relay_service_rate_edges():
    params = NetworkParams(n=4, m=2, nu=1, delta=1.0, B=8)
    assert relay_service_rate(params, 0) == 0.0
    assert relay_service_rate(params, 1, p_rd=1.0) == 0.5
    big = NetworkParams(n=4, m=2, nu=1, delta=1.0, B=10**6)
    assert relay_service_rate(big, 10**6, p_rd=1.0) == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("n", [4, 10, 34, 60])
def test_relay_service_rate_equals_sum_form(n):
    params = NetworkParams(n=n, m=4, nu=1, delta=1.0, B=20)
    for k in range(1, 21):
        closed = relay_service_rate(params, k, p_rd=0.37)
        assert closed == pytest.approx(relay_rate_sum(n, k, 0.37), rel=1e-12)


def test_zero_traffic_fixed_point():
    sol = solve_rbp(DESK)
    consts = transmission_probabilities(DESK)
    assert sol.p_b == 0.0
    assert sol.mu_s == consts.p_sd + consts.p_sr
    assert sol.lambda_r == 0.0
    assert np.array_equal(sol.pi, np.eye(DESK.B + 1)[0])


def test_blocking_solution_invariants():
    lam0 = throughput_capacity(DESK)
    consts = transmission_probabilities(DESK)
    for frac in (0.2, 0.6, 0.95, 1.3):
        sol = solve_rbp(DESK.with_lam(frac * lam0))
        assert abs(sol.pi.sum() - 1.0) <= 1e-12
        assert sol.p_b == sol.pi[DESK.B]
        assert consts.p_sd <= sol.mu_s <= consts.p_sd + consts.p_sr
        assert sol.residual <= 1e-10
        assert sol.lambda_r == pytest.approx(sol.rho_s * consts.p_sr, rel=1e-12)


def test_case1_blocking_regression():
    # frozen after cross-checking a 2e7-slot simulation at this load
    # (seed 11 measured rbp_hat = 0.53056, theory-sim gap 0.0055)
    lam0 = throughput_capacity(CASE1)
    sol = solve_rbp(CASE1.with_lam(0.6 * lam0))
    assert sol.p_b == pytest.approx(0.5360090518238577, abs=1e-9)
    assert lam0 == pytest.approx(0.001167917996773809, rel=1e-9)


def test_bisect_and_damped_agree():
    lam0 = throughput_capacity(DESK)
    for frac in (0.1, 0.5, 0.9, 1.1):
        params = DESK.with_lam(frac * lam0)
        a = solve_rbp(params, method="bisect")
        b = solve_rbp(params, method="damped")
        assert abs(a.p_b - b.p_b) <= 1e-9


def test_blocking_monotone_in_load():
    lam0 = throughput_capacity(DESK)
    grid = np.linspace(0.0, 1.4 * lam0, 25)
    pbs = [solve_rbp(DESK.with_lam(float(l))).p_b for l in grid]
    assert all(b - a >= -1e-12 for a, b in zip(pbs, pbs[1:]))


def test_relay_ops_reject_small_networks():
    from twohop import ParameterError

    with pytest.raises(ParameterError):
        solve_rbp(NetworkParams(n=2, m=2, lam=0.1))
    with pytest.raises(ParameterError):
        throughput_capacity(NetworkParams(n=2, m=2))


@pytest.mark.parametrize(
    "params",
    [
        DESK,
        CASE1,
        NetworkParams(n=50, m=5, nu=1, delta=1.0, B=8),
        NetworkParams(n=400, m=16, nu=1, delta=1.0, B=8),
        NetworkParams(n=6, m=3, nu=1, delta=0.5, B=1),
        NetworkParams(n=12, m=6, nu=2, delta=0.0, B=3),
    ],
)
def test_capacity_closed_form_identity(params):
    # rho_s(lam0) = 1, so lam0 = p_sd + p_sr * B / (n - 2 + B)
    c = transmission_probabilities(params)
    expected = c.p_sd + c.p_sr * params.B / (params.n - 2 + params.B)
    lam0 = throughput_capacity(params)
    assert lam0 == pytest.approx(expected, rel=1e-9)
    assert lam0 >= c.p_sd
    assert throughput_capacity(params, method="damped") == pytest.approx(lam0, abs=1e-10)


def test_capacity_single_buffer_closed_form():
    params = NetworkParams(n=10, m=4, nu=1, delta=1.0, B=1)
    c = transmission_probabilities(params)
    assert throughput_capacity(params) == pytest.approx(
        c.p_sd + c.p_sr / (params.n - 1), rel=1e-9
    )


def test_large_buffer_limits():
    params = NetworkParams(n=20, m=4, nu=1, delta=1.0, B=1000)
    c = transmission_probabilities(params)
    lam0 = throughput_capacity(params)
    # capacity approaches the full opportunity rate as B grows
    assert abs(lam0 - (c.p_sd + c.p_sr)) <= c.p_sr * (params.n - 2) / (params.n - 2 + params.B) * 1.01
    # blocking vanishes at a stable load when the buffer is effectively unbounded
    sol = solve_rbp(params.with_lam(0.5 * (c.p_sd + c.p_sr)))
    assert sol.p_b < 1e-6
