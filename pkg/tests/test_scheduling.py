import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import twohop.scheduling as scheduling
from twohop import NetworkParams, compute_epsilon, contact_probabilities
from twohop import transmission_probabilities
from twohop.acceptance import placement_oracle


def enumerate_contact_probabilities(n: int, m: int, nu: int):
    """Brute-force oracle: walk every placement of n nodes on the m x m
    torus and count contact events at cell (0, 0), exactly."""
    m2 = m * m
    reach = nu - 1

    def in_cov(cell: int) -> bool:
        r, c = divmod(cell, m)
        return min(r, m - r) <= reach and min(c, m - c) <= reach

    cov = [in_cov(c) for c in range(m2)]
    hits_p = 0
    hits_q = 0
    for placement in itertools.product(range(m2), repeat=n):
        n_in_c = sum(1 for c in placement if c == 0)
        n_in_cov = sum(1 for c in placement if cov[c])
        if n_in_c >= 1 and n_in_cov >= 2:
            hits_p += 1
        for j in range(0, n, 2):
            a, b = placement[j], placement[j + 1]
            if (a == 0 and cov[b]) or (b == 0 and cov[a]):
                hits_q += 1
                break
    total = m2**n
    return Fraction(hits_p, total), Fraction(hits_q, total)


@pytest.mark.parametrize(
    "params,expected",
    [
        (dict(n=4, m=8, nu=1, delta=1.0), (4, 4, 1)),
        (dict(n=4, m=2, nu=1, delta=1.0), (2, 1, 1)),
        (dict(n=4, m=16, nu=2, delta=1.0), (8, 4, 9)),
    ],
)
def test_epsilon_examples(params, expected):
    assert tuple(compute_epsilon(NetworkParams(**params))) == expected


@pytest.mark.parametrize(
    "n,m,nu,p_exact,q_exact",
    [
        (2, 2, 1, Fraction(1, 16), Fraction(1, 16)),
        (4, 2, 1, Fraction(67, 256), Fraction(31, 256)),
    ],
)
def test_contact_probabilities_exact_values(n, m, nu, p_exact, q_exact):
    p, q = contact_probabilities(NetworkParams(n=n, m=m, nu=nu))
    assert abs(p - float(p_exact)) <= 1e-15
    assert abs(q - float(q_exact)) <= 1e-15
    p_enum, q_enum = enumerate_contact_probabilities(n, m, nu)
    assert (p_enum, q_enum) == (p_exact, q_exact)


@pytest.mark.parametrize("n,m,nu", [(2, 2, 1), (4, 2, 1), (4, 4, 2), (6, 2, 1)])
def test_contact_probabilities_match_enumeration(n, m, nu):
    p, q = contact_probabilities(NetworkParams(n=n, m=m, nu=nu))
    p_enum, q_enum = enumerate_contact_probabilities(n, m, nu)
    assert abs(p - float(p_enum)) <= 1e-13
    assert abs(q - float(q_enum)) <= 1e-13


def test_contact_probabilities_match_placement_sampling():
    for n, m, nu in ((4, 2, 1), (10, 4, 2)):
        params = NetworkParams(n=n, m=m, nu=nu)
        p, q = contact_probabilities(params)
        p_hat, q_hat = placement_oracle(params, samples=200_000, seed=1)
        for truth, est in ((p, p_hat), (q, q_hat)):
            sigma = math.sqrt(truth * (1 - truth) / 200_000)
            assert abs(est - truth) <= 5 * sigma


def test_log_domain_path_matches_exact_path(monkeypatch):
    cases = [(4, 2, 1), (20, 4, 1), (100, 8, 1), (60, 16, 2)]
    exact = [contact_probabilities(NetworkParams(n=n, m=m, nu=nu)) for n, m, nu in cases]
    monkeypatch.setattr(scheduling, "_EXACT_BITS", 0)
    for (n, m, nu), (p_ref, q_ref) in zip(cases, exact):
        p, q = contact_probabilities(NetworkParams(n=n, m=m, nu=nu))
        assert abs(p - p_ref) <= 1e-12 * max(p_ref, 1e-300)
        assert abs(q - q_ref) <= 1e-12 * max(q_ref, 1e-300)


def test_large_network_stays_finite():
    # direct powers of m^(2n) are far beyond float range here
    p, q = contact_probabilities(NetworkParams(n=400, m=16))
    assert 0.0 < q < p < 1.0


def test_vanishing_colocation_for_sparse_grid():
    p, q = contact_probabilities(NetworkParams(n=4, m=512))
    assert 0.0 <= q <= p < 1e-4


def test_transmission_probability_example():
    c = transmission_probabilities(NetworkParams(n=4, m=2, nu=1, delta=1.0))
    assert abs(c.p_sd - 31 / 1024) <= 1e-15
    assert abs(c.p_sr - 9 / 512) <= 1e-15
    assert c.p_rd == c.p_sr


@given(
    n=st.integers(1, 30).map(lambda k: 2 * k),
    m=st.integers(1, 12),
    delta=st.floats(0.0, 3.0, allow_nan=False),
)
def test_scheduling_constants_invariants(n, m, delta):
    nu_max = (m + 1) // 2
    for nu in range(1, min(nu_max, 3) + 1):
        c = transmission_probabilities(NetworkParams(n=n, m=m, nu=nu, delta=delta))
        assert c.epsilon == min(math.ceil((1 + delta) * math.sqrt(2) * nu + nu), m)
        assert c.K == (m * m) // (c.epsilon**2)
        assert c.l == (2 * nu - 1) ** 2
        assert 0.0 <= c.q <= c.p <= 1.0
        assert c.p_sr == c.p_rd
        assert c.p_sd >= 0.0 and c.p_sr >= 0.0


@given(m=st.integers(2, 16))
def test_two_nodes_make_p_equal_q(m):
    p, q = contact_probabilities(NetworkParams(n=2, m=m, nu=1))
    assert abs(p - q) <= 1e-15
    c = transmission_probabilities(NetworkParams(n=2, m=m, nu=1))
    assert c.p_sr == 0.0
