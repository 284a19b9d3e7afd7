import pytest

from twohop import NetworkParams, ParameterError
from twohop.params import require_relay_model


def test_defaults_and_fields():
    p = NetworkParams(n=100, m=8)
    assert (p.nu, p.delta, p.B, p.lam) == (1, 1.0, 8, 0.0)
    assert p.cells == 64


def test_with_lam_returns_new_instance():
    p = NetworkParams(n=4, m=2)
    q = p.with_lam(0.25)
    assert q.lam == 0.25 and p.lam == 0.0
    assert q.n == p.n


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n=3, m=2),  # odd
        dict(n=0, m=2),
        dict(n=4, m=0),
        dict(n=4, m=2, nu=0),
        dict(n=4, m=2, nu=3),  # nu > m
        dict(n=4, m=3, nu=3),  # coverage wraps onto itself: 2 nu - 1 > m
        dict(n=4, m=2, delta=-0.1),
        dict(n=4, m=2, B=0),
        dict(n=4, m=2, lam=1.0),
        dict(n=4, m=2, lam=-0.01),
    ],
)
def test_invalid_parameters_rejected(kwargs):
    with pytest.raises(ParameterError):
        NetworkParams(**kwargs)


def test_relay_model_gate():
    require_relay_model(NetworkParams(n=4, m=2))
    with pytest.raises(ParameterError):
        require_relay_model(NetworkParams(n=2, m=2))
