import numpy as np

from twohop.sim._rng import Pcg32, make_states, pcg_bounded, pcg_next32, pcg_uniform


def test_python_and_kernel_streams_match():
    states, incs = make_states(12345)
    for k in range(3):
        py = Pcg32(12345, k)
        for _ in range(2000):
            assert int(pcg_next32(states, incs, k)) == py.next32()


def test_bounded_draws_match_and_stay_in_range():
    states, incs = make_states(99)
    py = Pcg32(99, 0)
    seen = set()
    for _ in range(5000):
        a = int(pcg_bounded(states, incs, 0, 37))
        b = py.bounded(37)
        assert a == b and 0 <= a < 37
        seen.add(a)
    assert seen == set(range(37))


def test_uniform_draws_match():
    states, incs = make_states(7)
    py = Pcg32(7, 2)
    vals = []
    for _ in range(3000):
        a = float(pcg_uniform(states, incs, 2))
        assert a == py.uniform()
        assert 0.0 <= a < 1.0
        vals.append(a)
    assert abs(np.mean(vals) - 0.5) < 0.02


def test_streams_are_distinct():
    a = Pcg32(5, 0)
    b = Pcg32(5, 1)
    assert [a.next32() for _ in range(8)] != [b.next32() for _ in range(8)]
