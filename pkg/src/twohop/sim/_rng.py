"""PCG32 generator, implemented twice on purpose.

The compiled kernel and the pure-Python reference engine must consume
random draws in exactly the same sequence, so both implementations follow
the same algorithm (O'Neill's pcg32, one 64-bit LCG step per 32-bit
output) and the same bounded-draw rejection rule.  Streams are selected
by the sequence constant, giving independent mobility / arrival /
scheduling substreams from a single replication seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_MUL = np.uint64(6364136223846793005)
_MASK64 = 0xFFFFFFFFFFFFFFFF
_MASK32 = 0xFFFFFFFF

STREAM_MOBILITY = 0
STREAM_ARRIVAL = 1
STREAM_SCHED = 2


class Pcg32:
    """Pure-Python PCG32, draw-for-draw identical to the kernel's."""

    def __init__(self, seed: int, seq: int):
        self.inc = ((seq << 1) | 1) & _MASK64
        state = self.inc  # one step from state 0
        state = (state + seed) & _MASK64
        self.state = (state * 6364136223846793005 + self.inc) & _MASK64

    def next32(self) -> int:
        old = self.state
        self.state = (old * 6364136223846793005 + self.inc) & _MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & _MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & _MASK32

    def bounded(self, bound: int) -> int:
        """Uniform integer in [0, bound) without modulo bias."""
        threshold = (0x1_0000_0000 - bound) % bound
        while True:
            r = self.next32()
            if r >= threshold:
                return r % bound

    def uniform(self) -> float:
        return self.next32() * 2.0**-32


def make_states(seed: int, n_streams: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Kernel-side state/increment vectors, one row per stream."""
    states = np.empty(n_streams, dtype=np.uint64)
    incs = np.empty(n_streams, dtype=np.uint64)
    for k in range(n_streams):
        inc = ((k << 1) | 1) & _MASK64
        state = (inc + seed) & _MASK64
        state = (state * 6364136223846793005 + inc) & _MASK64
        states[k] = state
        incs[k] = inc
    return states, incs


@njit(cache=True, inline="always")
def pcg_next32(states, incs, k):
    old = states[k]
    states[k] = old * _MUL + incs[k]
    xorshifted = ((old >> np.uint64(18)) ^ old) >> np.uint64(27) & np.uint64(0xFFFFFFFF)
    rot = old >> np.uint64(59)
    return (
        (xorshifted >> rot) | (xorshifted << ((np.uint64(32) - rot) & np.uint64(31)))
    ) & np.uint64(0xFFFFFFFF)


@njit(cache=True, inline="always")
def pcg_bounded(states, incs, k, bound):
    bound_u = np.uint64(bound)
    threshold = (np.uint64(0x100000000) - bound_u) % bound_u
    while True:
        r = pcg_next32(states, incs, k)
        if r >= threshold:
            return np.int64(r % bound_u)


@njit(cache=True, inline="always")
def pcg_uniform(states, incs, k):
    return pcg_next32(states, incs, k) * 2.0**-32
