"""Scenario parameters and the error types shared across the package."""

from __future__ import annotations

from dataclasses import dataclass, replace


class ParameterError(ValueError):
    """A scenario parameter is outside the domain an operation supports."""


class SolverError(RuntimeError):
    """A fixed-point solve did not converge within its iteration budget."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


class UnstableLoadError(RuntimeError):
    """The arrival rate is at or above the throughput capacity, so queuing
    quantities diverge."""

    def __init__(self, lam: float, mu_s: float):
        super().__init__(
            f"arrival rate {lam:.6g} is not below the local service rate "
            f"{mu_s:.6g}; queuing delay diverges"
        )
        self.lam = lam
        self.mu_s = mu_s


class TotalBlockingError(RuntimeError):
    """The relay buffer is full with probability one, so conditioning on a
    not-full buffer is undefined."""


@dataclass(frozen=True)
class NetworkParams:
    """Complete description of one network scenario.

    n      -- number of mobile nodes (even; n >= 4 for any relay-queue result)
    m      -- the grid is m x m cells
    nu     -- transmission range covers cells within Chebyshev distance nu-1
    delta  -- interference guard factor (>= 0)
    B      -- relay-buffer capacity in packets (>= 1)
    lam    -- exogenous packet arrival rate per node, packets/slot, in [0, 1)
    """

    n: int
    m: int
    nu: int = 1
    delta: float = 1.0
    B: int = 8
    lam: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2 or self.n % 2 != 0:
            raise ParameterError(f"n must be an even integer >= 2, got {self.n!r}")
        if not isinstance(self.m, int) or self.m < 1:
            raise ParameterError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.nu, int) or not 1 <= self.nu <= self.m:
            raise ParameterError(f"nu must be an integer in [1, m], got {self.nu!r}")
        if 2 * self.nu - 1 > self.m:
            # Coverage of a cell must fit inside the torus without
            # self-overlap, otherwise the contact-event algebra breaks.
            raise ParameterError(
                f"transmission range too large: need 2*nu-1 <= m, "
                f"got nu={self.nu}, m={self.m}"
            )
        if self.delta < 0:
            raise ParameterError(f"delta must be >= 0, got {self.delta!r}")
        if not isinstance(self.B, int) or self.B < 1:
            raise ParameterError(f"B must be an integer >= 1, got {self.B!r}")
        if not 0.0 <= self.lam < 1.0:
            raise ParameterError(f"lam must be in [0, 1), got {self.lam!r}")

    def with_lam(self, lam: float) -> "NetworkParams":
        return replace(self, lam=lam)

    @property
    def cells(self) -> int:
        return self.m * self.m


def require_relay_model(params: NetworkParams) -> None:
    """Gate for every operation that models the relay queue.

    The occupancy weights binom(n-3+i, i) and the per-flow split over the
    n-2 relaying nodes both need n >= 4.
    """
    if params.n < 4:
        raise ParameterError(
            f"relay-queue operations require n >= 4, got n={params.n}"
        )
