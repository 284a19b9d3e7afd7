"""Blocking and delay analysis for buffer-limited two-hop relay MANETs.

Closed-form fixed-point results for the relay-buffer blocking probability
and packet delays, plus a matched slot-by-slot simulator and a sweep
harness that cross-validates the two.
"""

from .blocking import (
    RbpSolution,
    occupancy_distribution,
    relay_service_rate,
    solve_rbp,
    throughput_capacity,
)
from .delay import (
    DelayBreakdown,
    conditional_occupancy,
    delivery_delay,
    end_to_end_delay,
    queuing_delay,
)
from .params import (
    NetworkParams,
    ParameterError,
    SolverError,
    TotalBlockingError,
    UnstableLoadError,
)
from .scheduling import (
    SchedulingConstants,
    compute_epsilon,
    contact_probabilities,
    scheduling_constants,
    transmission_probabilities,
)

__all__ = [
    "NetworkParams",
    "ParameterError",
    "SolverError",
    "TotalBlockingError",
    "UnstableLoadError",
    "SchedulingConstants",
    "compute_epsilon",
    "contact_probabilities",
    "scheduling_constants",
    "transmission_probabilities",
    "RbpSolution",
    "occupancy_distribution",
    "relay_service_rate",
    "solve_rbp",
    "throughput_capacity",
    "DelayBreakdown",
    "conditional_occupancy",
    "delivery_delay",
    "end_to_end_delay",
    "queuing_delay",
]

__version__ = "0.1.0"
