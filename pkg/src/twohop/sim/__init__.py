"""Slot-by-slot simulation of the cell-partitioned relay network.

Two interchangeable engines run the identical per-slot protocol and are
tested to produce bit-identical reports: a compiled kernel (`engine
"kernel"`, the default) and a pure-Python mirror (`engine "reference"`)
that additionally supports per-transmission tracing.

Per-slot protocol, shared draw for draw by both engines
-------------------------------------------------------
Three PCG32 streams per replication (mobility, arrivals, scheduling),
seeded from ``config.seed + replication_index``.  Within slot t:

1. mobility: nodes 0..n-1 in index order each draw a uniform cell.
2. arrivals: nodes 0..n-1 in index order each draw a uniform; a packet is
   generated when it falls below lam.
3. scheduling: group ``t mod epsilon^2`` is active; its cell list (row
   major) is Fisher-Yates shuffled, then each cell runs the handshake
   two-hop relay step: source-destination pairs in contact take priority,
   otherwise a transmitter in the cell and a receiver in its coverage are
   drawn and a fair coin picks source-to-relay (cancelled when the
   receiver's relay buffer is full) versus relay-to-destination (the
   oldest held packet destined to the receiver, idle when there is none).
   A node takes part in at most one action per slot.
4. bookkeeping: occupancy and queue-length statistics accumulate at the
   end of every measured slot.
"""

from .records import ReplicaStats, SimConfig, SimReport
from .engine import run, run_replica

__all__ = ["SimConfig", "SimReport", "ReplicaStats", "run", "run_replica"]
