"""Atomic-operation cost accounting.

Costs are counted against a fixed abstract machine, not measured: one tick
per weight read (dense matrix schedule), one tick per weight write even if
the cell already held a 1, one tick per unit examined in a per-cluster
max/argmax scan, one tick per sampled random value. That makes every counter
an exact function of geometry, call arguments, and call history, never of
how many items happen to be stored. wall_nanos is advisory wall-clock time
and is excluded from all equality comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class CostReport:
    """Mutable tally of abstract machine operations."""

    weight_reads: int = 0
    weight_writes: int = 0
    comparisons: int = 0
    rng_draws: int = 0
    wall_nanos: int = 0

    def copy(self) -> "CostReport":
        return CostReport(
            weight_reads=self.weight_reads,
            weight_writes=self.weight_writes,
            comparisons=self.comparisons,
            rng_draws=self.rng_draws,
            wall_nanos=self.wall_nanos,
        )

    def delta(self, earlier: "CostReport") -> "CostReport":
        """Cost accumulated since `earlier` (a snapshot of the same tally)."""
        return CostReport(
            weight_reads=self.weight_reads - earlier.weight_reads,
            weight_writes=self.weight_writes - earlier.weight_writes,
            comparisons=self.comparisons - earlier.comparisons,
            rng_draws=self.rng_draws - earlier.rng_draws,
            wall_nanos=self.wall_nanos - earlier.wall_nanos,
        )

    def key(self) -> tuple[int, int, int, int]:
        """Counters that take part in exact comparisons; wall time excluded."""
        return (self.weight_reads, self.weight_writes, self.comparisons, self.rng_draws)
