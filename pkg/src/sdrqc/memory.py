"""Associative memory over the winner-take-all coding field.

One SdrMemory owns three binary weight matrices:

    f: n_in x (q*k)   bottom-up input bits -> coding units
    h: (q*k) x (q*k)  coding units at t -> coding units at t+1
    d: (q*k) x n_out  coding units -> readout bits

plus at most one active code. Learning is Hebbian OR: touched weights are set
to 1 and never cleared, so re-storing known content is idempotent. The active
code does double duty: it is the retrieved item, and because every stored
code intersects it in 0..q clusters it simultaneously grades every stored
item's likelihood. Collapse (pick the single best) is just reading the active
code; the graded view is `superposition_inputs`.

Code selection
--------------
All selection goes through the same two passes:

1. Summation. u_i = sum_j f[j][i] * input[j], plus, when the recurrent flag
   is set and a code is active, sum_{i'} h[i'][i] over the active units.
   Normalized strength is u / max(1, a) where a counts the active inputs
   feeding the pass (bottom-up ones, plus q when recurrent signals joined),
   so u-hat is always in [0, 1]. Cluster familiarity g_c is the max u-hat in
   cluster c, and global familiarity G is the mean of the g_c.
2. Selection, one winner per cluster. In argmax mode the max-u-hat unit wins,
   ties broken by that cluster's random substream, never by index order.
   In stochastic mode the winner is sampled from a softmax over the
   cluster's u-hat at temperature tau(G) = tau_min + (1-G)*(tau_max-tau_min):
   familiar inputs re-evoke their code almost deterministically, novel ones
   explore almost uniformly.

Cost accounting (exact, data-independent)
-----------------------------------------
Per the abstract machine in `counters`:

    summate:      n_in*q*k weight reads, +q*k*q when a recurrent
                  contribution exists; q*k comparisons (cluster-max scan)
    select_code:  q rng draws (both modes); +q*k comparisons in argmax mode
    readout:      q*n_out weight reads
    store writes: |input|*q on f, +q*q on h (recurrent with a predecessor),
                  +q*|output| on d
    step:         q*k*q weight reads (h only), then select + readout as above

None of these depend on how many patterns were stored; that independence is
the point, and the scaling benchmark asserts it bit-exactly.

Concurrency: one writer at a time. All public operations (including query,
which moves the active code and the counters) serialize on an internal lock.

Determinism: a fixed seed fixes everything. Each cluster draws from its own
PCG64 substream. Because the model file format does not carry stream
positions, a freshly constructed or loaded memory derives its streams from
(seed, popcount(f), popcount(h), popcount(d)): reruns of the same command
sequence stay byte-identical, while new work after a reload does not replay
the draw sequence that earlier novel stores already consumed.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Sequence

import numpy as np

from .codes import ClusterRng, Code, FieldGeometry
from .counters import CostReport
from .errors import NoActiveStateError, WidthMismatchError
from .patterns import BitPattern, require_width

SelectionMode = Literal["stochastic", "argmax"]


@dataclass(frozen=True)
class ModelParams:
    """Immutable model configuration.

    tau_min is the exploit-end softmax temperature (G=1), tau_max the
    explore-end one (G=0). readout_threshold defaults to ceil(q/2): an output
    bit fires when a majority of the q winners project to it. The threshold
    is not part of the model file format; loaded models use the default.
    """

    geometry: FieldGeometry
    tau_min: float = 0.05
    tau_max: float = 10.0
    seed: int = 0
    readout_threshold: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 < self.tau_min < self.tau_max):
            raise ValueError(
                f"need 0 < tau_min < tau_max, got {self.tau_min}, {self.tau_max}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise TypeError(f"seed must be an int, got {self.seed!r}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.readout_threshold is not None and not (
            1 <= self.readout_threshold <= self.geometry.q
        ):
            raise ValueError(
                f"readout_threshold {self.readout_threshold} outside "
                f"[1, {self.geometry.q}]"
            )

    @property
    def resolved_readout_threshold(self) -> int:
        if self.readout_threshold is not None:
            return self.readout_threshold
        return (self.geometry.q + 1) // 2


@dataclass(frozen=True)
class Activation:
    """Result of one summation pass.

    raw: integer summations per unit (length q*k).
    normalized: raw / max(1, active input count), in [0, 1].
    cluster_max: per-cluster max of normalized (length q).
    familiarity: mean of cluster_max, the global familiarity G.
    """

    raw: np.ndarray = field(repr=False)
    normalized: np.ndarray = field(repr=False)
    cluster_max: np.ndarray = field(repr=False)
    familiarity: float

    def __post_init__(self) -> None:
        for name in ("raw", "normalized", "cluster_max"):
            arr = getattr(self, name)
            arr.flags.writeable = False


class QueryResult(NamedTuple):
    code: Code
    output: BitPattern
    familiarity: float


class StepResult(NamedTuple):
    code: Code
    output: BitPattern


class SdrMemory:
    """Winner-take-all associative memory with constant-cost operations."""

    def __init__(self, params: ModelParams) -> None:
        geom = params.geometry
        self.params = params
        self.f = np.zeros((geom.n_in, geom.units), dtype=np.uint8)
        self.h = np.zeros((geom.units, geom.units), dtype=np.uint8)
        self.d = np.zeros((geom.units, geom.n_out), dtype=np.uint8)
        self.active: Code | None = None
        self.counters = CostReport()
        self._lock = threading.RLock()
        self._rng = self._derive_rng()

    @classmethod
    def restore(
        cls,
        params: ModelParams,
        f: np.ndarray,
        h: np.ndarray,
        d: np.ndarray,
    ) -> "SdrMemory":
        """Rebuild a memory from persisted weight matrices.

        The matrices are adopted as-is after shape/value validation; the
        active code and counters start fresh, and the random streams are
        derived from the seed and the matrix popcounts (see module docstring).
        """
        memory = cls(params)
        geom = params.geometry
        for name, arr, shape in (
            ("f", f, (geom.n_in, geom.units)),
            ("h", h, (geom.units, geom.units)),
            ("d", d, (geom.units, geom.n_out)),
        ):
            arr = np.asarray(arr, dtype=np.uint8)
            if arr.shape != shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
            if not np.all(arr <= 1):
                raise ValueError(f"{name} has entries outside {{0, 1}}")
            setattr(memory, name, arr.copy())
        memory._rng = memory._derive_rng()
        return memory

    @property
    def geometry(self) -> FieldGeometry:
        return self.params.geometry

    def _derive_rng(self) -> ClusterRng:
        entropy = [
            self.params.seed,
            int(self.f.sum(dtype=np.int64)),
            int(self.h.sum(dtype=np.int64)),
            int(self.d.sum(dtype=np.int64)),
        ]
        return ClusterRng(self.geometry.q, entropy)

    # -- summation -------------------------------------------------------

    def summate(self, pattern: BitPattern, recurrent: bool = False) -> Activation:
        """Run the summation pass for `pattern` and return the activation.

        With recurrent=True and an active code, h signals from the active
        units join the bottom-up summations and the normalization divisor
        grows by q accordingly.
        """
        with self._lock:
            geom = self.geometry
            require_width(pattern, geom.n_in, "input pattern")
            t0 = time.perf_counter_ns()
            x_idx = pattern.active_indices()
            if x_idx.size:
                u = self.f[x_idx].sum(axis=0, dtype=np.int64)
            else:
                u = np.zeros(geom.units, dtype=np.int64)
            self.counters.weight_reads += geom.n_in * geom.units
            divisor = int(x_idx.size)
            if recurrent and self.active is not None:
                au = self.active.unit_indices()
                u = u + self.h[au].sum(axis=0, dtype=np.int64)
                self.counters.weight_reads += geom.units * geom.q
                divisor += geom.q
            return self._finish_activation(u, divisor, t0)

    def _recurrent_only_activation(self, t0: int) -> Activation:
        # step(): h signals alone, no bottom-up read.
        geom = self.geometry
        assert self.active is not None
        au = self.active.unit_indices()
        u = self.h[au].sum(axis=0, dtype=np.int64)
        self.counters.weight_reads += geom.units * geom.q
        return self._finish_activation(u, geom.q, t0)

    def _finish_activation(self, u: np.ndarray, divisor: int, t0: int) -> Activation:
        geom = self.geometry
        normalized = u / max(1, divisor)
        cluster_max = normalized.reshape(geom.q, geom.k).max(axis=1)
        self.counters.comparisons += geom.units
        familiarity = float(cluster_max.mean())
        self.counters.wall_nanos += time.perf_counter_ns() - t0
        return Activation(
            raw=u,
            normalized=normalized,
            cluster_max=cluster_max.copy(),
            familiarity=familiarity,
        )

    # -- selection -------------------------------------------------------

    def select_code(
        self, activation: Activation, mode: SelectionMode = "stochastic"
    ) -> Code:
        """Pick one winner per cluster from `activation`.

        Both modes consume exactly one random draw per cluster; in argmax
        mode the draw is the tie-break key, so the draw count never depends
        on what is stored.
        """
        if mode not in ("stochastic", "argmax"):
            raise ValueError(f"unknown selection mode {mode!r}")
        with self._lock:
            geom = self.geometry
            if activation.normalized.shape != (geom.units,):
                raise ValueError(
                    f"activation has {activation.normalized.shape[0]} units, "
                    f"geometry has {geom.units}"
                )
            t0 = time.perf_counter_ns()
            k = geom.k
            winners = []
            if mode == "stochastic":
                tau = self.params.tau_min + (1.0 - activation.familiarity) * (
                    self.params.tau_max - self.params.tau_min
                )
            for c in range(geom.q):
                v = activation.normalized[c * k : (c + 1) * k]
                r = self._rng.uniform(c)
                self.counters.rng_draws += 1
                if mode == "argmax":
                    m = v.max()
                    self.counters.comparisons += k
                    ties = np.flatnonzero(v == m)
                    winners.append(int(ties[int(r * ties.size)]))
                else:
                    # max subtraction is numerical stabilization, not a
                    # counted comparison scan
                    e = np.exp((v - v.max()) / tau)
                    cum = np.cumsum(e / e.sum())
                    winners.append(min(int(np.searchsorted(cum, r, side="right")), k - 1))
            self.counters.wall_nanos += time.perf_counter_ns() - t0
            return Code(geometry=geom, winners=tuple(winners))

    # -- learning and recall ---------------------------------------------

    def store(
        self,
        pattern: BitPattern,
        output: BitPattern | None = None,
        recurrent: bool = False,
    ) -> Code:
        """Assign a code to `pattern` (stochastic selection) and wire it in.

        f gains (active input bit -> winner) for all pairs. With
        recurrent=True and a predecessor code active, h gains (predecessor
        winner -> new winner) for all pairs. d gains (winner -> active output
        bit); when `output` is omitted and n_out == n_in the input pattern is
        auto-associated, otherwise d is left untouched. The new code becomes
        the active code.
        """
        with self._lock:
            geom = self.geometry
            require_width(pattern, geom.n_in, "input pattern")
            if output is not None:
                require_width(output, geom.n_out, "output pattern")
            activation = self.summate(pattern, recurrent=recurrent)
            code = self.select_code(activation, mode="stochastic")
            t0 = time.perf_counter_ns()
            prev = self.active
            units = code.unit_indices()
            x_idx = pattern.active_indices()
            if x_idx.size:
                self.f[np.ix_(x_idx, units)] = 1
            self.counters.weight_writes += int(x_idx.size) * geom.q
            if recurrent and prev is not None:
                self.h[np.ix_(prev.unit_indices(), units)] = 1
                self.counters.weight_writes += geom.q * geom.q
            out = output
            if out is None and geom.n_out == geom.n_in:
                out = pattern
            if out is not None:
                o_idx = out.active_indices()
                if o_idx.size:
                    self.d[np.ix_(units, o_idx)] = 1
                self.counters.weight_writes += geom.q * int(o_idx.size)
            self.active = code
            self.counters.wall_nanos += time.perf_counter_ns() - t0
            return code

    def query(self, pattern: BitPattern) -> QueryResult:
        """Best-match recall: argmax selection, readout through d, no learning.

        Weights are untouched; the active code moves to the selected one.
        """
        with self._lock:
            require_width(pattern, self.geometry.n_in, "input pattern")
            activation = self.summate(pattern, recurrent=False)
            code = self.select_code(activation, mode="argmax")
            output = self._readout(code)
            self.active = code
            return QueryResult(code=code, output=output, familiarity=activation.familiarity)

    def step(self, mode: SelectionMode = "argmax") -> StepResult:
        """Advance the active code one transition through h.

        Summations come from h alone (no bottom-up input), selection is
        argmax by default (deterministic replay apart from tie-breaks);
        stochastic mode samples the transition instead, for walking a
        branching structure. The new code replaces the active one. Raises
        NoActiveStateError when nothing is active.
        """
        with self._lock:
            if self.active is None:
                raise NoActiveStateError("no active state to step from")
            t0 = time.perf_counter_ns()
            activation = self._recurrent_only_activation(t0)
            code = self.select_code(activation, mode=mode)
            output = self._readout(code)
            self.active = code
            return StepResult(code=code, output=output)

    def learn_sequence(self, items: Sequence[BitPattern]) -> list[Code]:
        """Store `items` in order, wiring h from each code to its successor.

        The active code is cleared first so a stale predecessor is never
        wired into the sequence; the first item stores non-recurrent, later
        items store with the recurrent flag. A single-item sequence is a
        plain store and touches no h weights.
        """
        if not items:
            raise ValueError("sequence must have at least one item")
        with self._lock:
            for i, item in enumerate(items):
                require_width(item, self.geometry.n_in, f"sequence item {i}")
            self.active = None
            return [
                self.store(item, recurrent=(i > 0)) for i, item in enumerate(items)
            ]

    # -- observation -----------------------------------------------------

    def collapse(self) -> Code:
        """The single active code. Raises NoActiveStateError when none is set."""
        with self._lock:
            if self.active is None:
                raise NoActiveStateError("no active state to collapse")
            return self.active

    def superposition_inputs(self) -> Activation:
        """The coding field's current activation as a summation view.

        Active units read 1, the rest 0; a fresh memory reads all zeros. Every
        stored code's strength is implicit here: the fraction of its units
        that are active equals its likelihood against the active code. This
        is an observation, not an operation: counters do not move.
        """
        with self._lock:
            geom = self.geometry
            raw = np.zeros(geom.units, dtype=np.int64)
            if self.active is not None:
                raw[self.active.unit_indices()] = 1
            normalized = raw.astype(np.float64)
            cluster_max = normalized.reshape(geom.q, geom.k).max(axis=1)
            return Activation(
                raw=raw,
                normalized=normalized,
                cluster_max=cluster_max,
                familiarity=float(cluster_max.mean()),
            )

    def _readout(self, code: Code) -> BitPattern:
        geom = self.geometry
        t0 = time.perf_counter_ns()
        sums = self.d[code.unit_indices(), :].sum(axis=0, dtype=np.int64)
        self.counters.weight_reads += geom.q * geom.n_out
        bits = (sums >= self.params.resolved_readout_threshold).astype(np.uint8)
        self.counters.wall_nanos += time.perf_counter_ns() - t0
        return BitPattern(bits)
