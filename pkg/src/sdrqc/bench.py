"""Operation-count experiments: scaling law and similar-inputs-similar-codes.

The scaling experiment populates fresh memories at several stored counts and
measures one store and one query with identical probes at every count,
alongside a localist linear scan over a registry of the same items. The
claim under test is exact: the memory's counter tuples are bit-identical
across counts, while the localist counters fit a*n + b with no residual.

The sisc experiment stores one base pattern per trial and presents
perturbations at exact overlap levels, recording how strongly the selected
code intersects the base code. Aggregated per level, intersection should
rank with overlap; the report carries a Spearman coefficient over the level
means plus per-level dispersion.

wall_nanos columns are advisory timing and never take part in pass/fail
decisions; all verdicts rest on the deterministic counters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.stats import spearmanr

from .codes import intersection
from .counters import CostReport
from .errors import PatternGenerationError
from .memory import ModelParams, SdrMemory
from .oracle import Registry, linear_scan_best_match
from .patterns import distinct_random_patterns, overlap_pattern, random_pattern

SCALING_CSV_HEADER = (
    "stored_count,sdr_store_reads,sdr_store_writes,sdr_query_reads,"
    "sdr_query_comparisons,sdr_query_rng,localist_reads,"
    "wall_nanos_sdr,wall_nanos_localist"
)

SISC_CSV_HEADER = "input_overlap,mean_code_intersection,std,spearman_rho"


@dataclass(frozen=True)
class ScalingRow:
    stored_count: int
    sdr_store: CostReport
    sdr_query: CostReport
    localist_query: CostReport


@dataclass(frozen=True)
class ScalingReport:
    rows: tuple[ScalingRow, ...]


@dataclass(frozen=True)
class SiscRow:
    input_overlap: Fraction
    mean_code_intersection: float
    std: float


@dataclass(frozen=True)
class SiscReport:
    rows: tuple[SiscRow, ...]
    spearman_rho: float


def run_scaling(
    params: ModelParams,
    sizes: Sequence[int],
    pattern_seed: int,
    active_bits: int = 32,
) -> ScalingReport:
    """Measure store/query/scan costs at each stored count in `sizes`.

    Sizes must be positive and strictly ascending. Populations are drawn as
    distinct random patterns from one stream, so every size's population is
    a prefix of the next and the measured probes are identical at all sizes:
    the store probe is a fresh pattern outside every population, the query
    probe is the first stored pattern.
    """
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if any(s < 1 for s in sizes):
        raise ValueError(f"sizes must be >= 1, got {list(sizes)}")
    if list(sizes) != sorted(set(sizes)):
        raise ValueError(f"sizes must be strictly ascending, got {list(sizes)}")

    rng = np.random.default_rng(pattern_seed)
    geom = params.geometry
    pool = distinct_random_patterns(geom.n_in, active_bits, max(sizes) + 1, rng)
    store_probe = pool[-1]
    population = pool[:-1]
    query_probe = population[0]

    rows = []
    for size in sizes:
        memory = SdrMemory(params)
        registry = Registry()
        for i in range(size):
            code = memory.store(population[i])
            registry.register(f"p{i}", population[i], code)

        before = memory.counters.copy()
        memory.store(store_probe)
        store_cost = memory.counters.delta(before)

        before = memory.counters.copy()
        memory.query(query_probe)
        query_cost = memory.counters.delta(before)

        before_scan = registry.counters.copy()
        linear_scan_best_match(registry, query_probe)
        scan_cost = registry.counters.delta(before_scan)

        rows.append(
            ScalingRow(
                stored_count=size,
                sdr_store=store_cost,
                sdr_query=query_cost,
                localist_query=scan_cost,
            )
        )
    return ScalingReport(rows=tuple(rows))


def check_scaling(report: ScalingReport) -> list[str]:
    """Built-in verdicts; a nonempty return lists what failed.

    The memory's store and query counter tuples must be identical at every
    stored count, and each localist counter must fit a*n + b exactly.
    """
    problems: list[str] = []
    if not report.rows:
        return ["scaling report has no rows"]

    for name, costs in (
        ("store", [row.sdr_store for row in report.rows]),
        ("query", [row.sdr_query for row in report.rows]),
    ):
        keys = {c.key() for c in costs}
        if len(keys) != 1:
            problems.append(
                f"sdr {name} counters differ across sizes: {sorted(keys)}"
            )

    if len(report.rows) >= 2:
        ns = [row.stored_count for row in report.rows]
        for counter in ("weight_reads", "weight_writes", "comparisons", "rng_draws"):
            ys = [getattr(row.localist_query, counter) for row in report.rows]
            slope = Fraction(ys[1] - ys[0], ns[1] - ns[0])
            intercept = ys[0] - slope * ns[0]
            for n, y in zip(ns, ys):
                if slope * n + intercept != y:
                    problems.append(
                        f"localist {counter} not exactly linear: "
                        f"{list(zip(ns, ys))}"
                    )
                    break
    return problems


def run_sisc(
    params: ModelParams,
    overlap_levels: Sequence[Fraction | float | int | str],
    trials: int,
    seed: int,
    active_bits: int = 40,
) -> SiscReport:
    """Code-intersection response to input overlap, `trials` fresh models.

    Each trial stores one random base pattern, then presents one perturbation
    per level (stochastic selection, no learning) and records the selected
    code's intersection with the base code. Levels must be exactly attainable
    for `active_bits` or PatternGenerationError is raised before any work.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    levels = [_as_level(x) for x in overlap_levels]
    if not levels:
        raise ValueError("overlap_levels must be nonempty")
    geom = params.geometry
    for level in levels:
        shared = level * active_bits
        if shared.denominator != 1:
            raise PatternGenerationError(
                f"overlap level {level} of {active_bits} active bits is not a "
                f"whole number of shared bits"
            )
        if active_bits - int(shared) > geom.n_in - active_bits:
            raise PatternGenerationError(
                f"overlap level {level} needs {active_bits - int(shared)} "
                f"replacement bits, only {geom.n_in - active_bits} available"
            )

    model_seeds = np.random.default_rng(seed).integers(0, 2**62, size=trials)
    pattern_streams = np.random.SeedSequence(seed).spawn(trials)
    samples: dict[Fraction, list[int]] = {level: [] for level in levels}
    for t in range(trials):
        trial_rng = np.random.default_rng(pattern_streams[t])
        memory = SdrMemory(replace(params, seed=int(model_seeds[t])))
        base = random_pattern(geom.n_in, active_bits, trial_rng)
        base_code = memory.store(base)
        for level in levels:
            probe = overlap_pattern(base, level, trial_rng)
            activation = memory.summate(probe)
            code = memory.select_code(activation, mode="stochastic")
            samples[level].append(intersection(code, base_code))

    rows = []
    for level in levels:
        values = np.asarray(samples[level], dtype=np.float64)
        rows.append(
            SiscRow(
                input_overlap=level,
                mean_code_intersection=float(values.mean()),
                std=float(values.std()),
            )
        )
    if len(levels) >= 2:
        rho = float(
            spearmanr(
                [float(r.input_overlap) for r in rows],
                [r.mean_code_intersection for r in rows],
            )[0]
        )
    else:
        rho = float("nan")
    return SiscReport(rows=tuple(rows), spearman_rho=rho)


def check_sisc(report: SiscReport, min_rho: float = 0.8) -> list[str]:
    """Built-in verdict: rank correlation must clear `min_rho`."""
    rho = report.spearman_rho
    if not rho >= min_rho:
        return [f"spearman rho {rho!r} below threshold {min_rho!r}"]
    return []


def emit_report(report: ScalingReport | SiscReport, fmt: str) -> str:
    """Render a report as 'csv' or 'jsonlines' ('jsonl' accepted).

    Counter columns are bit-stable across reruns with the same seed; the
    wall_nanos columns are advisory and vary.
    """
    fmt = {"jsonl": "jsonlines"}.get(fmt, fmt)
    if fmt not in ("csv", "jsonlines"):
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(report, ScalingReport):
        dicts = [_scaling_row_dict(row) for row in report.rows]
        header = SCALING_CSV_HEADER
    elif isinstance(report, SiscReport):
        dicts = [_sisc_row_dict(row, report.spearman_rho) for row in report.rows]
        header = SISC_CSV_HEADER
    else:
        raise TypeError(f"unknown report type {type(report).__name__}")
    if fmt == "csv":
        lines = [header]
        lines += [",".join(_number_text(d[key]) for key in header.split(",")) for d in dicts]
        return "".join(line + "\n" for line in lines)
    return "".join(
        json.dumps(d, separators=(",", ":")) + "\n" for d in dicts
    )


def _scaling_row_dict(row: ScalingRow) -> dict[str, int]:
    return {
        "stored_count": row.stored_count,
        "sdr_store_reads": row.sdr_store.weight_reads,
        "sdr_store_writes": row.sdr_store.weight_writes,
        "sdr_query_reads": row.sdr_query.weight_reads,
        "sdr_query_comparisons": row.sdr_query.comparisons,
        "sdr_query_rng": row.sdr_query.rng_draws,
        "localist_reads": row.localist_query.weight_reads,
        "wall_nanos_sdr": row.sdr_store.wall_nanos + row.sdr_query.wall_nanos,
        "wall_nanos_localist": row.localist_query.wall_nanos,
    }


def _sisc_row_dict(row: SiscRow, rho: float) -> dict[str, float]:
    return {
        "input_overlap": float(row.input_overlap),
        "mean_code_intersection": row.mean_code_intersection,
        "std": row.std,
        "spearman_rho": rho,
    }


def _number_text(value: int | float) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _as_level(value: Fraction | float | int | str) -> Fraction:
    if isinstance(value, Fraction):
        level = value
    elif isinstance(value, int):
        level = Fraction(value)
    elif isinstance(value, float):
        level = Fraction(str(value))
    elif isinstance(value, str):
        level = Fraction(value)
    else:
        raise TypeError(f"cannot interpret overlap level {value!r}")
    if not 0 <= level <= 1:
        raise PatternGenerationError(f"overlap level {level} outside [0, 1]")
    return level
