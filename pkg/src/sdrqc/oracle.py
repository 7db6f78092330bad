"""Localist reference implementation and explicit superposition arithmetic.

The registry stores (label, input pattern, code) rows one per item, the way a
conventional lookup table would, and finds best matches by scanning every
row. Its costs therefore grow linearly with the stored count, which is the
baseline the coding-field memory is measured against: the two routes answer
the same questions by different means and are only ever compared in tests
and benchmarks, never merged.

ExplicitSuperposition carries per-label strengths as exact rationals, and
TransitionTable holds observed transition counts, so the expected effect of
one evolution step can be computed in closed form and compared with what the
recurrent matrix actually does.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterator, NamedTuple

import numpy as np

from .codes import Code, FieldGeometry, code_from_text, code_to_text, likelihood
from .counters import CostReport
from .errors import (
    DuplicateLabelError,
    EmptyRegistryError,
    GeometryMismatchError,
    WidthMismatchError,
)
from .model_io import _write_atomic
from .patterns import BitPattern


@dataclass(frozen=True)
class RegistryEntry:
    label: str
    input: BitPattern
    code: Code


class ScanResult(NamedTuple):
    label: str
    similarity: Fraction
    tie: bool


class Registry:
    """Ordered localist store of labeled (input, code) rows."""

    def __init__(self) -> None:
        self.entries: list[RegistryEntry] = []
        self.counters = CostReport()
        self._by_label: dict[str, RegistryEntry] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[RegistryEntry]:
        return iter(self.entries)

    def get(self, label: str) -> RegistryEntry | None:
        return self._by_label.get(label)

    def register(self, label: str, pattern: BitPattern, code: Code) -> RegistryEntry:
        """Append one row. Labels are unique; widths and geometry must agree."""
        if label in self._by_label:
            raise DuplicateLabelError(f"label {label!r} already registered")
        if self.entries:
            first = self.entries[0]
            if pattern.width != first.input.width:
                raise WidthMismatchError(
                    f"pattern width {pattern.width} differs from registry "
                    f"width {first.input.width}"
                )
            if code.geometry != first.code.geometry:
                raise GeometryMismatchError(
                    f"code geometry {code.geometry} differs from registry "
                    f"geometry {first.code.geometry}"
                )
        entry = RegistryEntry(label=label, input=pattern, code=code)
        self.entries.append(entry)
        self._by_label[label] = entry
        return entry

    def labels_for_code(self, code: Code) -> list[str]:
        """Labels whose stored code equals `code`, in registration order."""
        return [e.label for e in self.entries if e.code == code]


def linear_scan_best_match(registry: Registry, query: BitPattern) -> ScanResult:
    """Best stored match by exact Jaccard similarity, scanning every row.

    Ties go to the earliest registered row and are flagged. Costs: 2*n_in
    weight reads (stored bits plus query bits) and one comparison per row, so
    the totals are linear in the registry size by construction.
    """
    if not registry.entries:
        raise EmptyRegistryError("cannot scan an empty registry")
    width = registry.entries[0].input.width
    if query.width != width:
        raise WidthMismatchError(
            f"query width {query.width} differs from registry width {width}"
        )
    t0 = time.perf_counter_ns()
    best: RegistryEntry | None = None
    best_sim = Fraction(0)
    best_count = 0
    for entry in registry.entries:
        inter = int(np.sum(entry.input.bits & query.bits))
        union = int(np.sum(entry.input.bits | query.bits))
        sim = Fraction(1) if union == 0 else Fraction(inter, union)
        registry.counters.weight_reads += 2 * width
        registry.counters.comparisons += 1
        if best is None or sim > best_sim:
            best, best_sim, best_count = entry, sim, 1
        elif sim == best_sim:
            best_count += 1
    assert best is not None
    registry.counters.wall_nanos += time.perf_counter_ns() - t0
    return ScanResult(label=best.label, similarity=best_sim, tie=best_count > 1)


@dataclass(frozen=True)
class ExplicitSuperposition:
    """Per-label strengths as exact nonnegative rationals."""

    coeffs: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, value in self.coeffs.items():
            if value < 0:
                raise ValueError(f"coefficient for {label!r} is negative: {value}")

    def total(self) -> Fraction:
        return sum(self.coeffs.values(), Fraction(0))

    def normalized(self) -> dict[str, Fraction]:
        """Unit-sum view. Exact: the values sum to exactly 1."""
        total = self.total()
        if total == 0:
            raise ValueError("cannot normalize a zero superposition")
        return {label: value / total for label, value in self.coeffs.items()}


def superposition_from_code(registry: Registry, active: Code) -> ExplicitSuperposition:
    """Every registered item's likelihood against `active`, raw (denominator q).

    An empty registry gives an empty superposition, not an error.
    """
    coeffs = {
        entry.label: likelihood(entry.code, active).as_fraction()
        for entry in registry.entries
    }
    return ExplicitSuperposition(coeffs=coeffs)


def implied_superposition(registry: Registry, normalized: np.ndarray) -> ExplicitSuperposition:
    """Per-label strengths implied by a 0/1 activation field.

    For each registered code, the fraction of its units reading exactly 1.
    Defined for indicator activations such as the superposition view of the
    active code, where it coincides with the likelihood readout.
    """
    coeffs: dict[str, Fraction] = {}
    for entry in registry.entries:
        units = entry.code.unit_indices()
        hits = int(np.sum(normalized[units] == 1.0))
        coeffs[entry.label] = Fraction(hits, entry.code.geometry.q)
    return ExplicitSuperposition(coeffs=coeffs)


class TransitionTable:
    """Observed transition counts between labeled states."""

    def __init__(self) -> None:
        self.counts: dict[tuple[str, str], int] = {}

    def record(self, src: str, dst: str, count: int = 1) -> None:
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        key = (src, dst)
        self.counts[key] = self.counts.get(key, 0) + count

    def row_total(self, src: str) -> int:
        return sum(c for (s, _), c in self.counts.items() if s == src)


def evolve_explicit(
    superposition: ExplicitSuperposition, table: TransitionTable
) -> ExplicitSuperposition:
    """One explicit evolution step.

    Each source label passes its mass to its observed successors in
    proportion to their counts; labels with no outgoing transitions
    contribute nothing. The result is renormalized when any mass flowed;
    an empty table yields the zero superposition.
    """
    out: dict[str, Fraction] = {}
    for (src, dst), count in table.counts.items():
        coeff = superposition.coeffs.get(src)
        if coeff is None or coeff == 0:
            continue
        out[dst] = out.get(dst, Fraction(0)) + coeff * Fraction(count, table.row_total(src))
    total = sum(out.values(), Fraction(0))
    if total > 0:
        out = {label: value / total for label, value in out.items()}
    return ExplicitSuperposition(coeffs=out)


# -- registry sidecar files ---------------------------------------------


def dump_registry(registry: Registry) -> str:
    """Text dump, one 'label<TAB>bits<TAB>code' line per row in order."""
    return "".join(
        f"{e.label}\t{e.input}\t{code_to_text(e.code)}\n" for e in registry.entries
    )


def parse_registry(text: str, geometry: FieldGeometry) -> Registry:
    """Inverse of dump_registry, validated against `geometry`."""
    registry = Registry()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ValueError(f"registry line {lineno}: expected 3 tab fields, got {len(parts)}")
        label, bits_text, code_text = parts
        pattern = BitPattern.from_string(bits_text)
        if pattern.width != geometry.n_in:
            raise WidthMismatchError(
                f"registry line {lineno}: width {pattern.width} does not match "
                f"n_in={geometry.n_in}"
            )
        registry.register(label, pattern, code_from_text(code_text, geometry))
    return registry


def save_registry_file(registry: Registry, path: str | Path) -> None:
    _write_atomic(Path(path), dump_registry(registry).encode("ascii"))


def load_registry_file(path: str | Path, geometry: FieldGeometry) -> Registry:
    return parse_registry(Path(path).read_text(encoding="ascii"), geometry)
