"""Fixed-width binary input/output patterns and their generators.

A BitPattern is an immutable 0/1 vector. The text form is one character per
bit ('0101...'), and pattern files are such lines, each optionally prefixed
with 'label<TAB>'. Generators that promise an exact property (overlap level,
disjointness) validate attainability and raise instead of approximating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PatternGenerationError, WidthMismatchError


@dataclass(frozen=True)
class BitPattern:
    """Immutable binary vector of fixed width."""

    bits: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError(f"pattern must be 1-D, got shape {arr.shape}")
        if arr.size == 0:
            raise ValueError("pattern width must be >= 1")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("pattern entries must be 0 or 1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)

    @classmethod
    def from_string(cls, text: str) -> "BitPattern":
        stripped = text.strip()
        if not stripped or set(stripped) - {"0", "1"}:
            raise ValueError(f"pattern text must be nonempty 0/1, got {text!r}")
        return cls(np.frombuffer(stripped.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_indices(cls, width: int, indices: Iterable[int]) -> "BitPattern":
        bits = np.zeros(width, dtype=np.uint8)
        idx = list(indices)
        if idx:
            bits[np.asarray(idx, dtype=np.int64)] = 1
        return cls(bits)

    @classmethod
    def zeros(cls, width: int) -> "BitPattern":
        return cls(np.zeros(width, dtype=np.uint8))

    @property
    def width(self) -> int:
        return int(self.bits.size)

    @property
    def active_count(self) -> int:
        return int(self.bits.sum())

    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def __str__(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitPattern):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __repr__(self) -> str:
        return f"BitPattern({str(self)!r})"


def require_width(pattern: BitPattern, width: int, what: str) -> None:
    if pattern.width != width:
        raise WidthMismatchError(
            f"{what} has width {pattern.width}, expected {width}"
        )


def shared_active(a: BitPattern, b: BitPattern) -> int:
    """Number of positions active in both patterns."""
    if a.width != b.width:
        raise WidthMismatchError(f"widths differ: {a.width} vs {b.width}")
    return int(np.sum(a.bits & b.bits))


def jaccard(a: BitPattern, b: BitPattern) -> Fraction:
    """Exact Jaccard similarity of the active sets; 1 when both are empty."""
    if a.width != b.width:
        raise WidthMismatchError(f"widths differ: {a.width} vs {b.width}")
    inter = int(np.sum(a.bits & b.bits))
    union = int(np.sum(a.bits | b.bits))
    if union == 0:
        return Fraction(1)
    return Fraction(inter, union)


def random_pattern(
    width: int, active_bits: int, rng: np.random.Generator
) -> BitPattern:
    """Uniform random pattern with exactly `active_bits` ones."""
    if not 0 <= active_bits <= width:
        raise PatternGenerationError(
            f"active_bits {active_bits} outside [0, {width}]"
        )
    idx = rng.choice(width, size=active_bits, replace=False)
    return BitPattern.from_indices(width, idx.tolist())


def distinct_random_patterns(
    width: int, active_bits: int, count: int, rng: np.random.Generator
) -> list[BitPattern]:
    """`count` pairwise distinct random patterns with the same active count."""
    limit = math.comb(width, active_bits) if 0 <= active_bits <= width else 0
    if count > limit:
        raise PatternGenerationError(
            f"cannot draw {count} distinct patterns with {active_bits} of "
            f"{width} bits set; only {limit} exist"
        )
    seen: set[BitPattern] = set()
    result: list[BitPattern] = []
    while len(result) < count:
        p = random_pattern(width, active_bits, rng)
        if p not in seen:
            seen.add(p)
            result.append(p)
    return result


def disjoint_patterns(
    width: int, active_bits: int, count: int, rng: np.random.Generator
) -> list[BitPattern]:
    """`count` mutually disjoint patterns, each with `active_bits` ones."""
    if active_bits < 1:
        raise PatternGenerationError("disjoint patterns need active_bits >= 1")
    if count * active_bits > width:
        raise PatternGenerationError(
            f"{count} disjoint patterns of {active_bits} bits need "
            f"{count * active_bits} positions, width is {width}"
        )
    order = rng.permutation(width)
    return [
        BitPattern.from_indices(
            width, order[i * active_bits : (i + 1) * active_bits].tolist()
        )
        for i in range(count)
    ]


def overlap_pattern(
    base: BitPattern, level: Fraction, rng: np.random.Generator
) -> BitPattern:
    """Pattern with the same active count sharing exactly level*|base| bits.

    `level` must be an exact rational in [0, 1] with level*|base| integral,
    and the field must have room for the |base| - shared replacement bits;
    otherwise PatternGenerationError.
    """
    level = Fraction(level)
    if not 0 <= level <= 1:
        raise PatternGenerationError(f"overlap level {level} outside [0, 1]")
    active = base.active_count
    shared_frac = level * active
    if shared_frac.denominator != 1:
        raise PatternGenerationError(
            f"overlap level {level} of {active} active bits is not a whole "
            f"number of shared bits"
        )
    shared = int(shared_frac)
    fresh = active - shared
    inactive = np.flatnonzero(base.bits == 0)
    if fresh > inactive.size:
        raise PatternGenerationError(
            f"need {fresh} replacement bits, only {inactive.size} inactive "
            f"positions available"
        )
    keep = rng.choice(base.active_indices(), size=shared, replace=False)
    add = rng.choice(inactive, size=fresh, replace=False)
    return BitPattern.from_indices(base.width, keep.tolist() + add.tolist())


def corrupt_pattern(
    base: BitPattern, flips: int, rng: np.random.Generator
) -> BitPattern:
    """Replace `flips` active bits with previously inactive ones."""
    active = base.active_count
    if not 0 <= flips <= active:
        raise PatternGenerationError(f"flips {flips} outside [0, {active}]")
    return overlap_pattern(base, Fraction(active - flips, max(1, active)), rng)


def parse_pattern_lines(text: str) -> tuple[list[str | None], list[BitPattern]]:
    """Parse pattern file content into (labels, patterns).

    Each nonempty line is 'bits' or 'label<TAB>bits'. Labels default to None.
    All patterns must share one width.
    """
    labels: list[str | None] = []
    patterns: list[BitPattern] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        if "\t" in line:
            label, bits_text = line.split("\t", 1)
            label = label.strip()
            if not label:
                raise ValueError(f"line {lineno}: empty label before tab")
        else:
            label, bits_text = None, line
        try:
            pattern = BitPattern.from_string(bits_text)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        if patterns and pattern.width != patterns[0].width:
            raise WidthMismatchError(
                f"line {lineno}: width {pattern.width} differs from first "
                f"pattern's width {patterns[0].width}"
            )
        labels.append(label)
        patterns.append(pattern)
    return labels, patterns


def format_pattern_lines(
    labels: Sequence[str | None], patterns: Sequence[BitPattern]
) -> str:
    """Inverse of parse_pattern_lines; unlabeled rows emit bare bit strings."""
    if len(labels) != len(patterns):
        raise ValueError("labels and patterns must have equal length")
    lines = []
    for label, pattern in zip(labels, patterns):
        lines.append(f"{label}\t{pattern}" if label is not None else str(pattern))
    return "".join(line + "\n" for line in lines)


def load_pattern_file(path: str | Path) -> tuple[list[str | None], list[BitPattern]]:
    return parse_pattern_lines(Path(path).read_text(encoding="ascii"))
