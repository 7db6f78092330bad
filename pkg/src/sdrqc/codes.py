"""Winner-take-all coding field: geometry, codes, and graded match strength.

The coding field is q clusters of k binary units each. A code picks exactly
one winner per cluster, so k**q codes are possible, and any two codes can
agree in 0..q clusters. That intersection count, divided by q, is the graded
strength with which one code "contains" another: a single active code
therefore carries a q+1 level strength reading for every stored code at once.

Strengths are kept as exact rationals (intersection over q) and never rounded
to floats inside the package; float conversion is for presentation only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityOverflowError, GeometryMismatchError

# num_codes refuses to build integers past this many bits; see the function.
_MAX_COUNT_BITS = 1_000_000


@dataclass(frozen=True)
class FieldGeometry:
    """Shape of one coding field plus its input and output bit widths.

    q: number of winner-take-all clusters.
    k: binary units per cluster.
    n_in: width of the bottom-up input bit field.
    n_out: width of the readout bit field.
    """

    q: int
    k: int
    n_in: int
    n_out: int

    def __post_init__(self) -> None:
        for name in ("q", "k", "n_in", "n_out"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool):
                raise TypeError(f"{name} must be an int, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")

    @property
    def units(self) -> int:
        """Total number of coding units, q * k."""
        return self.q * self.k


@dataclass(frozen=True)
class Code:
    """One field state: the winning unit index for each of the q clusters."""

    geometry: FieldGeometry
    winners: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.winners) != self.geometry.q:
            raise ValueError(
                f"code has {len(self.winners)} winners, geometry has "
                f"q={self.geometry.q} clusters"
            )
        for c, w in enumerate(self.winners):
            if not isinstance(w, int) or isinstance(w, bool):
                raise TypeError(f"winner for cluster {c} must be an int, got {w!r}")
            if not 0 <= w < self.geometry.k:
                raise ValueError(
                    f"winner {w} for cluster {c} outside [0, {self.geometry.k})"
                )

    def unit_indices(self) -> np.ndarray:
        """Flat indices of the active units (cluster c's winner lives at c*k + w)."""
        k = self.geometry.k
        return np.array([c * k + w for c, w in enumerate(self.winners)], dtype=np.int64)


@dataclass(frozen=True)
class Likelihood:
    """Exact match strength of a stored code against the active one.

    Carried as the rational hits/denominator where denominator is the field's
    q, so the q+1 possible levels stay distinguishable and exact. Comparisons
    go through the reduced fraction, so 3/6 and 2/4 compare equal.
    """

    hits: int
    denominator: int

    def __post_init__(self) -> None:
        if self.denominator < 1:
            raise ValueError(f"denominator must be >= 1, got {self.denominator}")
        if not 0 <= self.hits <= self.denominator:
            raise ValueError(
                f"hits {self.hits} outside [0, {self.denominator}]"
            )

    def as_fraction(self) -> Fraction:
        return Fraction(self.hits, self.denominator)

    def __float__(self) -> float:
        return self.hits / self.denominator

    def _cmp_key(self) -> Fraction:
        return self.as_fraction()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Likelihood):
            return NotImplemented
        return self._cmp_key() == other._cmp_key()

    def __hash__(self) -> int:
        return hash(self._cmp_key())

    def __lt__(self, other: "Likelihood") -> bool:
        return self._cmp_key() < other._cmp_key()

    def __le__(self, other: "Likelihood") -> bool:
        return self._cmp_key() <= other._cmp_key()

    def __gt__(self, other: "Likelihood") -> bool:
        return self._cmp_key() > other._cmp_key()

    def __ge__(self, other: "Likelihood") -> bool:
        return self._cmp_key() >= other._cmp_key()


class ClusterRng:
    """Deterministic random source with one independent substream per cluster.

    Streams are PCG64 generators spawned from a single SeedSequence, so a
    fixed seed fixes every draw, and draws for cluster c never depend on how
    many draws other clusters consumed. Entropy may be a single int or a
    sequence of ints (used by the memory to fold state into the seed).
    """

    def __init__(self, q: int, entropy: int | Sequence[int]) -> None:
        if q < 1:
            raise ValueError(f"q must be >= 1, got {q}")
        root = np.random.SeedSequence(entropy)
        self._streams = [np.random.Generator(np.random.PCG64(s)) for s in root.spawn(q)]

    @property
    def q(self) -> int:
        return len(self._streams)

    def uniform(self, cluster: int) -> float:
        """One double in [0, 1) from the given cluster's substream."""
        return float(self._streams[cluster].random())


def num_codes(geometry: FieldGeometry) -> int:
    """Exact number of distinct codes, k**q.

    Raises CapacityOverflowError when the exact value would exceed
    1,000,000 bits; Python integers are otherwise unbounded, so the guard
    exists to fail loudly on absurd geometry instead of exhausting memory.
    """
    bits_needed = geometry.q * max(1, (geometry.k - 1).bit_length())
    if bits_needed > _MAX_COUNT_BITS:
        raise CapacityOverflowError(
            f"k**q needs about {bits_needed} bits, over the {_MAX_COUNT_BITS} bit cap"
        )
    return geometry.k**geometry.q


def num_levels(geometry: FieldGeometry) -> int:
    """Number of distinct likelihood levels between any two codes, q + 1."""
    return geometry.q + 1


def intersection(a: Code, b: Code) -> int:
    """Count of clusters where a and b share a winner. Symmetric, in [0, q]."""
    if a.geometry != b.geometry:
        raise GeometryMismatchError(
            f"codes from different geometries: {a.geometry} vs {b.geometry}"
        )
    return sum(1 for x, y in zip(a.winners, b.winners) if x == y)


def likelihood(stored: Code, active: Code) -> Likelihood:
    """Exact strength of `stored` in the state `active`: intersection / q."""
    hits = intersection(stored, active)
    return Likelihood(hits=hits, denominator=stored.geometry.q)


def random_code(geometry: FieldGeometry, rng: ClusterRng) -> Code:
    """Uniform random code: each cluster's winner drawn from its own substream."""
    if rng.q != geometry.q:
        raise GeometryMismatchError(
            f"rng has {rng.q} cluster streams, geometry has q={geometry.q}"
        )
    k = geometry.k
    winners = tuple(min(int(rng.uniform(c) * k), k - 1) for c in range(geometry.q))
    return Code(geometry=geometry, winners=winners)


def enumerate_codes(geometry: FieldGeometry) -> Iterator[Code]:
    """Yield every code in lexicographic winner order. k**q of them; caller beware."""
    for winners in itertools.product(range(geometry.k), repeat=geometry.q):
        yield Code(geometry=geometry, winners=winners)


def code_to_text(code: Code) -> str:
    """Canonical text form: colon-joined decimal winners, e.g. '2:0:1:1:2:0'."""
    return ":".join(str(w) for w in code.winners)


def code_from_text(text: str, geometry: FieldGeometry) -> Code:
    """Parse the canonical text form back into a Code for this geometry."""
    parts = text.strip().split(":")
    try:
        winners = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"bad code text {text!r}") from exc
    return Code(geometry=geometry, winners=winners)
