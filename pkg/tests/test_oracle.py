"""Localist registry, explicit superpositions, and explicit evolution."""

from fractions import Fraction

import numpy as np
import pytest

from sdrqc.codes import Code, FieldGeometry, enumerate_codes, intersection
from sdrqc.errors import (
    DuplicateLabelError,
    EmptyRegistryError,
    GeometryMismatchError,
    WidthMismatchError,
)
from sdrqc.oracle import (
    ExplicitSuperposition,
    Registry,
    TransitionTable,
    dump_registry,
    evolve_explicit,
    implied_superposition,
    linear_scan_best_match,
    load_registry_file,
    parse_registry,
    save_registry_file,
    superposition_from_code,
)
from sdrqc.patterns import BitPattern

GEOM = FieldGeometry(q=6, k=3, n_in=12, n_out=12)


def code_of(*winners, geometry=GEOM):
    return Code(geometry=geometry, winners=tuple(winners))


def pattern_for(i, width=12):
    return BitPattern.from_string(format(i, f"0{width}b"))


class TestRegistry:
    def test_register_and_get(self):
        r = Registry()
        c = code_of(0, 0, 0, 0, 0, 0)
        entry = r.register("a", pattern_for(5), c)
        assert len(r) == 1
        assert r.get("a") is entry
        assert r.get("missing") is None
        assert list(r) == [entry]

    def test_duplicate_label(self):
        r = Registry()
        r.register("a", pattern_for(5), code_of(0, 0, 0, 0, 0, 0))
        with pytest.raises(DuplicateLabelError):
            r.register("a", pattern_for(6), code_of(1, 0, 0, 0, 0, 0))

    def test_width_mismatch(self):
        r = Registry()
        r.register("a", pattern_for(5), code_of(0, 0, 0, 0, 0, 0))
        with pytest.raises(WidthMismatchError):
            r.register("b", BitPattern.from_string("01"), code_of(1, 0, 0, 0, 0, 0))

    def test_geometry_mismatch(self):
        r = Registry()
        r.register("a", pattern_for(5), code_of(0, 0, 0, 0, 0, 0))
        other = Code(
            geometry=FieldGeometry(q=2, k=2, n_in=12, n_out=12), winners=(0, 1)
        )
        with pytest.raises(GeometryMismatchError):
            r.register("b", pattern_for(6), other)

    def test_labels_for_code(self):
        r = Registry()
        c = code_of(1, 1, 1, 1, 1, 1)
        r.register("a", pattern_for(1), c)
        r.register("b", pattern_for(2), code_of(0, 0, 0, 0, 0, 0))
        r.register("c", pattern_for(3), c)
        assert r.labels_for_code(c) == ["a", "c"]

    def test_every_code_is_registerable(self):
        # the registry holds the full space: all k**q codes at once
        r = Registry()
        for i, code in enumerate(enumerate_codes(GEOM)):
            r.register(f"s{i}", pattern_for(i), code)
        assert len(r) == 729
        assert r.get("s728").code.winners == (2, 2, 2, 2, 2, 2)


class TestLinearScan:
    def build(self):
        r = Registry()
        r.register("a", BitPattern.from_string("111100000000"), code_of(0, 0, 0, 0, 0, 0))
        r.register("b", BitPattern.from_string("000011110000"), code_of(1, 1, 1, 1, 1, 1))
        r.register("c", BitPattern.from_string("000000001111"), code_of(2, 2, 2, 2, 2, 2))
        return r

    def test_exact_match(self):
        r = self.build()
        result = linear_scan_best_match(r, BitPattern.from_string("000011110000"))
        assert result.label == "b"
        assert result.similarity == Fraction(1)
        assert not result.tie

    def test_partial_match(self):
        r = self.build()
        result = linear_scan_best_match(r, BitPattern.from_string("000011100000"))
        assert result.label == "b"
        assert result.similarity == Fraction(3, 4)

    def test_all_zero_similarity_ties_to_earliest(self):
        r = self.build()
        result = linear_scan_best_match(r, BitPattern.zeros(12))
        assert result.label == "a"
        assert result.similarity == Fraction(0)
        assert result.tie

    def test_tie_flag_on_equal_best(self):
        r = Registry()
        r.register("x", BitPattern.from_string("1100"), code_of(0, 0, geometry=FieldGeometry(q=2, k=2, n_in=4, n_out=4)))
        r.register("y", BitPattern.from_string("0011"), code_of(1, 1, geometry=FieldGeometry(q=2, k=2, n_in=4, n_out=4)))
        result = linear_scan_best_match(r, BitPattern.from_string("1001"))
        assert result.label == "x"
        assert result.tie

    def test_empty_registry(self):
        with pytest.raises(EmptyRegistryError):
            linear_scan_best_match(Registry(), BitPattern.zeros(12))

    def test_width_check(self):
        with pytest.raises(WidthMismatchError):
            linear_scan_best_match(self.build(), BitPattern.zeros(13))

    def test_cost_is_linear_in_rows(self):
        def scan_cost(rows):
            r = Registry()
            for i in range(rows):
                r.register(f"s{i}", pattern_for(i), code_of(0, 0, 0, 0, 0, 0))
            before = r.counters.copy()
            linear_scan_best_match(r, pattern_for(1))
            return r.counters.delta(before)

        d10, d1000 = scan_cost(10), scan_cost(1000)
        assert (d10.weight_reads, d10.comparisons) == (10 * 24, 10)
        assert (d1000.weight_reads, d1000.comparisons) == (1000 * 24, 1000)


class TestExplicitSuperposition:
    def test_total_and_normalized(self):
        s = ExplicitSuperposition(coeffs={"a": Fraction(1, 2), "b": Fraction(1, 4)})
        assert s.total() == Fraction(3, 4)
        norm = s.normalized()
        assert norm == {"a": Fraction(2, 3), "b": Fraction(1, 3)}
        assert sum(norm.values()) == Fraction(1)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            ExplicitSuperposition(coeffs={"a": Fraction(-1, 2)})

    def test_zero_normalize_rejected(self):
        with pytest.raises(ValueError):
            ExplicitSuperposition(coeffs={"a": Fraction(0)}).normalized()

    def test_empty(self):
        assert ExplicitSuperposition().total() == Fraction(0)


class TestSuperpositionFromCode:
    def test_one_code_grades_the_whole_registry(self):
        # stored codes at every possible distance from the active one read
        # out all q+1 strength levels simultaneously
        r = Registry()
        active = code_of(0, 0, 0, 0, 0, 0)
        for i in range(7):
            winners = tuple(1 if c < i else 0 for c in range(6))
            r.register(f"s{i}", pattern_for(i), code_of(*winners))
        sup = superposition_from_code(r, active)
        assert sup.coeffs == {
            "s0": Fraction(1),
            "s1": Fraction(5, 6),
            "s2": Fraction(2, 3),
            "s3": Fraction(1, 2),
            "s4": Fraction(1, 3),
            "s5": Fraction(1, 6),
            "s6": Fraction(0),
        }
        ordered = sorted(sup.coeffs.values(), reverse=True)
        inters = sorted(
            (intersection(e.code, active) for e in r), reverse=True
        )
        assert ordered == [Fraction(i, 6) for i in inters]

    def test_empty_registry_gives_empty_superposition(self):
        active = code_of(0, 0, 0, 0, 0, 0)
        assert superposition_from_code(Registry(), active).coeffs == {}
        assert implied_superposition(Registry(), np.zeros(18)).coeffs == {}

    def test_implied_matches_explicit_on_indicator(self):
        r = Registry()
        active = code_of(2, 1, 0, 2, 1, 0)
        for i, winners in enumerate(
            [(2, 1, 0, 2, 1, 0), (2, 1, 0, 2, 1, 1), (0, 0, 0, 0, 0, 0)]
        ):
            r.register(f"s{i}", pattern_for(i), code_of(*winners))
        indicator = np.zeros(18)
        indicator[active.unit_indices()] = 1.0
        assert (
            implied_superposition(r, indicator).coeffs
            == superposition_from_code(r, active).coeffs
        )


class TestEvolution:
    def test_point_mass_moves(self):
        t = TransitionTable()
        t.record("a", "b")
        out = evolve_explicit(ExplicitSuperposition(coeffs={"a": Fraction(1)}), t)
        assert out.coeffs == {"b": Fraction(1)}

    def test_even_split(self):
        t = TransitionTable()
        t.record("a", "b")
        t.record("a", "c")
        out = evolve_explicit(ExplicitSuperposition(coeffs={"a": Fraction(1)}), t)
        assert out.coeffs == {"b": Fraction(1, 2), "c": Fraction(1, 2)}

    def test_count_weighted_split(self):
        t = TransitionTable()
        t.record("a", "b", count=3)
        t.record("a", "c")
        out = evolve_explicit(ExplicitSuperposition(coeffs={"a": Fraction(1)}), t)
        assert out.coeffs == {"b": Fraction(3, 4), "c": Fraction(1, 4)}

    def test_dead_end_mass_drops_and_renormalizes(self):
        t = TransitionTable()
        t.record("a", "b")
        sup = ExplicitSuperposition(coeffs={"a": Fraction(1, 2), "d": Fraction(1, 2)})
        out = evolve_explicit(sup, t)
        assert out.coeffs == {"b": Fraction(1)}

    def test_merging_flows(self):
        t = TransitionTable()
        t.record("a", "x")
        t.record("b", "x")
        t.record("b", "y")
        sup = ExplicitSuperposition(coeffs={"a": Fraction(1, 2), "b": Fraction(1, 2)})
        out = evolve_explicit(sup, t)
        assert out.coeffs == {"x": Fraction(3, 4), "y": Fraction(1, 4)}
        assert out.total() == Fraction(1)

    def test_empty_table_zeroes_out(self):
        out = evolve_explicit(
            ExplicitSuperposition(coeffs={"a": Fraction(1)}), TransitionTable()
        )
        assert out.coeffs == {}
        assert out.total() == Fraction(0)

    def test_record_validation(self):
        with pytest.raises(ValueError):
            TransitionTable().record("a", "b", count=0)

    def test_row_total_accumulates(self):
        t = TransitionTable()
        t.record("a", "b")
        t.record("a", "b", count=2)
        t.record("a", "c")
        t.record("z", "a", count=9)
        assert t.row_total("a") == 4
        assert t.row_total("missing") == 0


class TestRegistryFiles:
    def build(self):
        r = Registry()
        r.register("a", BitPattern.from_string("111100000000"), code_of(0, 1, 2, 0, 1, 2))
        r.register("b", BitPattern.from_string("000011110000"), code_of(1, 1, 1, 1, 1, 1))
        return r

    def test_dump_format(self):
        text = dump_registry(self.build())
        assert text == (
            "a\t111100000000\t0:1:2:0:1:2\n"
            "b\t000011110000\t1:1:1:1:1:1\n"
        )

    def test_parse_round_trip(self):
        r = self.build()
        parsed = parse_registry(dump_registry(r), GEOM)
        assert dump_registry(parsed) == dump_registry(r)
        assert [e.label for e in parsed] == ["a", "b"]

    def test_save_load_round_trip(self, tmp_path):
        r = self.build()
        path = tmp_path / "reg.tsv"
        save_registry_file(r, path)
        loaded = load_registry_file(path, GEOM)
        assert dump_registry(loaded) == dump_registry(r)

    def test_parse_field_count_error(self):
        with pytest.raises(ValueError, match="line 2"):
            parse_registry("a\t111100000000\t0:1:2:0:1:2\nbroken line\n", GEOM)

    def test_parse_width_error(self):
        with pytest.raises(WidthMismatchError, match="line 1"):
            parse_registry("a\t01\t0:1:2:0:1:2\n", GEOM)

    def test_parse_bad_code(self):
        with pytest.raises(ValueError):
            parse_registry("a\t111100000000\t9:9:9:9:9:9\n", GEOM)

    def test_empty_text(self):
        assert len(parse_registry("", GEOM)) == 0
