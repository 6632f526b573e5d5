"""CSV ingestion, thresholding, pattern folding, and the counting bridge."""

import io
import itertools
import random

import pytest

from lodana.boolring import VariableTable
from lodana.dataset import (
    Pattern,
    PatternTable,
    Record,
    RecordTable,
    Thresholds,
    binarize,
    build_sigma,
    compute_thresholds,
    count_empty_criteria,
    parse_records,
    pattern_indicator,
    pattern_key,
    record_bits,
)
from lodana.errors import InputError
from tests.conftest import bits_mask, eval_oracle, make_patterns

T3 = VariableTable.from_codes("ABs")


def records_from(text: str, table=T3, labels=None) -> RecordTable:
    return parse_records(io.StringIO(text), table, labels=labels)


BASIC = "record_id,A,B,s\nr1,5,1,1\nr2,4,2,1\nr3,3,9,0\nr4,2,8,0\nr5,1,7,0\n"


class TestParseRecords:
    def test_header_matched_by_name(self):
        rt = records_from(BASIC)
        assert len(rt) == 5
        assert rt.class_positive == 2
        assert rt.records[0] == Record("r1", (5.0, 1.0), 1)

    def test_column_order_follows_header_not_table(self):
        text = "record_id,B,s,A\nr1,9,1,5\n"
        rt = records_from(text)
        # values are stored in table order regardless of CSV layout
        assert rt.records[0].values == (5.0, 9.0)

    def test_extra_columns_ignored(self):
        text = "record_id,A,notes,B,s\nr1,5,hello,1,0\n"
        assert records_from(text).records[0].values == (5.0, 1.0)

    def test_missing_column_named(self):
        with pytest.raises(InputError, match="'B'"):
            records_from("record_id,A,s\nr1,1,0\n")

    def test_bad_value_names_row_and_column(self):
        with pytest.raises(InputError, match=r"row 3.*'A'"):
            records_from("record_id,A,B,s\nr1,1,2,0\nr2,x,2,1\n")

    def test_duplicate_id_rejected(self):
        with pytest.raises(InputError, match="duplicate record id"):
            records_from("record_id,A,B,s\nr1,1,2,1\nr1,3,4,0\n")

    def test_class_labels_mapped(self):
        rt = records_from(
            "record_id,A,B,s\nr1,1,2,sick\nr2,3,4,well\n",
            labels={"sick": 1, "well": 0},
        )
        assert [r.label for r in rt.records] == [1, 0]

    def test_unmapped_label_rejected(self):
        with pytest.raises(InputError, match="label"):
            records_from("record_id,A,B,s\nr1,1,2,maybe\n")


class TestThresholds:
    def test_cut_is_next_value_below_the_top_k(self):
        th = compute_thresholds(records_from(BASIC))
        # two positives: the cut is the third-largest value of each column
        assert th.cut_for("A") == 3.0
        assert th.cut_for("B") == 7.0
        assert th.deviations == ()

    def test_tie_at_the_cut_is_reported(self):
        rt = records_from("record_id,A,B,s\nr1,5,1,1\nr2,4,2,1\nr3,4,9,0\nr4,2,8,0\nr5,1,7,0\n")
        th = compute_thresholds(rt)
        assert th.cut_for("A") == 4.0
        dev = th.deviations[0]
        assert (dev.code, dev.expected, dev.realized) == ("A", 2, 1)

    def test_degenerate_class_balance_rejected(self):
        with pytest.raises(InputError, match="degenerate"):
            compute_thresholds(records_from("record_id,A,B,s\nr1,1,2,1\nr2,3,4,1\n"))
        with pytest.raises(InputError, match="degenerate"):
            compute_thresholds(records_from("record_id,A,B,s\nr1,1,2,0\nr2,3,4,0\n"))

    def test_nonfinite_cut_rejected(self):
        with pytest.raises(InputError):
            Thresholds(T3, (float("nan"), 1.0))

    def test_arity_checked(self):
        with pytest.raises(InputError):
            Thresholds(T3, (1.0,))


class TestBinarize:
    def test_high_means_strictly_greater(self):
        rt = records_from(BASIC)
        th = compute_thresholds(rt)
        # A: cut 3 -> r1, r2 high; B: cut 7 -> r3, r4 high
        assert record_bits(rt.records[0], th) == bits_mask((1, 0, 1))
        assert record_bits(rt.records[2], th) == bits_mask((0, 1, 0))

    def test_identical_rows_merge(self):
        rt = records_from("record_id,A,B,s\nr1,9,0,1\nr2,8,0,1\nr3,0,9,0\nr4,0,8,0\n")
        th = Thresholds(T3, (5.0, 5.0))
        pt = binarize(rt, th)
        assert pt.observed_count == 2
        assert pt.record_count == 4
        by_key = {pt.key_of(p): p for p in pt.patterns}
        assert by_key["101"].record_ids == ("r1", "r2")
        assert by_key["010"].record_ids == ("r3", "r4")

    def test_patterns_sorted_by_bits(self):
        rt = records_from(BASIC)
        pt = binarize(rt, compute_thresholds(rt))
        assert list(pt.patterns) == sorted(pt.patterns, key=lambda p: p.bits)

    def test_key_reads_table_order_left_to_right(self):
        assert pattern_key(bits_mask((1, 0, 1)), 3) == "101"
        assert pattern_key(0, 4) == "0000"

    def test_without_records_keeps_structure(self):
        rt = records_from(BASIC)
        pt = binarize(rt, compute_thresholds(rt))
        keep = tuple(p for p in pt.patterns if not p.bits & pt.table.class_mask)
        smaller = pt.without_records(set(itertools.chain(*(p.record_ids for p in keep))))
        assert {p.bits for p in smaller.patterns} == {
            p.bits for p in pt.patterns if p.bits & pt.table.class_mask
        }


class TestIndicator:
    @pytest.mark.parametrize("width", [2, 3, 4])
    def test_selects_exactly_one_assignment(self, width):
        table = VariableTable.from_codes("ABCD"[: width - 1] + "s")
        for bits in range(1 << width):
            ind = pattern_indicator(table, bits)
            hits = [a for a in range(1 << width) if eval_oracle(ind, a) == 1]
            assert hits == [bits]

    def test_monomial_count_doubles_per_zero_bit(self):
        table = VariableTable.from_codes("ABCs")
        # three zero bits expand to 2^3 monomials
        assert len(pattern_indicator(table, bits_mask((1, 0, 0, 0))).monomials) == 8
        assert len(pattern_indicator(table, table.full_mask).monomials) == 1

    def test_expansion_cap(self):
        wide = VariableTable.from_codes("ABCDEFGHIJKLMNOPQRSTUVs")
        with pytest.raises(InputError, match="zero bits"):
            pattern_indicator(wide, 0)


class TestSigmaAndCounting:
    def test_sigma_vanishes_exactly_on_observed(self):
        rng = random.Random(21)
        table = VariableTable.from_codes("ABCs")
        for _ in range(10):
            chosen = rng.sample(range(16), rng.randrange(1, 16))
            pt = make_patterns(table, [(tuple((b >> i) & 1 for i in range(4)), (f"r{b}",)) for b in chosen])
            sigma = build_sigma(pt)
            for a in range(16):
                assert eval_oracle(sigma, a) == (0 if a in chosen else 1)

    def test_exponent_counts_unobserved_assignments(self):
        table = VariableTable.from_codes("ABs")
        pt = make_patterns(table, [((0, 0, 0), ("r1",)), ((1, 0, 1), ("r2",)), ((0, 1, 0), ("r3",))])
        assert count_empty_criteria(pt) == 8 - 3

    def test_exponent_against_exhaustive_function_count(self):
        # Count all 2^(2^3) Boolean functions vanishing on the observed set;
        # the result must be 2^exponent.
        table = VariableTable.from_codes("ABs")
        observed = [0b000, 0b101, 0b010, 0b111, 0b001]
        pt = make_patterns(
            table,
            [(tuple((b >> i) & 1 for i in range(3)), (f"r{b}",)) for b in observed],
        )
        vanishing = 0
        for fn in range(1 << 8):
            if all((fn >> a) & 1 == 0 for a in observed):
                vanishing += 1
        assert vanishing == 1 << count_empty_criteria(pt)

    def test_duplicate_pattern_bits_rejected(self):
        with pytest.raises(InputError, match="duplicate pattern"):
            PatternTable(
                T3,
                (Pattern(0b001, 1, ("r1",)), Pattern(0b001, 1, ("r2",))),
            )
