"""Class splitting, disjoint-support factoring, rule extraction, generalization."""

import random

import pytest

from lodana.boolring import BoolPoly, MonomialOrder, VariableTable, parse_poly, poly_mul
from lodana.rules import (
    NEGATIVE,
    POSITIVE,
    RuleError,
    count_selection,
    extract_rules,
    factor_disjoint,
    generalize,
    split_on_class,
)
from tests.conftest import make_patterns, random_poly

STUDY = VariableTable.from_codes("EFGLMyPxTs")
ORDER = MonomialOrder.default(STUDY)
T3 = VariableTable.from_codes("ABs")


def sp(text: str) -> BoolPoly:
    return parse_poly(text, STUDY)


class TestSplitOnClass:
    def test_mixed_membership_splits_evenly(self):
        a, b = split_on_class(sp("GMys + Gyxs + GMy + Gyx"))
        assert a == sp("GMy + Gyx")
        assert b == sp("GMy + Gyx")

    def test_pure_class_part(self):
        a, b = split_on_class(sp("FyTs + FTs"))
        assert a == sp("FyT + FT")
        assert b.is_zero

    def test_bare_class_variable(self):
        a, b = split_on_class(sp("s"))
        assert a.is_one
        assert b.is_zero

    def test_recombination_identity(self):
        rng = random.Random(31)
        s_var = STUDY.var("s")
        for _ in range(50):
            p = random_poly(rng, STUDY)
            a, b = split_on_class(p)
            assert a * s_var + b == p
            assert not a.mentions("s") and not b.mentions("s")


class TestFactorDisjoint:
    def test_single_shared_variable_pulls_out(self):
        factors = factor_disjoint(sp("FyT + FT"))
        assert set(factors) == {sp("F"), sp("T"), sp("y + 1")}

    def test_two_variable_tail_stays_joint(self):
        factors = factor_disjoint(sp("TyL + TyM + TL + TM"))
        assert set(factors) == {sp("T"), sp("y + 1"), sp("L + M")}

    def test_irreducible_sum_returned_whole(self):
        factors = factor_disjoint(sp("L + M"))
        assert factors == (sp("L + M"),)

    def test_factors_multiply_back(self):
        rng = random.Random(32)
        for _ in range(60):
            p = random_poly(rng, STUDY)
            if p.is_zero:
                continue
            factors = factor_disjoint(p)
            prod = STUDY.one()
            for f in factors:
                prod = poly_mul(prod, f)
            assert prod == p

    def test_factor_supports_are_disjoint(self):
        rng = random.Random(33)
        for _ in range(60):
            p = random_poly(rng, STUDY)
            if p.is_zero:
                continue
            masks = [f.support_mask for f in factor_disjoint(p)]
            for i, m in enumerate(masks):
                for other in masks[i + 1:]:
                    assert m & other == 0

    def test_wide_polynomials_skip_the_search(self):
        wide = VariableTable.from_codes("ABCDEFGHIJKLMNOPQRs")
        p = parse_poly("+".join("ABCDEFGHIJKLMNOPQ"), wide)
        assert factor_disjoint(p) == (p,)


class TestCountSelection:
    def setup_method(self):
        self.patterns = make_patterns(
            T3,
            [
                ((1, 0, 1), ("r1", "r2")),
                ((0, 1, 0), ("r3",)),
                ((0, 0, 0), ("r4",)),
            ],
        )

    def test_counts_multiplicity(self):
        support, positive, ids = count_selection(parse_poly("A", T3), self.patterns)
        assert (support, positive, ids) == (2, 2, ("r1", "r2"))

    def test_constant_one_selects_everything(self):
        support, positive, ids = count_selection(T3.one(), self.patterns)
        assert support == 4
        assert positive == 2
        assert set(ids) == {"r1", "r2", "r3", "r4"}

    def test_zero_selects_nothing(self):
        assert count_selection(T3.zero(), self.patterns) == (0, 0, ())

    def test_class_variable_rejected(self):
        with pytest.raises(RuleError, match="class"):
            count_selection(parse_poly("As", T3), self.patterns)


class TestExtractRules:
    def test_requires_class_variable(self):
        patterns = make_patterns(T3, [((0, 0, 0), ("r1",))])
        with pytest.raises(RuleError, match="class"):
            extract_rules(parse_poly("AB + A", T3), patterns)

    def test_negative_rule_from_pure_class_part(self):
        patterns = make_patterns(
            T3,
            [((1, 0, 1), ("r1", "r2")), ((0, 1, 0), ("r3",)), ((0, 0, 0), ("r4",))],
        )
        rules = extract_rules(parse_poly("As + s", T3), patterns)
        assert len(rules) == 1
        rule = rules[0]
        assert rule.polarity == NEGATIVE
        assert rule.criterion == parse_poly("A + 1", T3)
        assert (rule.support, rule.agree, rule.exception_ids) == (2, 2, ())

    def test_positive_and_negative_from_mixed_element(self):
        # class == A and not B on these patterns, so s + AB + A vanishes
        patterns = make_patterns(
            T3,
            [
                ((1, 0, 1), ("p1", "p2")),
                ((1, 1, 0), ("n1",)),
                ((0, 1, 0), ("n2",)),
                ((0, 0, 0), ("n3",)),
            ],
        )
        rules = extract_rules(parse_poly("s + AB + A", T3), patterns)
        by_polarity = {r.polarity: r for r in rules}
        pos = by_polarity[POSITIVE]
        assert pos.criterion == parse_poly("AB + A", T3)
        assert (pos.support, pos.agree, pos.exception_ids) == (2, 2, ())
        neg = by_polarity[NEGATIVE]
        assert neg.criterion == parse_poly("AB + A + 1", T3)
        assert (neg.support, neg.agree, neg.exception_ids) == (3, 3, ())

    def test_exceptions_listed_when_claim_fails(self):
        patterns = make_patterns(
            T3,
            [((1, 0, 1), ("p1",)), ((1, 1, 0), ("n1",)), ((0, 0, 0), ("n2",))],
        )
        rules = extract_rules(parse_poly("As", T3), patterns)  # claim: A selects negatives
        [rule] = [r for r in rules if r.polarity == NEGATIVE]
        assert rule.criterion == parse_poly("A", T3)
        assert rule.support == 2
        assert rule.agree == 1
        assert rule.exception_ids == ("p1",)

    def test_zero_support_rules_dropped(self):
        patterns = make_patterns(T3, [((0, 0, 0), ("r1",))])
        rules = extract_rules(parse_poly("ABs + AB", T3), patterns)
        assert all(r.support > 0 for r in rules)

    def test_rule_invariant_holds(self):
        patterns = make_patterns(
            T3,
            [((1, 0, 1), ("p1",)), ((1, 1, 0), ("n1",)), ((0, 0, 0), ("n2",))],
        )
        for rule in extract_rules(parse_poly("As", T3), patterns):
            assert rule.support == rule.agree + len(rule.exception_ids)


class TestGeneralize:
    def setup_method(self):
        t = VariableTable.from_codes("ABCs")
        self.table = t
        self.patterns = make_patterns(
            t,
            [
                ((1, 1, 0, 1), ("p1", "p2")),
                ((1, 0, 0, 1), ("p3",)),
                ((0, 1, 0, 0), ("n1",)),
                ((1, 1, 1, 0), ("n2",)),
                ((0, 0, 0, 0), ("n3", "n4")),
            ],
        )
        [self.rule] = [
            r
            for r in extract_rules(parse_poly("ABs + AB", t), self.patterns)
            if r.polarity == POSITIVE
        ]

    def test_every_proper_factor_subset_appears(self):
        gens = generalize(self.rule, self.patterns)
        assert {g.criterion for g in gens} == {
            parse_poly("A", self.table),
            parse_poly("B", self.table),
        }

    def test_support_never_shrinks(self):
        for g in generalize(self.rule, self.patterns):
            assert g.support >= self.rule.support
            assert g.generalized_from == self.rule.criterion
            assert g.polarity == self.rule.polarity

    def test_single_factor_rule_has_no_generalizations(self):
        patterns = make_patterns(T3, [((1, 0, 1), ("p1",)), ((0, 0, 0), ("n1",))])
        [rule] = [r for r in extract_rules(parse_poly("As", T3), patterns) if r.polarity == NEGATIVE]
        assert rule.factors == (rule.criterion,)
        assert generalize(rule, patterns) == []
