"""Buchberger closure, normal forms, and the membership/vanishing bridge."""

import random

import pytest

from lodana.boolring import (
    BoolPoly,
    MonomialOrder,
    VariableTable,
    anf_from_truth_table,
    parse_poly,
)
from lodana.gbasis import GroebnerBasis, buchberger, is_groebner, normal_form, s_polynomial
from tests.conftest import eval_oracle, random_poly

T4 = VariableTable.from_codes("ABCs")
O4 = MonomialOrder.default(T4)


def p4(text: str) -> BoolPoly:
    return parse_poly(text, T4)


def vanishing_generator(table: VariableTable, points: set[int]) -> BoolPoly:
    # The unique polynomial that is 0 exactly on the given points; built from
    # the truth table, independently of any ideal machinery.
    rows = [0 if a in points else 1 for a in range(1 << table.width)]
    return anf_from_truth_table(table, rows)


class TestSPolynomial:
    def test_cancels_leading_terms(self):
        s = s_polynomial(p4("AB+s"), p4("BC+1"), O4)
        assert s == p4("Cs + A")

    def test_identical_inputs_cancel_completely(self):
        assert s_polynomial(p4("AB+A"), p4("AB+A"), O4).is_zero


class TestNormalForm:
    def test_zero_and_empty_basis(self):
        gb = GroebnerBasis((), O4)
        assert normal_form(T4.zero(), gb).is_zero
        p = p4("AB + C")
        assert normal_form(p, gb) == p

    def test_generator_reduces_to_zero(self):
        g = p4("AB + C + 1")
        gb = buchberger([g], O4)
        assert normal_form(g, gb).is_zero

    def test_principal_ideal_absorbs_multiples(self):
        g = p4("AB + Cs + 1")
        gb = buchberger([g], O4)
        rng = random.Random(11)
        for code in T4.codes:
            assert normal_form(T4.var(code) * g, gb).is_zero
        for _ in range(50):
            q = random_poly(rng, T4)
            assert normal_form(q * g, gb).is_zero

    def test_idempotent(self):
        gb = buchberger([p4("AB+s"), p4("BC+A")], O4)
        rng = random.Random(12)
        for _ in range(50):
            p = random_poly(rng, T4)
            r = normal_form(p, gb)
            assert normal_form(r, gb) == r

    def test_linear_over_addition(self):
        gb = buchberger([p4("AB+s"), p4("BC+A")], O4)
        rng = random.Random(13)
        for _ in range(50):
            p = random_poly(rng, T4)
            q = random_poly(rng, T4)
            assert normal_form(p + q, gb) == normal_form(p, gb) + normal_form(q, gb)

    def test_stable_under_adding_ideal_elements(self):
        gens = [p4("AB+s"), p4("BC+A")]
        gb = buchberger(gens, O4)
        rng = random.Random(14)
        for _ in range(30):
            p = random_poly(rng, T4)
            noise = random_poly(rng, T4) * gens[0] + random_poly(rng, T4) * gens[1]
            assert normal_form(p + noise, gb) == normal_form(p, gb)


class TestBuchberger:
    def test_contradictory_generators_give_unit_ideal(self):
        gb = buchberger([p4("A"), p4("A+1")], O4)
        assert [g.render(O4) for g in gb.elements] == ["1"]

    def test_single_product_generator(self):
        gb = buchberger([p4("A(B+1)")], O4)
        assert [g.render(O4) for g in gb.elements] == ["AB + A"]

    def test_field_relations_close_the_basis(self):
        # A*(AB+s) reduces to As+s, which no reduction by AB+s alone reaches.
        gb = buchberger([p4("AB+s")], O4)
        assert normal_form(p4("As+s"), gb).is_zero
        assert normal_form(p4("Bs+s"), gb).is_zero

    def test_output_is_groebner_and_contains_generators(self):
        rng = random.Random(15)
        for _ in range(20):
            gens = [random_poly(rng, T4) for _ in range(rng.randrange(1, 4))]
            gb = buchberger(gens, O4)
            assert is_groebner(gb, gens)

    def test_is_groebner_rejects_open_pairs(self):
        fake = GroebnerBasis((p4("A+B"), p4("AC")), O4)
        assert not is_groebner(fake)

    def test_reduced_basis_independent_of_generator_order(self):
        rng = random.Random(16)
        for _ in range(20):
            gens = [random_poly(rng, T4) for _ in range(3)]
            reference = buchberger(gens, O4).elements
            shuffled = gens[:]
            rng.shuffle(shuffled)
            assert set(buchberger(shuffled, O4).elements) == set(reference)

    @pytest.mark.parametrize("width", [3, 4, 5])
    def test_membership_iff_vanishing(self, width):
        codes = "ABCDE"[: width - 1] + "s"
        table = VariableTable.from_codes(codes)
        order = MonomialOrder.default(table)
        rng = random.Random(100 + width)
        for _ in range(10):
            size = rng.randrange(1, 1 << width)
            points = set(rng.sample(range(1 << width), size))
            gb = buchberger([vanishing_generator(table, points)], order)
            for _ in range(40):
                p = random_poly(rng, table)
                member = normal_form(p, gb).is_zero
                vanishes = all(eval_oracle(p, a) == 0 for a in points)
                assert member == vanishes

    def test_wide_tables_use_the_same_semantics(self):
        # 15 variables exceeds the dense-kernel width, exercising the
        # sparse reduction path end to end.
        table = VariableTable.from_codes("abcdefghijklmns")
        order = MonomialOrder.default(table)
        rng = random.Random(17)
        points = set(rng.sample(range(1 << 15), 8))
        gb = buchberger([vanishing_generator(table, points)], order)
        assert is_groebner(gb)
        for _ in range(60):
            p = random_poly(rng, table, max_monomials=4)
            member = normal_form(p, gb).is_zero
            vanishes = all(eval_oracle(p, a) == 0 for a in points)
            assert member == vanishes
