"""Builders shared across the suite."""

from __future__ import annotations

import random

import pytest

from lodana.boolring import BoolPoly, VariableTable
from lodana.dataset import Pattern, PatternTable


@pytest.fixture
def abs_table() -> VariableTable:
    return VariableTable.from_codes("ABs")


@pytest.fixture
def study_table() -> VariableTable:
    return VariableTable.from_codes("EFGLMyPxTs")


def bits_mask(bits) -> int:
    mask = 0
    for i, b in enumerate(bits):
        if b:
            mask |= 1 << i
    return mask


def make_patterns(table: VariableTable, rows) -> PatternTable:
    """Build a PatternTable from (bits, record_ids) pairs, bits in table order."""
    pats = [Pattern(bits_mask(bits), len(ids), tuple(ids)) for bits, ids in rows]
    pats.sort(key=lambda p: p.bits)
    return PatternTable(table, tuple(pats))


def random_poly(rng: random.Random, table: VariableTable, max_monomials: int = 6) -> BoolPoly:
    count = rng.randrange(max_monomials + 1)
    masks = {rng.randrange(1 << table.width) for _ in range(count)}
    return BoolPoly.from_masks(table, masks)


def eval_oracle(p: BoolPoly, assignment: int) -> int:
    """Reference semantics: XOR of monomial conjunctions, computed directly."""
    acc = 0
    for m in p.monomials:
        acc ^= int(m & assignment == m)
    return acc


def truth_oracle(p: BoolPoly) -> list[int]:
    width = p.table.width
    return [eval_oracle(p, a) for a in range(1 << width)]
