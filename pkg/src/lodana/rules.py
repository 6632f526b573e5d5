"""Rules extracted from class-containing polynomials.

A polynomial p = A*s + B over the pattern variables (s the class variable)
that vanishes on every observed pattern yields two selection criteria:
B selects only class-positive records, A*(1+B) selects only class-negative
ones.  Both are reported with support counts and any violating records.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .boolring import BoolPoly, MonomialOrder, render_factored
from .dataset import Pattern, PatternTable
from .errors import LodanaError

POSITIVE = "positive"
NEGATIVE = "negative"

# factor_disjoint enumerates variable bipartitions; past this many distinct
# variables the criterion is reported unfactored.
MAX_FACTOR_VARIABLES = 16


class RuleError(LodanaError, ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    """One directional claim: the criterion selects only one class."""

    polarity: str
    criterion: BoolPoly
    factors: tuple[BoolPoly, ...]
    support: int
    agree: int
    exception_ids: tuple[str, ...]
    source: BoolPoly
    cycle: int | None = None
    generalized_from: BoolPoly | None = None

    def __post_init__(self) -> None:
        if self.polarity not in (POSITIVE, NEGATIVE):
            raise RuleError(f"unknown polarity {self.polarity!r}")
        if self.support != self.agree + len(self.exception_ids):
            raise RuleError("support must equal agree plus exceptions")

    @property
    def class_positive(self) -> int:
        """Selected records that are class-positive (the 'number (class)' figure)."""
        if self.polarity == POSITIVE:
            return self.agree
        return len(self.exception_ids)

    def factored_text(self, order: MonomialOrder | None = None) -> str:
        return render_factored(self.factors, order)


def split_on_class(p: BoolPoly) -> tuple[BoolPoly, BoolPoly]:
    """Unique decomposition p = A*s + B with A, B free of the class variable."""
    cm = p.table.class_mask
    with_s = frozenset(m & ~cm for m in p.monomials if m & cm)
    without = frozenset(m for m in p.monomials if not m & cm)
    return BoolPoly(p.table, with_s), BoolPoly(p.table, without)


def _selected(criterion: BoolPoly, patterns: PatternTable) -> list[Pattern]:
    return [p for p in patterns.patterns if criterion.eval_mask(p.bits)]


def count_selection(
    criterion: BoolPoly, patterns: PatternTable
) -> tuple[int, int, tuple[str, ...]]:
    """(support, class-positive count, selected record ids) for a class-free criterion."""
    if criterion.support_mask & criterion.table.class_mask:
        raise RuleError("selection criteria must not mention the class variable")
    cm = criterion.table.class_mask
    support = 0
    positive = 0
    ids: list[str] = []
    for p in _selected(criterion, patterns):
        support += p.multiplicity
        if p.bits & cm:
            positive += p.multiplicity
        ids.extend(p.record_ids)
    return support, positive, tuple(ids)


def _make_rule(
    polarity: str,
    criterion: BoolPoly,
    patterns: PatternTable,
    source: BoolPoly,
    cycle: int | None,
    generalized_from: BoolPoly | None = None,
) -> Rule | None:
    support, positive, _ = count_selection(criterion, patterns)
    if support == 0:
        return None
    cm = criterion.table.class_mask
    exceptions: list[str] = []
    for p in _selected(criterion, patterns):
        is_positive = bool(p.bits & cm)
        if (polarity == POSITIVE) != is_positive:
            exceptions.extend(p.record_ids)
    agree = support - len(exceptions)
    return Rule(
        polarity,
        criterion,
        factor_disjoint(criterion),
        support,
        agree,
        tuple(exceptions),
        source,
        cycle,
        generalized_from,
    )


def extract_rules(p: BoolPoly, patterns: PatternTable, cycle: int | None = None) -> list[Rule]:
    """Positive and negative rules from a class-containing polynomial.

    Zero-support candidates are dropped; callers filter class-free inputs.
    """
    if not p.support_mask & p.table.class_mask:
        raise RuleError("rule extraction needs a polynomial containing the class variable")
    a, b = split_on_class(p)
    out: list[Rule] = []
    pos = _make_rule(POSITIVE, b, patterns, p, cycle)
    if pos is not None:
        out.append(pos)
    neg_criterion = a * (p.table.one() + b)
    neg = _make_rule(NEGATIVE, neg_criterion, patterns, p, cycle)
    if neg is not None:
        out.append(neg)
    return out


def _try_split(p: BoolPoly, part: int) -> tuple[BoolPoly, BoolPoly] | None:
    """Factor p = q1 * q2 with q1 over `part`, q2 over the rest, if possible."""
    rest = p.support_mask & ~part
    groups: dict[int, set[int]] = {}
    for m in p.monomials:
        groups.setdefault(m & part, set()).add(m & rest)
    tails = iter(groups.values())
    first = next(tails)
    for t in tails:
        if t != first:
            return None
    return (
        BoolPoly(p.table, frozenset(groups.keys())),
        BoolPoly(p.table, frozenset(first)),
    )


def _find_split(p: BoolPoly) -> tuple[BoolPoly, BoolPoly] | None:
    support = p.support_mask
    n = support.bit_count()
    if n <= 1 or n > MAX_FACTOR_VARIABLES:
        return None
    vars_ = [i for i in range(p.table.width) if support >> i & 1]
    anchor = 1 << vars_[0]
    others = vars_[1:]
    # Every bipartition with the lowest variable anchored on the left.
    for combo in range(1 << len(others)):
        if combo + 1 == 1 << len(others):
            break  # left side would be all variables
        part = anchor
        for j, v in enumerate(others):
            if combo >> j & 1:
                part |= 1 << v
        got = _try_split(p, part)
        if got is not None:
            return got
    return None


def factor_disjoint(p: BoolPoly) -> tuple[BoolPoly, ...]:
    """Maximal factorization into parts with pairwise-disjoint variables.

    Returns (p,) when irreducible.  Factors are ordered ascending by their
    leading monomial under the default order for p's table.
    """
    if not p:
        raise RuleError("cannot factor the zero polynomial")
    out: list[BoolPoly] = []
    stack = [p]
    while stack:
        q = stack.pop()
        got = _find_split(q)
        if got is None:
            out.append(q)
        else:
            stack.extend(got)
    order = MonomialOrder.default(p.table)
    out.sort(key=lambda f: order.key(order.leading_monomial(f)))
    return tuple(out)


def generalize(rule: Rule, patterns: PatternTable) -> list[Rule]:
    """Rules from every nonempty proper sub-product of the factored criterion.

    Dropping factors can only widen the selection, trading support for
    exceptions; duplicates by criterion are coalesced.
    """
    factors = rule.factors
    if len(factors) < 2:
        return []
    table = rule.criterion.table
    out: list[Rule] = []
    seen: set[frozenset[int]] = set()
    for combo in range(1, (1 << len(factors)) - 1):
        criterion = table.one()
        for j, f in enumerate(factors):
            if combo >> j & 1:
                criterion = criterion * f
        if criterion.monomials in seen:
            continue
        seen.add(criterion.monomials)
        got = _make_rule(
            rule.polarity, criterion, patterns, rule.source, rule.cycle, rule.criterion
        )
        if got is not None:
            out.append(got)
    return out
