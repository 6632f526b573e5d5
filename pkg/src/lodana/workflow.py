"""The expert-in-the-loop analysis loop.

A session walks a fixed cycle: compute the reduced basis of the ideal of
empty criteria, present its class-containing elements (reduced modulo the
insight ideal) as rule candidates, fold accepted ones into the insight
ideal until no more are accepted, then present rarely-observed patterns
whose indicator remainders are small as exception candidates.  Accepting
exceptions excises their records and starts the next cycle; accepting
none terminates.  Decisions come from a policy, a recorded trace, or a
live client, and every accepted decision is recorded for replay.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .boolring import BoolPoly, MonomialOrder, VariableTable
from .dataset import (
    Pattern,
    PatternTable,
    RecordTable,
    Thresholds,
    pattern_indicator,
    pattern_key,
    record_bits,
)
from .errors import DecisionError, InputError, PhaseError, TraceMismatchError
from .gbasis import GroebnerBasis, normal_form
from .ideals import (
    Ideal,
    extend,
    ideal_from_patterns,
    membership,
    remainders_mod,
    zero_ideal,
)
from .rules import NEGATIVE, POSITIVE, Rule, extract_rules, generalize

AWAITING_INSIGHTS = "awaiting-insight-decisions"
AWAITING_EXCEPTIONS = "awaiting-exception-decisions"
TERMINATED = "terminated"

TRACE_IN_PROGRESS = "in-progress"
TRACE_TERMINATED = "terminated"

PHASE_INSIGHT = "insight"
PHASE_EXCEPTION = "exception"


@dataclass(frozen=True)
class InsightCandidate:
    """A class-containing basis element offered for acceptance into the insight ideal."""

    source: BoolPoly
    remainder: BoolPoly
    rules: tuple[Rule, ...]
    ident: str

    @property
    def best_support(self) -> int:
        return max((r.support for r in self.rules), default=0)


@dataclass(frozen=True)
class ExceptionCandidate:
    """An observed pattern whose indicator does not reduce to zero."""

    pattern: Pattern
    remainder: BoolPoly
    ident: str


@dataclass(frozen=True)
class ExceptionDecision:
    pattern_key: str
    record_ids: tuple[str, ...]


@dataclass(frozen=True)
class CycleTrace:
    cycle: int
    insight_rounds: tuple[tuple[str, ...], ...] = ()
    insights_closed: bool = False
    exceptions: tuple[ExceptionDecision, ...] = ()
    exceptions_decided: bool = False


@dataclass(frozen=True)
class DecisionTrace:
    cycles: tuple[CycleTrace, ...]
    status: str = TRACE_IN_PROGRESS


@dataclass(frozen=True)
class SessionState:
    order: MonomialOrder
    full_patterns: PatternTable
    active_patterns: PatternTable
    empty_ideal: Ideal
    insight_ideal: Ideal
    cycle: int
    status: str
    insight_candidates: tuple[InsightCandidate, ...]
    exception_candidates: tuple[ExceptionCandidate, ...]
    accepted_insights: tuple[tuple[str, int], ...]
    trace: DecisionTrace

    @property
    def table(self) -> VariableTable:
        return self.full_patterns.table


def _insight_candidates(
    empty_ideal: Ideal,
    insight_ideal: Ideal,
    active: PatternTable,
    order: MonomialOrder,
    cycle: int,
) -> tuple[InsightCandidate, ...]:
    table = active.table
    cm = table.class_mask
    basis = empty_ideal.basis()
    sources = [g for g in basis if g.support_mask & cm]
    out: list[InsightCandidate] = []
    for src, rem in zip(sources, remainders_mod(sources, insight_ideal)):
        if not rem:
            continue  # subsumed by accepted insights
        if not rem.support_mask & cm:
            continue  # class variable eliminated; nothing to claim
        if not membership(rem, empty_ideal):
            continue  # defensive: reduction must stay inside the ideal
        rules = tuple(extract_rules(rem, active, cycle=cycle))
        out.append(InsightCandidate(src, rem, rules, src.render(order)))
    out.sort(
        key=lambda c: (
            -c.best_support,
            (c.source.support_mask & ~cm).bit_count(),
            c.ident,
        )
    )
    return tuple(out)


def _exception_candidates(
    empty_ideal: Ideal, active: PatternTable
) -> tuple[ExceptionCandidate, ...]:
    table = active.table
    basis = empty_ideal.basis()
    out: list[ExceptionCandidate] = []
    for p in active.patterns:
        rem = normal_form(pattern_indicator(table, p.bits), basis)
        if not rem:
            continue
        out.append(ExceptionCandidate(p, rem, pattern_key(p.bits, table.width)))
    out.sort(key=lambda c: (len(c.remainder.monomials), c.pattern.multiplicity, c.ident))
    return tuple(out)


def start_session(patterns: PatternTable, order: MonomialOrder | None = None) -> SessionState:
    if not patterns.patterns:
        raise InputError("cannot start a session on an empty pattern table")
    if order is None:
        order = MonomialOrder.default(patterns.table)
    empty_ideal = ideal_from_patterns(patterns, order, label="empty-criteria")
    insight_ideal = zero_ideal(patterns.table, order, label="insights")
    candidates = _insight_candidates(empty_ideal, insight_ideal, patterns, order, 1)
    return SessionState(
        order=order,
        full_patterns=patterns,
        active_patterns=patterns,
        empty_ideal=empty_ideal,
        insight_ideal=insight_ideal,
        cycle=1,
        status=AWAITING_INSIGHTS,
        insight_candidates=candidates,
        exception_candidates=(),
        accepted_insights=(),
        trace=DecisionTrace((CycleTrace(1),)),
    )


def insight_candidates(state: SessionState) -> tuple[InsightCandidate, ...]:
    if state.status != AWAITING_INSIGHTS:
        raise PhaseError(f"no insight candidates while {state.status}")
    return state.insight_candidates


def exception_candidates(state: SessionState) -> tuple[ExceptionCandidate, ...]:
    if state.status != AWAITING_EXCEPTIONS:
        raise PhaseError(f"no exception candidates while {state.status}")
    return state.exception_candidates


def _with_current_cycle(trace: DecisionTrace, **changes) -> DecisionTrace:
    cycles = trace.cycles[:-1] + (replace(trace.cycles[-1], **changes),)
    return replace(trace, cycles=cycles)


def decide_insights(state: SessionState, accepted: Sequence[str]) -> SessionState:
    if state.status != AWAITING_INSIGHTS:
        raise PhaseError(f"cannot decide insights while {state.status}")
    known = {c.ident for c in state.insight_candidates}
    wanted = set()
    for ident in accepted:
        if ident in known:
            wanted.add(ident)
            continue
        # An accepted id may quote the simplified remainder instead of the
        # basis element it reduces; resolve it only when unambiguous.
        matches = [
            c
            for c in state.insight_candidates
            if c.remainder.render(state.order) == ident
        ]
        if len(matches) != 1:
            raise DecisionError(
                f"not a presented insight candidate: {ident}",
                cycle=state.cycle,
                phase=PHASE_INSIGHT,
            )
        wanted.add(matches[0].ident)
    chosen = [c for c in state.insight_candidates if c.ident in wanted]

    if not chosen:
        trace = _with_current_cycle(state.trace, insights_closed=True)
        return replace(
            state,
            status=AWAITING_EXCEPTIONS,
            insight_candidates=(),
            exception_candidates=_exception_candidates(state.empty_ideal, state.active_patterns),
            trace=trace,
        )

    insight_ideal = extend(state.insight_ideal, [c.source for c in chosen])
    round_ = tuple(c.ident for c in chosen)
    current = state.trace.cycles[-1]
    trace = _with_current_cycle(
        state.trace, insight_rounds=current.insight_rounds + (round_,)
    )
    candidates = _insight_candidates(
        state.empty_ideal, insight_ideal, state.active_patterns, state.order, state.cycle
    )
    return replace(
        state,
        insight_ideal=insight_ideal,
        insight_candidates=candidates,
        accepted_insights=state.accepted_insights
        + tuple((c.ident, state.cycle) for c in chosen),
        trace=trace,
    )


def decide_exceptions(state: SessionState, accepted: Sequence[str]) -> SessionState:
    if state.status != AWAITING_EXCEPTIONS:
        raise PhaseError(f"cannot decide exceptions while {state.status}")
    wanted = set(accepted)
    known = {c.ident for c in state.exception_candidates}
    for ident in accepted:
        if ident not in known:
            raise DecisionError(
                f"not a presented exception candidate: {ident}",
                cycle=state.cycle,
                phase=PHASE_EXCEPTION,
            )
    chosen = [c for c in state.exception_candidates if c.ident in wanted]

    if not chosen:
        trace = _with_current_cycle(state.trace, exceptions_decided=True)
        trace = replace(trace, status=TRACE_TERMINATED)
        return replace(
            state,
            status=TERMINATED,
            insight_candidates=(),
            exception_candidates=(),
            trace=trace,
        )

    empty_ideal = extend(state.empty_ideal, [c.remainder for c in chosen])
    active = state.active_patterns.without_records(
        [rid for c in chosen for rid in c.pattern.record_ids]
    )
    decisions = tuple(ExceptionDecision(c.ident, c.pattern.record_ids) for c in chosen)
    trace = _with_current_cycle(
        state.trace, exceptions=decisions, exceptions_decided=True
    )
    next_cycle = state.cycle + 1
    trace = replace(trace, cycles=trace.cycles + (CycleTrace(next_cycle),))
    candidates = _insight_candidates(
        empty_ideal, state.insight_ideal, active, state.order, next_cycle
    )
    return replace(
        state,
        empty_ideal=empty_ideal,
        active_patterns=active,
        cycle=next_cycle,
        status=AWAITING_INSIGHTS,
        insight_candidates=candidates,
        exception_candidates=(),
        trace=trace,
    )


@dataclass(frozen=True)
class RelevancePolicy:
    """Accept an insight candidate when any of its rules is broad and short."""

    min_support: int = 20
    max_distinct_variables: int = 5

    def __post_init__(self) -> None:
        if self.min_support < 1 or self.max_distinct_variables < 1:
            raise InputError("policy bounds must be positive")

    def accepts(self, candidate: InsightCandidate) -> bool:
        for r in candidate.rules:
            if (
                r.support >= self.min_support
                and r.criterion.support_mask.bit_count() <= self.max_distinct_variables
            ):
                return True
        return False


@dataclass(frozen=True)
class ExceptionPolicy:
    """Accept a pattern as an exception when it is rare and its remainder small."""

    max_monomials: int = 2
    max_pattern_multiplicity: int = 2
    max_variables: int | None = None

    def __post_init__(self) -> None:
        if self.max_monomials < 1 or self.max_pattern_multiplicity < 1:
            raise InputError("policy bounds must be positive")
        if self.max_variables is not None and self.max_variables < 1:
            raise InputError("policy bounds must be positive")

    def accepts(self, candidate: ExceptionCandidate) -> bool:
        if len(candidate.remainder.monomials) > self.max_monomials:
            return False
        if candidate.pattern.multiplicity > self.max_pattern_multiplicity:
            return False
        if self.max_variables is not None:
            cm = candidate.remainder.table.class_mask
            distinct = (candidate.remainder.support_mask & ~cm).bit_count()
            if distinct > self.max_variables:
                return False
        return True


def run_policy(
    state: SessionState,
    relevance: RelevancePolicy | None = None,
    exceptions: ExceptionPolicy | None = None,
) -> tuple[SessionState, DecisionTrace]:
    """Drive a session to termination with policies standing in for the expert."""
    rel = relevance if relevance is not None else RelevancePolicy()
    exc = exceptions if exceptions is not None else ExceptionPolicy()
    while state.status != TERMINATED:
        if state.status == AWAITING_INSIGHTS:
            accepted = [c.ident for c in state.insight_candidates if rel.accepts(c)]
            state = decide_insights(state, accepted)
        else:
            accepted = [c.ident for c in state.exception_candidates if exc.accepts(c)]
            state = decide_exceptions(state, accepted)
    return state, state.trace


def _resolve_exception(
    state: SessionState, decision: ExceptionDecision, cycle: int
) -> ExceptionCandidate:
    for c in state.exception_candidates:
        if c.ident == decision.pattern_key:
            if set(c.pattern.record_ids) != set(decision.record_ids):
                raise TraceMismatchError(
                    f"pattern {decision.pattern_key} has records"
                    f" {sorted(c.pattern.record_ids)}, trace says {sorted(decision.record_ids)}",
                    cycle=cycle,
                    phase=PHASE_EXCEPTION,
                )
            return c
    # Fall back to matching by the record set, for traces written against
    # a differently-coded variable table.
    wanted = set(decision.record_ids)
    for c in state.exception_candidates:
        if set(c.pattern.record_ids) == wanted:
            return c
    raise TraceMismatchError(
        f"pattern {decision.pattern_key} is not an exception candidate",
        cycle=cycle,
        phase=PHASE_EXCEPTION,
    )


def replay(state: SessionState, trace: DecisionTrace) -> SessionState:
    """Re-apply a recorded trace, validating every decision against candidates."""
    for ct in trace.cycles:
        if state.status == TERMINATED:
            raise TraceMismatchError(
                "trace continues past termination", cycle=ct.cycle, phase=PHASE_INSIGHT
            )
        if state.cycle != ct.cycle:
            raise TraceMismatchError(
                f"expected cycle {ct.cycle}, session is at cycle {state.cycle}",
                cycle=ct.cycle,
                phase=PHASE_INSIGHT,
            )
        for round_ in ct.insight_rounds:
            if not round_:
                raise TraceMismatchError(
                    "recorded insight round is empty", cycle=ct.cycle, phase=PHASE_INSIGHT
                )
            try:
                state = decide_insights(state, round_)
            except DecisionError as exc:
                raise TraceMismatchError(
                    str(exc), cycle=ct.cycle, phase=PHASE_INSIGHT
                ) from exc
        if not ct.insights_closed:
            return state  # in-progress prefix
        state = decide_insights(state, ())

        if ct.exceptions and not ct.exceptions_decided:
            raise TraceMismatchError(
                "exception decisions recorded but not closed",
                cycle=ct.cycle,
                phase=PHASE_EXCEPTION,
            )
        if not ct.exceptions_decided:
            return state
        accepted = [
            _resolve_exception(state, dec, ct.cycle).ident for dec in ct.exceptions
        ]
        state = decide_exceptions(state, accepted)

    if trace.status == TRACE_TERMINATED and state.status != TERMINATED:
        if state.status == AWAITING_INSIGHTS:
            state = decide_insights(state, ())
        state = decide_exceptions(state, ())
    return state


@dataclass(frozen=True)
class Report:
    table: VariableTable
    order: MonomialOrder
    rules: tuple[Rule, ...]
    generalizations: tuple[Rule, ...]
    insight_basis: GroebnerBasis
    trace: DecisionTrace
    full_patterns: PatternTable
    excised_record_ids: tuple[str, ...]


def final_report(state: SessionState) -> Report:
    """Rules from the insight ideal's basis, counted against the full table.

    Counting against all records (excised ones included) makes each rule's
    exception list name exactly the records the claim does not hold for.
    """
    if state.status != TERMINATED:
        raise PhaseError("a report requires a terminated session")
    cm = state.table.class_mask
    basis = state.insight_ideal.basis()
    accepted_cycle = dict(state.accepted_insights)
    rules: list[Rule] = []
    for g in basis:
        if not g.support_mask & cm:
            continue
        cycle = accepted_cycle.get(g.render(state.order))
        rules.extend(extract_rules(g, state.full_patterns, cycle=cycle))
    generalizations = [
        sub for r in rules for sub in generalize(r, state.full_patterns)
    ]
    active_ids = {
        rid for p in state.active_patterns.patterns for rid in p.record_ids
    }
    excised = tuple(
        rid
        for p in state.full_patterns.patterns
        for rid in p.record_ids
        if rid not in active_ids
    )
    return Report(
        table=state.table,
        order=state.order,
        rules=tuple(rules),
        generalizations=tuple(generalizations),
        insight_basis=basis,
        trace=state.trace,
        full_patterns=state.full_patterns,
        excised_record_ids=excised,
    )


@dataclass(frozen=True)
class VerificationResult:
    mismatches: tuple[str, ...]
    checked: int

    @property
    def ok(self) -> bool:
        return not self.mismatches


RuleRow = tuple[str, BoolPoly, int, int, tuple[str, ...]]
# (polarity, criterion, support, agree, exception ids)


def verify_rows(
    rows: Sequence[RuleRow], records: RecordTable, cuts: Thresholds
) -> VerificationResult:
    """Recount every row by direct record evaluation, no algebra involved."""
    table = records.table
    if cuts.table != table:
        raise InputError("thresholds belong to a different variable table")
    cm = table.class_mask
    bits = [(r.record_id, record_bits(r, cuts)) for r in records.records]
    mismatches: list[str] = []
    for polarity, criterion, support, agree, exception_ids in rows:
        if criterion.table != table:
            raise InputError("rule criterion belongs to a different variable table")
        selected = [(rid, b) for rid, b in bits if criterion.eval_mask(b)]
        found_support = len(selected)
        want_positive = polarity == POSITIVE
        found_exceptions = sorted(
            rid for rid, b in selected if bool(b & cm) != want_positive
        )
        found_agree = found_support - len(found_exceptions)
        label = f"{polarity} rule {criterion}"
        if found_support != support:
            mismatches.append(f"{label}: support {found_support}, reported {support}")
        if found_agree != agree:
            mismatches.append(f"{label}: agree {found_agree}, reported {agree}")
        if found_exceptions != sorted(exception_ids):
            mismatches.append(
                f"{label}: exceptions {found_exceptions}, reported {sorted(exception_ids)}"
            )
    return VerificationResult(tuple(mismatches), len(rows))


def verify_rules(report: Report, records: RecordTable, cuts: Thresholds) -> VerificationResult:
    if records.table != report.table:
        raise InputError("records belong to a different variable table")
    rows = [
        (r.polarity, r.criterion, r.support, r.agree, r.exception_ids)
        for r in report.rules + report.generalizations
    ]
    return verify_rows(rows, records, cuts)
