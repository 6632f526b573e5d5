"""Local HTTP API hosting one review session.

Single-session, loopback-oriented: one dataset per process, mutations
serialized under a lock, optimistic concurrency via a sequence number the
client must echo back.  Report and trace responses are emitted as raw
canonical bytes so they match files written by the CLI exactly.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__
from .dataset import RecordTable, Thresholds, pattern_key
from .documents import canonical_json_bytes, patterns_doc, report_doc, trace_doc
from .errors import DecisionError, PhaseError
from .rules import Rule
from .workflow import (
    AWAITING_EXCEPTIONS,
    AWAITING_INSIGHTS,
    TERMINATED,
    ExceptionCandidate,
    InsightCandidate,
    SessionState,
    decide_exceptions,
    decide_insights,
    final_report,
)


class ApiSession:
    """The one mutable object in the process: state snapshot plus sequence."""

    def __init__(self, state: SessionState):
        self.lock = threading.Lock()
        self.state = state
        self.sequence = 0
        digest = hashlib.sha256(
            canonical_json_bytes(patterns_doc(state.full_patterns))
            + canonical_json_bytes(state.order.to_doc(state.table))
        )
        self.session_id = digest.hexdigest()[:12]


class StateSummary(BaseModel):
    session: str
    sequence: int
    cycle: int
    status: str
    observed_patterns: int
    active_patterns: int
    record_count: int
    active_records: int
    class_positive: int
    empty_ideal_generators: int
    insight_ideal_generators: int
    insight_candidates: int
    exception_candidates: int
    version: str


class RuleView(BaseModel):
    polarity: str
    criterion: str
    factored: str
    factors: list[str]
    support: int
    agree: int
    class_positive: int
    exceptions: list[str]


class InsightCandidateView(BaseModel):
    id: str
    source: str
    remainder: str
    variable_count: int
    best_support: int
    rules: list[RuleView]


class ExceptionCandidateView(BaseModel):
    id: str
    multiplicity: int
    record_ids: list[str]
    remainder: str
    remainder_monomials: int


class DecisionRequest(BaseModel):
    kind: Literal["insights", "exceptions"]
    ids: list[str]
    sequence: int


class PatternDetail(BaseModel):
    key: str
    assignments: dict[str, int]
    class_bit: int
    multiplicity: int
    record_ids: list[str]
    active: bool
    values: dict[str, dict[str, float]] | None


def _summary(session: ApiSession) -> StateSummary:
    s = session.state
    return StateSummary(
        session=session.session_id,
        sequence=session.sequence,
        cycle=s.cycle,
        status=s.status,
        observed_patterns=s.full_patterns.observed_count,
        active_patterns=s.active_patterns.observed_count,
        record_count=s.full_patterns.record_count,
        active_records=s.active_patterns.record_count,
        class_positive=s.full_patterns.class_positive,
        empty_ideal_generators=len(s.empty_ideal.generators),
        insight_ideal_generators=len(s.insight_ideal.generators),
        insight_candidates=len(s.insight_candidates),
        exception_candidates=len(s.exception_candidates),
        version=__version__,
    )


def _rule_view(rule: Rule, state: SessionState) -> RuleView:
    order = state.order
    return RuleView(
        polarity=rule.polarity,
        criterion=rule.criterion.render(order),
        factored=rule.factored_text(order),
        factors=[f.render(order) for f in rule.factors],
        support=rule.support,
        agree=rule.agree,
        class_positive=rule.class_positive,
        exceptions=list(rule.exception_ids),
    )


def _insight_view(c: InsightCandidate, state: SessionState) -> InsightCandidateView:
    cm = state.table.class_mask
    return InsightCandidateView(
        id=c.ident,
        source=c.source.render(state.order),
        remainder=c.remainder.render(state.order),
        variable_count=(c.source.support_mask & ~cm).bit_count(),
        best_support=c.best_support,
        rules=[_rule_view(r, state) for r in c.rules],
    )


def _exception_view(c: ExceptionCandidate, state: SessionState) -> ExceptionCandidateView:
    return ExceptionCandidateView(
        id=c.ident,
        multiplicity=c.pattern.multiplicity,
        record_ids=list(c.pattern.record_ids),
        remainder=c.remainder.render(state.order),
        remainder_monomials=len(c.remainder.monomials),
    )


def create_app(
    state: SessionState,
    records: RecordTable | None = None,
    thresholds: Thresholds | None = None,
    ui_dir: Path | None = None,
) -> FastAPI:
    session = ApiSession(state)
    raw_values = (
        {
            r.record_id: {
                state.table.variables[idx].code: r.values[pos]
                for pos, idx in enumerate(state.table.feature_indices)
            }
            for r in records.records
        }
        if records is not None
        else None
    )

    app = FastAPI(title="lodana review API", version=__version__)

    @app.exception_handler(PhaseError)
    async def _phase_conflict(request: Request, exc: PhaseError) -> JSONResponse:
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(DecisionError)
    async def _bad_decision(request: Request, exc: DecisionError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "session": session.session_id, "version": __version__}

    @app.get("/state", response_model=StateSummary)
    def get_state() -> StateSummary:
        with session.lock:
            return _summary(session)

    @app.get("/candidates/insights", response_model=list[InsightCandidateView])
    def get_insights() -> list[InsightCandidateView]:
        with session.lock:
            s = session.state
        if s.status != AWAITING_INSIGHTS:
            raise PhaseError(f"no insight candidates while {s.status}")
        return [_insight_view(c, s) for c in s.insight_candidates]

    @app.get("/candidates/exceptions", response_model=list[ExceptionCandidateView])
    def get_exceptions() -> list[ExceptionCandidateView]:
        with session.lock:
            s = session.state
        if s.status != AWAITING_EXCEPTIONS:
            raise PhaseError(f"no exception candidates while {s.status}")
        return [_exception_view(c, s) for c in s.exception_candidates]

    @app.post("/decisions", response_model=StateSummary)
    def post_decisions(request: DecisionRequest) -> StateSummary:
        with session.lock:
            if request.sequence != session.sequence:
                return JSONResponse(
                    status_code=409,
                    content={
                        "detail": f"stale sequence {request.sequence}, current {session.sequence}"
                    },
                )
            if request.kind == "insights":
                new_state = decide_insights(session.state, request.ids)
            else:
                new_state = decide_exceptions(session.state, request.ids)
            session.state = new_state
            session.sequence += 1
            return _summary(session)

    @app.get("/report")
    def get_report() -> Response:
        with session.lock:
            s = session.state
        if s.status != TERMINATED:
            raise PhaseError("the session has not terminated")
        doc = report_doc(final_report(s), thresholds=thresholds, policy=None)
        return Response(content=canonical_json_bytes(doc), media_type="application/json")

    @app.get("/trace")
    def get_trace() -> Response:
        with session.lock:
            s = session.state
        return Response(
            content=canonical_json_bytes(trace_doc(s.trace)), media_type="application/json"
        )

    @app.get("/patterns/{key}", response_model=PatternDetail)
    def get_pattern(key: str) -> PatternDetail:
        with session.lock:
            s = session.state
        pattern = s.full_patterns.get(key)
        if pattern is None:
            return JSONResponse(status_code=404, content={"detail": f"unknown pattern {key!r}"})
        table = s.table
        active = s.active_patterns.get(key) is not None
        values = (
            {rid: raw_values[rid] for rid in pattern.record_ids if rid in raw_values}
            if raw_values is not None
            else None
        )
        return PatternDetail(
            key=key,
            assignments={
                table.variables[i].code: pattern.bits >> i & 1 for i in range(table.width)
            },
            class_bit=pattern.bits >> table.class_index & 1,
            multiplicity=pattern.multiplicity,
            record_ids=list(pattern.record_ids),
            active=active,
            values=values,
        )

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
