"""Versioned JSON documents and the canonical serializer.

Everything written to disk or over the wire goes through
canonical_json_bytes, so identical inputs produce byte-identical files
regardless of which component emitted them.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .boolring import BoolPoly, MonomialOrder, VariableTable, parse_poly
from .dataset import Deviation, Pattern, PatternTable, Thresholds, pattern_key
from .errors import InputError
from .gbasis import GroebnerBasis
from .rules import Rule
from .workflow import (
    CycleTrace,
    DecisionTrace,
    ExceptionDecision,
    Report,
    RuleRow,
    TRACE_IN_PROGRESS,
    TRACE_TERMINATED,
)

FORMAT_VERSIONS = {
    "lodana.variables": 1,
    "lodana.patterns": 1,
    "lodana.thresholds": 1,
    "lodana.trace": 1,
    "lodana.basis": 1,
    "lodana.report": 1,
}


def canonical_json_bytes(doc: Mapping[str, Any]) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def write_document(path: str | Path, doc: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(canonical_json_bytes(doc))
    return path


def read_document(path: str | Path, kind: str) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
    check_document(doc, kind)
    return doc


def _header(kind: str) -> dict:
    fmt = f"lodana.{kind}"
    return {"format": fmt, "version": FORMAT_VERSIONS[fmt]}


def check_document(doc: Any, kind: str) -> dict:
    fmt = f"lodana.{kind}"
    if not isinstance(doc, dict):
        raise InputError(f"expected a {fmt} document object")
    got = doc.get("format")
    if got != fmt:
        raise InputError(f"expected format {fmt!r}, found {got!r}")
    version = doc.get("version")
    if version != FORMAT_VERSIONS[fmt]:
        raise InputError(
            f"unsupported {fmt} version {version!r} (supported: {FORMAT_VERSIONS[fmt]})"
        )
    return doc


# ---------------------------------------------------------------- variables


def variables_doc(table: VariableTable, labels: Mapping[str, int] | None = None) -> dict:
    doc = _header("variables") | table.to_doc()
    if labels:
        doc["labels"] = dict(labels)
    return doc


def load_variables(doc: dict) -> tuple[VariableTable, dict[str, int]]:
    check_document(doc, "variables")
    table = VariableTable.from_doc(doc)
    labels = doc.get("labels", {})
    if not isinstance(labels, dict) or any(v not in (0, 1) for v in labels.values()):
        raise InputError("labels must map class strings to 0 or 1")
    return table, dict(labels)


# ----------------------------------------------------------------- patterns


def patterns_doc(patterns: PatternTable) -> dict:
    width = patterns.table.width
    return _header("patterns") | patterns.table.to_doc() | {
        "patterns": [
            {
                "key": pattern_key(p.bits, width),
                "multiplicity": p.multiplicity,
                "record_ids": list(p.record_ids),
            }
            for p in patterns.patterns
        ]
    }


def _bits_from_key(key: str, width: int) -> int:
    if not isinstance(key, str) or len(key) != width or set(key) - {"0", "1"}:
        raise InputError(f"pattern key {key!r} does not match the variable table width {width}")
    return sum(1 << i for i, c in enumerate(key) if c == "1")


def load_patterns(doc: dict) -> PatternTable:
    check_document(doc, "patterns")
    table = VariableTable.from_doc(doc)
    rows = doc.get("patterns")
    if not isinstance(rows, list):
        raise InputError("patterns document lacks a pattern list")
    patterns = []
    for row in rows:
        try:
            bits = _bits_from_key(row["key"], table.width)
            patterns.append(
                Pattern(bits, int(row["multiplicity"]), tuple(str(r) for r in row["record_ids"]))
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed pattern row: {row!r}") from exc
    return PatternTable(table, tuple(patterns))


# --------------------------------------------------------------- thresholds


def thresholds_doc(thresholds: Thresholds) -> dict:
    table = thresholds.table
    cuts = {
        table.variables[idx].code: thresholds.cuts[pos]
        for pos, idx in enumerate(table.feature_indices)
    }
    return _header("thresholds") | table.to_doc() | {
        "cuts": cuts,
        "deviations": [
            {"code": d.code, "expected": d.expected, "realized": d.realized}
            for d in thresholds.deviations
        ],
    }


def load_thresholds(doc: dict) -> Thresholds:
    check_document(doc, "thresholds")
    table = VariableTable.from_doc(doc)
    cuts_by_code = doc.get("cuts")
    if not isinstance(cuts_by_code, dict):
        raise InputError("thresholds document lacks a cuts object")
    cuts = []
    for idx in table.feature_indices:
        code = table.variables[idx].code
        if code not in cuts_by_code:
            raise InputError(f"missing cut for feature {code!r}")
        cuts.append(float(cuts_by_code[code]))
    unknown = set(cuts_by_code) - {table.variables[i].code for i in table.feature_indices}
    if unknown:
        raise InputError(f"cuts for unknown features: {sorted(unknown)}")
    deviations = tuple(
        Deviation(str(d["code"]), int(d["expected"]), int(d["realized"]))
        for d in doc.get("deviations", ())
    )
    return Thresholds(table, tuple(cuts), deviations)


# -------------------------------------------------------------------- trace


def _trace_body(trace: DecisionTrace) -> dict:
    return {
        "status": trace.status,
        "cycles": [
            {
                "cycle": ct.cycle,
                "insight_rounds": [list(r) for r in ct.insight_rounds],
                "insights_closed": ct.insights_closed,
                "exceptions": [
                    {"pattern": d.pattern_key, "record_ids": list(d.record_ids)}
                    for d in ct.exceptions
                ],
                "exceptions_decided": ct.exceptions_decided,
            }
            for ct in trace.cycles
        ],
    }


def trace_doc(trace: DecisionTrace) -> dict:
    return _header("trace") | _trace_body(trace)


def _trace_from_body(doc: Mapping[str, Any]) -> DecisionTrace:
    status = doc.get("status")
    if status not in (TRACE_IN_PROGRESS, TRACE_TERMINATED):
        raise InputError(f"unknown trace status {status!r}")
    cycles = []
    for row in doc.get("cycles", ()):
        try:
            cycles.append(
                CycleTrace(
                    cycle=int(row["cycle"]),
                    insight_rounds=tuple(
                        tuple(str(p) for p in r) for r in row.get("insight_rounds", ())
                    ),
                    insights_closed=bool(row.get("insights_closed", False)),
                    exceptions=tuple(
                        ExceptionDecision(
                            str(d["pattern"]), tuple(str(r) for r in d["record_ids"])
                        )
                        for d in row.get("exceptions", ())
                    ),
                    exceptions_decided=bool(row.get("exceptions_decided", False)),
                )
            )
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed trace cycle: {row!r}") from exc
    return DecisionTrace(tuple(cycles), status)


def trace_from_doc(doc: dict) -> DecisionTrace:
    check_document(doc, "trace")
    return _trace_from_body(doc)


# -------------------------------------------------------------------- basis


def basis_doc(basis: GroebnerBasis, table: VariableTable) -> dict:
    return _header("basis") | table.to_doc() | {
        "order": basis.order.to_doc(table),
        "reduced": basis.reduced,
        "elements": [g.render(basis.order) for g in basis.elements],
    }


def basis_from_doc(doc: dict) -> tuple[GroebnerBasis, VariableTable]:
    check_document(doc, "basis")
    table = VariableTable.from_doc(doc)
    order = MonomialOrder.from_doc(doc["order"], table)
    elements = tuple(parse_poly(text, table) for text in doc.get("elements", ()))
    return GroebnerBasis(elements, order, bool(doc.get("reduced", True))), table


# ------------------------------------------------------------------- report


def _rule_row(rule: Rule, order: MonomialOrder) -> dict:
    row = {
        "polarity": rule.polarity,
        "criterion": rule.criterion.render(order),
        "factors": [f.render(order) for f in rule.factors],
        "factored": rule.factored_text(order),
        "support": rule.support,
        "agree": rule.agree,
        "class_positive": rule.class_positive,
        "exceptions": list(rule.exception_ids),
        "source": rule.source.render(order),
        "cycle": rule.cycle,
    }
    if rule.generalized_from is not None:
        row["parent"] = rule.generalized_from.render(order)
    return row


def report_doc(
    report: Report,
    thresholds: Thresholds | None = None,
    policy: Mapping[str, Any] | None = None,
) -> dict:
    order = report.order
    pt = report.full_patterns
    doc = _header("report") | report.table.to_doc() | {
        "order": order.to_doc(report.table),
        "records": {"total": pt.record_count, "class_positive": pt.class_positive},
        "patterns": {
            "observed": pt.observed_count,
            "unobserved_exponent": pt.unobserved_exponent,
        },
        "rules": [_rule_row(r, order) for r in report.rules],
        "generalizations": [_rule_row(r, order) for r in report.generalizations],
        "insight_basis": [g.render(order) for g in report.insight_basis.elements],
        "excised_record_ids": list(report.excised_record_ids),
        "trace": _trace_body(report.trace),
        "tool": {"name": "lodana", "version": __version__},
    }
    if thresholds is not None:
        td = thresholds_doc(thresholds)
        doc["thresholds"] = {"cuts": td["cuts"], "deviations": td["deviations"]}
    else:
        doc["thresholds"] = None
    doc["policy"] = dict(policy) if policy is not None else None
    return doc


def report_rows_from_doc(doc: dict) -> tuple[VariableTable, list[RuleRow]]:
    """Extract (polarity, criterion, support, agree, exceptions) rows for verification."""
    check_document(doc, "report")
    table = VariableTable.from_doc(doc)
    rows: list[RuleRow] = []
    for section in ("rules", "generalizations"):
        for row in doc.get(section, ()):
            try:
                rows.append(
                    (
                        str(row["polarity"]),
                        parse_poly(row["criterion"], table),
                        int(row["support"]),
                        int(row["agree"]),
                        tuple(str(r) for r in row["exceptions"]),
                    )
                )
            except (KeyError, TypeError) as exc:
                raise InputError(f"malformed rule row: {row!r}") from exc
    return table, rows


def _markdown_rule_table(rows: Sequence[dict], with_parent: bool) -> list[str]:
    head = ["polarity", "criterion", "support (class-positive)", "exceptions"]
    if with_parent:
        head.append("parent")
    lines = [
        "| " + " | ".join(head) + " |",
        "|" + "|".join(" --- " for _ in head) + "|",
    ]
    for row in rows:
        cells = [
            row["polarity"],
            f"`{row['factored']}`",
            f"{row['support']} ({row['class_positive']})",
            ", ".join(row["exceptions"]) or "none",
        ]
        if with_parent:
            cells.append(f"`{row.get('parent', '')}`")
        lines.append("| " + " | ".join(cells) + " |")
    return lines


def report_markdown(doc: dict) -> str:
    check_document(doc, "report")
    rec = doc["records"]
    pat = doc["patterns"]
    lines = [
        "# Rule report",
        "",
        f"{rec['total']} records ({rec['class_positive']} class-positive), "
        f"{pat['observed']} observed patterns, 2^{pat['unobserved_exponent']} empty criteria.",
        "",
        "## Rules",
        "",
    ]
    if doc["rules"]:
        lines.extend(_markdown_rule_table(doc["rules"], with_parent=False))
    else:
        lines.append("No rules: the insight ideal is empty.")
    lines.extend(["", "## Generalizations", ""])
    if doc["generalizations"]:
        lines.extend(_markdown_rule_table(doc["generalizations"], with_parent=True))
    else:
        lines.append("None.")
    lines.extend(["", "## Decisions", ""])
    for ct in doc["trace"]["cycles"]:
        accepted = [p for round_ in ct["insight_rounds"] for p in round_]
        excs = [f"{d['pattern']} ({', '.join(d['record_ids'])})" for d in ct["exceptions"]]
        lines.append(f"- cycle {ct['cycle']}: insights {accepted or 'none'}; exceptions {excs or 'none'}")
    if doc["excised_record_ids"]:
        lines.extend(["", f"Excised records: {', '.join(doc['excised_record_ids'])}"])
    lines.append("")
    return "\n".join(lines)
