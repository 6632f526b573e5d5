"""Command-line front door.

Exit codes: 0 success, 2 verification mismatch, 3 input or trace error.
"""

from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import __version__
from .boolring import DEGLEX, DEGREVLEX, LEX, MonomialOrder, VariableTable
from .dataset import (
    PatternTable,
    RecordTable,
    Thresholds,
    binarize,
    compute_thresholds,
    parse_records,
)
from .documents import (
    load_patterns,
    load_thresholds,
    load_variables,
    patterns_doc,
    read_document,
    report_doc,
    report_markdown,
    report_rows_from_doc,
    thresholds_doc,
    trace_doc,
    trace_from_doc,
    write_document,
)
from .errors import LodanaError
from .workflow import (
    ExceptionPolicy,
    RelevancePolicy,
    TERMINATED,
    final_report,
    replay,
    run_policy,
    start_session,
    verify_rows,
    verify_rules,
)

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_INPUT = 3

_RELEVANCE_KEYS = ("min_support", "max_distinct_variables")
_EXCEPTION_KEYS = ("max_monomials", "max_pattern_multiplicity", "max_variables")


def _fail(message: str, code: int = EXIT_INPUT) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _guarded(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LodanaError as exc:
            _fail(str(exc))

    return wrapper


def _parse_policy(text: str | None) -> tuple[RelevancePolicy, ExceptionPolicy]:
    rel: dict[str, int] = {}
    exc: dict[str, int | None] = {}
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        key, eq, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if not eq or not value:
            _fail(f"policy entry {part!r} must be key=value")
        try:
            parsed = None if value.lower() == "none" else int(value)
        except ValueError:
            _fail(f"policy value for {key!r} must be an integer")
        if key in _RELEVANCE_KEYS:
            if parsed is None:
                _fail(f"policy key {key!r} cannot be none")
            rel[key] = parsed
        elif key in _EXCEPTION_KEYS:
            if parsed is None and key != "max_variables":
                _fail(f"policy key {key!r} cannot be none")
            exc[key] = parsed
        else:
            _fail(f"unknown policy key {key!r}")
    return RelevancePolicy(**rel), ExceptionPolicy(**exc)


def _policy_description(rel: RelevancePolicy, exc: ExceptionPolicy) -> dict:
    return {
        "relevance": {
            "min_support": rel.min_support,
            "max_distinct_variables": rel.max_distinct_variables,
        },
        "exceptions": {
            "max_monomials": exc.max_monomials,
            "max_pattern_multiplicity": exc.max_pattern_multiplicity,
            "max_variables": exc.max_variables,
        },
    }


def _load_records(records_path: Path, variables_path: Path | None) -> RecordTable:
    if variables_path is None:
        _fail("--records requires --variables (the column-to-code map)")
    table, labels = load_variables(read_document(variables_path, "variables"))
    with open(records_path, newline="", encoding="utf-8") as handle:
        return parse_records(handle, table, labels)


def _resolve_input(
    patterns_path: Path | None,
    records_path: Path | None,
    variables_path: Path | None,
    thresholds_path: Path | None,
) -> tuple[PatternTable, RecordTable | None, Thresholds | None]:
    """(patterns, records-for-verification, thresholds) from either input kind."""
    if (patterns_path is None) == (records_path is None):
        _fail("provide exactly one of --patterns or --records")
    thresholds = (
        load_thresholds(read_document(thresholds_path, "thresholds"))
        if thresholds_path
        else None
    )
    if patterns_path is not None:
        patterns = load_patterns(read_document(patterns_path, "patterns"))
        if thresholds is not None and thresholds.table != patterns.table:
            _fail("thresholds file uses a different variable table")
        return patterns, None, thresholds
    records = _load_records(records_path, variables_path)
    if thresholds is None:
        thresholds = compute_thresholds(records)
    elif thresholds.table != records.table:
        _fail("thresholds file uses a different variable table")
    return binarize(records, thresholds), records, thresholds


@click.group()
@click.version_option(__version__, prog_name="lodana")
def main() -> None:
    """Rule extraction from labeled binary data via Boolean-ring ideals."""


@main.command("binarize")
@click.argument("records_csv", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--variables", "variables_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Variable map document.")
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Use these cuts instead of computing them.")
@click.option("--out", "out_dir", envvar="LODANA_OUT", default=".", type=click.Path(file_okay=False, path_type=Path), help="Output directory.")
@_guarded
def cmd_binarize(records_csv: Path, variables_path: Path, thresholds_path: Path | None, out_dir: Path) -> None:
    """Threshold a records CSV and write the pattern table."""
    records = _load_records(records_csv, variables_path)
    if thresholds_path is not None:
        thresholds = load_thresholds(read_document(thresholds_path, "thresholds"))
        if thresholds.table != records.table:
            _fail("thresholds file uses a different variable table")
    else:
        thresholds = compute_thresholds(records)
    patterns = binarize(records, thresholds)
    write_document(out_dir / "patterns.json", patterns_doc(patterns))
    write_document(out_dir / "thresholds.json", thresholds_doc(thresholds))
    for d in thresholds.deviations:
        click.echo(f"tie on {d.code}: {d.realized} high instead of {d.expected}")
    click.echo(
        f"{len(records)} records, {records.class_positive} class-positive, "
        f"{patterns.observed_count} distinct patterns, "
        f"2^{patterns.unobserved_exponent} empty criteria"
    )
    click.echo(f"wrote {out_dir / 'patterns.json'} and {out_dir / 'thresholds.json'}")


@main.command("analyze")
@click.option("--patterns", "patterns_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--records", "records_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--variables", "variables_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--trace", "trace_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Replay this decision trace.")
@click.option("--policy", "policy_text", default=None, help="Policy overrides, e.g. 'min_support=30,max_monomials=1'.")
@click.option("--order", "order_kind", type=click.Choice([DEGLEX, DEGREVLEX, LEX]), default=DEGLEX)
@click.option("--out", "out_dir", envvar="LODANA_OUT", default=".", type=click.Path(file_okay=False, path_type=Path))
@_guarded
def cmd_analyze(
    patterns_path: Path | None,
    records_path: Path | None,
    variables_path: Path | None,
    thresholds_path: Path | None,
    trace_path: Path | None,
    policy_text: str | None,
    order_kind: str,
    out_dir: Path,
) -> None:
    """Run the analysis loop headlessly and write the report."""
    if trace_path is not None and policy_text is not None:
        _fail("--trace and --policy are mutually exclusive")
    patterns, records, thresholds = _resolve_input(
        patterns_path, records_path, variables_path, thresholds_path
    )
    order = MonomialOrder.default(patterns.table, order_kind)
    state = start_session(patterns, order)
    if trace_path is not None:
        trace = trace_from_doc(read_document(trace_path, "trace"))
        state = replay(state, trace)
        if state.status != TERMINATED:
            _fail("the trace does not terminate the session")
        # The policy field records synthesized decisions only; a replayed or
        # interactive run has none, keeping report bytes path-independent.
        policy_desc = None
    else:
        rel, exc = _parse_policy(policy_text)
        state, _ = run_policy(state, rel, exc)
        policy_desc = _policy_description(rel, exc)

    report = final_report(state)
    doc = report_doc(report, thresholds=thresholds, policy=policy_desc)
    write_document(out_dir / "report.json", doc)
    out_md = out_dir / "report.md"
    out_md.parent.mkdir(parents=True, exist_ok=True)
    out_md.write_text(report_markdown(doc), encoding="utf-8")
    write_document(out_dir / "trace.json", trace_doc(state.trace))
    click.echo(
        f"terminated after {state.cycle} cycle(s): {len(report.rules)} rules, "
        f"{len(report.generalizations)} generalizations, "
        f"{len(report.excised_record_ids)} excised records"
    )
    click.echo(f"wrote {out_dir / 'report.json'}, {out_md}, {out_dir / 'trace.json'}")

    if records is not None:
        result = verify_rules(report, records, thresholds)
        if not result.ok:
            for line in result.mismatches:
                click.echo(f"mismatch: {line}", err=True)
            sys.exit(EXIT_MISMATCH)
        click.echo(f"verification ok ({result.checked} rows)")


@main.command("verify")
@click.argument("report_json", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--records", "records_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--variables", "variables_path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None, help="Needed when the report does not embed cuts.")
@_guarded
def cmd_verify(report_json: Path, records_path: Path, variables_path: Path, thresholds_path: Path | None) -> None:
    """Recount a report's rules by direct record evaluation."""
    doc = read_document(report_json, "report")
    table, rows = report_rows_from_doc(doc)
    records = _load_records(records_path, variables_path)
    if records.table != table:
        _fail("records use a different variable table than the report")
    if thresholds_path is not None:
        thresholds = load_thresholds(read_document(thresholds_path, "thresholds"))
    elif doc.get("thresholds"):
        cuts = doc["thresholds"]["cuts"]
        thresholds = Thresholds(
            table,
            tuple(float(cuts[table.variables[i].code]) for i in table.feature_indices),
        )
    else:
        _fail("the report embeds no thresholds; pass --thresholds")
    if thresholds.table != table:
        _fail("thresholds use a different variable table than the report")
    result = verify_rows(rows, records, thresholds)
    if not result.ok:
        for line in result.mismatches:
            click.echo(f"mismatch: {line}", err=True)
        sys.exit(EXIT_MISMATCH)
    click.echo(f"verification ok ({result.checked} rows)")


@main.command("report")
@click.argument("report_json", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path), default=None, help="Write here instead of stdout.")
@_guarded
def cmd_report(report_json: Path, out_path: Path | None) -> None:
    """Re-render a report document as Markdown."""
    text = report_markdown(read_document(report_json, "report"))
    if out_path is None:
        click.echo(text, nl=False)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
        click.echo(f"wrote {out_path}")


@main.command("serve")
@click.option("--patterns", "patterns_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--records", "records_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--variables", "variables_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--thresholds", "thresholds_path", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None)
@click.option("--order", "order_kind", type=click.Choice([DEGLEX, DEGREVLEX, LEX]), default=DEGLEX)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8765, show_default=True, type=int)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False, path_type=Path), default=None, help="Directory with built UI assets (default: ./frontend/dist when present).")
@_guarded
def cmd_serve(
    patterns_path: Path | None,
    records_path: Path | None,
    variables_path: Path | None,
    thresholds_path: Path | None,
    order_kind: str,
    host: str,
    port: int,
    ui_dir: Path | None,
) -> None:
    """Host the interactive review session over HTTP."""
    import uvicorn

    from .service import create_app

    patterns, records, thresholds = _resolve_input(
        patterns_path, records_path, variables_path, thresholds_path
    )
    order = MonomialOrder.default(patterns.table, order_kind)
    state = start_session(patterns, order)
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    if ui_dir is None:
        click.echo("no UI assets found; serving the API only")
    app = create_app(state, records=records, thresholds=thresholds, ui_dir=ui_dir)
    click.echo(f"serving on http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except OSError as exc:
        _fail(f"cannot bind {host}:{port}: {exc}")


if __name__ == "__main__":
    main()
