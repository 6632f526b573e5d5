/**
 * Pure HTML renderers. Every figure shown comes verbatim from an API
 * payload; nothing is recomputed client-side.
 */

import type {
    ExceptionCandidateView,
    InsightCandidateView,
    RuleView,
    StateSummary,
} from "./api.js";

export type InsightSort = "support" | "variables";

export function esc(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;");
}

/** One chip per disjoint-support factor, e.g. T | y + 1 | L + M. */
export function factorChips(factors: string[]): string {
    if (factors.length === 0) return `<span class="chip chip-unit">1</span>`;
    return factors.map((f) => `<span class="chip">${esc(f)}</span>`).join("");
}

function polarityBadge(polarity: RuleView["polarity"]): string {
    const label = polarity === "positive" ? "pos" : "neg";
    return `<span class="badge badge-${polarity}">${label}</span>`;
}

/** The "support (class-positive)" figure, exactly as reported. */
function figure(rule: RuleView): string {
    return `<span class="figure">${rule.support} (${rule.class_positive})</span>`;
}

function ruleLine(rule: RuleView): string {
    const exceptions =
        rule.exceptions.length === 0
            ? ""
            : ` <span class="exceptions">except ${rule.exceptions.map(esc).join(", ")}</span>`;
    return (
        `<div class="rule-line">${polarityBadge(rule.polarity)} ` +
        `${factorChips(rule.factors)} ${figure(rule)}${exceptions}</div>`
    );
}

export function renderStateBar(state: StateSummary): string {
    return (
        `<div class="state-bar">` +
        `cycle ${state.cycle} · ${esc(state.status)} · ` +
        `${state.active_records}/${state.record_count} records active · ` +
        `${state.class_positive} class-positive · ` +
        `${state.active_patterns}/${state.observed_patterns} patterns · ` +
        `seq ${state.sequence}` +
        `</div>`
    );
}

function sortInsights(
    candidates: InsightCandidateView[],
    sort: InsightSort,
): InsightCandidateView[] {
    const rows = [...candidates];
    if (sort === "support") {
        rows.sort((a, b) => b.best_support - a.best_support);
    } else {
        rows.sort((a, b) => a.variable_count - b.variable_count);
    }
    return rows;
}

/**
 * Insight phase: one row per candidate basis element, accept checkboxes,
 * sortable headers. An empty candidate list offers closing the phase.
 */
export function renderInsightTable(
    candidates: InsightCandidateView[],
    sort: InsightSort = "support",
): string {
    if (candidates.length === 0) {
        return (
            `<div class="empty-state">No insight candidates remain this cycle.</div>` +
            `<button id="submit-decisions" data-kind="insights">Advance to exceptions</button>`
        );
    }
    const rows = sortInsights(candidates, sort)
        .map(
            (c) => `
  <tr>
    <td><input type="checkbox" class="accept" value="${esc(c.id)}"></td>
    <td><code class="poly">${esc(c.id)}</code></td>
    <td>${c.rules.map(ruleLine).join("")}</td>
    <td class="num">${c.variable_count}</td>
    <td class="num">${c.best_support}</td>
  </tr>`,
        )
        .join("");
    return `
<table class="candidates" id="insight-table">
  <thead>
    <tr>
      <th>accept</th>
      <th>basis element</th>
      <th>rules</th>
      <th class="sortable" data-sort="variables">variables</th>
      <th class="sortable" data-sort="support">best support</th>
    </tr>
  </thead>
  <tbody>${rows}
  </tbody>
</table>
<button id="submit-decisions" data-kind="insights">Accept checked</button>`;
}

/**
 * Exception phase: one card per still-unexplained pattern. Remainders of
 * at most two monomials get flagged as excision candidates.
 */
export function renderExceptionList(candidates: ExceptionCandidateView[]): string {
    if (candidates.length === 0) {
        return (
            `<div class="empty-state">No exception candidates.</div>` +
            `<button id="submit-decisions" data-kind="exceptions">Terminate session</button>`
        );
    }
    const cards = candidates
        .map((c) => {
            const small = c.remainder_monomials <= 2;
            return `
<div class="card${small ? " small-remainder" : ""}" data-pattern="${esc(c.id)}">
  <label><input type="checkbox" class="accept" value="${esc(c.id)}"> excise</label>
  <span class="pattern-key"><code>${esc(c.id)}</code></span>
  <span class="multiplicity">× ${c.multiplicity}</span>
  <div class="record-ids">records: ${c.record_ids.map(esc).join(", ")}</div>
  <div class="remainder">remainder <code class="poly">${esc(c.remainder)}</code>
    <span class="monomial-count${small ? " flagged" : ""}">${c.remainder_monomials} monomial${
        c.remainder_monomials === 1 ? "" : "s"
    }</span>
  </div>
</div>`;
        })
        .join("");
    return `${cards}
<button id="submit-decisions" data-kind="exceptions">Excise checked</button>`;
}

interface RuleRow {
    polarity: string;
    criterion: string;
    factored: string;
    support: number;
    agree: number;
    class_positive: number;
    exceptions: string[];
    cycle?: number | null;
    parent?: string;
}

interface ReportDoc {
    records: { total: number; class_positive: number };
    patterns: { observed: number; unobserved_exponent: number };
    rules: RuleRow[];
    generalizations: RuleRow[];
    excised_record_ids: string[];
}

function ruleRowHtml(row: RuleRow, withParent: boolean): string {
    const badge = polarityBadge(row.polarity as RuleView["polarity"]);
    const exceptions =
        row.exceptions.length === 0
            ? "none"
            : `<details><summary>${row.exceptions.length}</summary>${row.exceptions
                  .map(esc)
                  .join(", ")}</details>`;
    const parentCell = withParent ? `<td><code class="poly">${esc(row.parent ?? "")}</code></td>` : "";
    return (
        `<tr><td>${badge}</td>` +
        `<td><code class="poly">${esc(row.factored)}</code></td>` +
        `<td class="num">${row.support} (${row.class_positive})</td>` +
        `<td>${exceptions}</td>${parentCell}</tr>`
    );
}

function rulesTable(rows: RuleRow[], withParent: boolean): string {
    if (rows.length === 0) return `<div class="empty-state">No rules.</div>`;
    const parentHead = withParent ? "<th>from</th>" : "";
    return (
        `<table class="report"><thead><tr><th>polarity</th><th>criterion</th>` +
        `<th>support (class-positive)</th><th>exceptions</th>${parentHead}</tr></thead><tbody>` +
        rows.map((r) => ruleRowHtml(r, withParent)).join("") +
        `</tbody></table>`
    );
}

/** Terminated session: final rules, generalizations, download buttons. */
export function renderReport(doc: ReportDoc): string {
    const excised =
        doc.excised_record_ids.length === 0
            ? ""
            : `<p class="excised">excised records: ${doc.excised_record_ids.map(esc).join(", ")}</p>`;
    return `
<div class="report-stats">${doc.records.total} records (${doc.records.class_positive} class-positive),
${doc.patterns.observed} observed patterns, 2^${doc.patterns.unobserved_exponent} empty criteria.</div>
<h2>Rules</h2>
${rulesTable(doc.rules, false)}
<h2>Generalizations</h2>
${rulesTable(doc.generalizations, true)}
${excised}
<button id="download-report">Download report</button>
<button id="download-trace">Download trace</button>`;
}

/** Shown when the report view is opened before termination. */
export function renderProgress(state: StateSummary): string {
    return (
        `<div class="empty-state">Session still in progress: ${esc(state.status)}, ` +
        `cycle ${state.cycle}.</div>`
    );
}

export function renderConflictNotice(detail: string): string {
    return `<div class="notice">Out of date (${esc(detail)}); view reloaded, nothing submitted.</div>`;
}
