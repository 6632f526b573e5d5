/**
 * Session flow: fetch the phase, build the matching view, submit decisions
 * with the sequence observed at render time. Conflicts never retry; they
 * reload. The controller holds no state the API does not also hold.
 */

import {
    ApiClient,
    ConflictError,
    type DecisionKind,
    type ExceptionCandidateView,
    type InsightCandidateView,
    type StateSummary,
} from "./api.js";

export type View =
    | { kind: "insights"; state: StateSummary; candidates: InsightCandidateView[] }
    | { kind: "exceptions"; state: StateSummary; candidates: ExceptionCandidateView[] }
    | { kind: "report"; state: StateSummary; report: Uint8Array };

export type SubmitResult =
    | { outcome: "applied"; state: StateSummary }
    | { outcome: "conflict"; detail: string }
    | { outcome: "rejected"; detail: string };

export class SessionController {
    private sequence = 0;

    constructor(private readonly api: ApiClient) {}

    /** Rebuild the whole view from the server; safe to call at any time. */
    async load(): Promise<View> {
        const state = await this.api.state();
        this.sequence = state.sequence;
        if (state.status === "awaiting-insight-decisions") {
            return { kind: "insights", state, candidates: await this.api.insightCandidates() };
        }
        if (state.status === "awaiting-exception-decisions") {
            return { kind: "exceptions", state, candidates: await this.api.exceptionCandidates() };
        }
        return { kind: "report", state, report: await this.api.reportBytes() };
    }

    /**
     * Post the checked ids for the current phase. A stale sequence or a
     * phase change comes back as "conflict" and the caller must re-load;
     * the submission is known not to have been applied.
     */
    async submit(kind: DecisionKind, ids: string[]): Promise<SubmitResult> {
        try {
            const state = await this.api.decide({ kind, ids, sequence: this.sequence });
            this.sequence = state.sequence;
            return { outcome: "applied", state };
        } catch (err) {
            if (err instanceof ConflictError) {
                return { outcome: "conflict", detail: err.message };
            }
            if (err instanceof Error && err.name === "RejectedError") {
                return { outcome: "rejected", detail: err.message };
            }
            throw err;
        }
    }

    async trace(): Promise<Uint8Array> {
        return this.api.traceBytes();
    }

    /** Accept everything offered, phase by phase, until the run terminates. */
    async runToTermination(): Promise<StateSummary> {
        for (;;) {
            const view = await this.load();
            if (view.kind === "report") return view.state;
            const ids =
                view.kind === "insights" ? view.candidates.map((c) => c.id) : [];
            const result = await this.submit(view.kind, ids);
            if (result.outcome === "rejected") {
                throw new Error(`decision rejected: ${result.detail}`);
            }
            // conflict: loop re-loads and tries again from fresh state
        }
    }
}
