/**
 * Typed client for the lodana review service.
 *
 * One session per server process; every mutation must echo the sequence
 * number from the latest state summary. The client does no algebra and no
 * caching: every view is rebuilt from fresh GETs.
 */

export interface StateSummary {
    session: string;
    sequence: number;
    cycle: number;
    status: "awaiting-insight-decisions" | "awaiting-exception-decisions" | "terminated";
    observed_patterns: number;
    active_patterns: number;
    record_count: number;
    active_records: number;
    class_positive: number;
    empty_ideal_generators: number;
    insight_ideal_generators: number;
    insight_candidates: number;
    exception_candidates: number;
    version: string;
}

export interface RuleView {
    polarity: "positive" | "negative";
    criterion: string;
    factored: string;
    factors: string[];
    support: number;
    agree: number;
    class_positive: number;
    exceptions: string[];
}

export interface InsightCandidateView {
    id: string;
    source: string;
    remainder: string;
    variable_count: number;
    best_support: number;
    rules: RuleView[];
}

export interface ExceptionCandidateView {
    id: string;
    multiplicity: number;
    record_ids: string[];
    remainder: string;
    remainder_monomials: number;
}

export interface PatternDetail {
    key: string;
    assignments: Record<string, number>;
    class_bit: number;
    multiplicity: number;
    record_ids: string[];
    active: boolean;
    values: Record<string, Record<string, number>> | null;
}

export type DecisionKind = "insights" | "exceptions";

export interface DecisionRequest {
    kind: DecisionKind;
    ids: string[];
    sequence: number;
}

/** 409: phase mismatch or stale sequence. The view must refetch, not retry. */
export class ConflictError extends Error {
    constructor(detail: string) {
        super(detail);
        this.name = "ConflictError";
    }
}

/** 422: the decision referenced an unknown candidate id. */
export class RejectedError extends Error {
    constructor(detail: string) {
        super(detail);
        this.name = "RejectedError";
    }
}

async function detailOf(res: Response): Promise<string> {
    try {
        const body = (await res.json()) as { detail?: string };
        return body.detail ?? res.statusText;
    } catch {
        return res.statusText;
    }
}

export class ApiClient {
    constructor(
        private readonly baseUrl: string = "",
        private readonly fetchFn: typeof fetch = fetch,
    ) {}

    private async get(path: string): Promise<Response> {
        const res = await this.fetchFn(this.baseUrl + path);
        if (res.status === 409) throw new ConflictError(await detailOf(res));
        if (!res.ok) throw new Error(`GET ${path}: ${res.status} ${await detailOf(res)}`);
        return res;
    }

    async health(): Promise<{ status: string; session: string; version: string }> {
        return (await this.get("/health")).json();
    }

    async state(): Promise<StateSummary> {
        return (await this.get("/state")).json();
    }

    async insightCandidates(): Promise<InsightCandidateView[]> {
        return (await this.get("/candidates/insights")).json();
    }

    async exceptionCandidates(): Promise<ExceptionCandidateView[]> {
        return (await this.get("/candidates/exceptions")).json();
    }

    async pattern(key: string): Promise<PatternDetail> {
        return (await this.get(`/patterns/${encodeURIComponent(key)}`)).json();
    }

    /** Raw canonical bytes, suitable for download or byte comparison. */
    async reportBytes(): Promise<Uint8Array> {
        return new Uint8Array(await (await this.get("/report")).arrayBuffer());
    }

    async traceBytes(): Promise<Uint8Array> {
        return new Uint8Array(await (await this.get("/trace")).arrayBuffer());
    }

    async decide(request: DecisionRequest): Promise<StateSummary> {
        const res = await this.fetchFn(this.baseUrl + "/decisions", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify(request),
        });
        if (res.status === 409) throw new ConflictError(await detailOf(res));
        if (res.status === 422) throw new RejectedError(await detailOf(res));
        if (!res.ok) throw new Error(`POST /decisions: ${res.status} ${await detailOf(res)}`);
        return res.json();
    }
}
