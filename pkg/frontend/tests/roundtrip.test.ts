/**
 * Live round trip against the real Python service: drive a session entirely
 * through the UI code paths, then prove the exported trace replays via the
 * CLI to a byte-identical report.
 *
 * Requires the lodana package to be installed (pip install -e .).
 */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtemp, readFile, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { promisify } from "node:util";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import { renderExceptionList, renderInsightTable } from "../src/render.js";

const execFileAsync = promisify(execFile);

const PYTHON = process.env.LODANA_PYTHON ?? "python3";
const FIXTURE = fileURLToPath(new URL("./fixtures/planted_patterns.json", import.meta.url));
const PORT = 21000 + (process.pid % 2000);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let serverLog = "";

async function waitForHealth(): Promise<void> {
    for (let attempt = 0; attempt < 80; attempt++) {
        try {
            const res = await fetch(`${BASE}/health`);
            if (res.ok) return;
        } catch {
            // not up yet
        }
        await new Promise((resolve) => setTimeout(resolve, 250));
    }
    throw new Error(`server never became healthy on ${BASE}\n${serverLog}`);
}

beforeAll(async () => {
    server = spawn(
        PYTHON,
        ["-m", "lodana.cli", "serve", "--patterns", FIXTURE, "--port", String(PORT)],
        { stdio: ["ignore", "pipe", "pipe"] },
    );
    server.stdout?.on("data", (chunk) => (serverLog += chunk));
    server.stderr?.on("data", (chunk) => (serverLog += chunk));
    await waitForHealth();
}, 40000);

afterAll(() => {
    server?.kill("SIGTERM");
});

describe("review UI round trip", () => {
    it("drives the session to termination and replays byte-identically", async () => {
        const api = new ApiClient(BASE);
        const controller = new SessionController(api);

        // Insight phase: the rendered table must echo the payload verbatim.
        const first = await controller.load();
        expect(first.kind).toBe("insights");
        if (first.kind !== "insights") return;
        expect(first.candidates.length).toBeGreaterThan(0);
        const insightHtml = renderInsightTable(first.candidates);
        for (const candidate of first.candidates) {
            expect(insightHtml).toContain(candidate.id);
            expect(insightHtml).toContain(`>${candidate.best_support}</td>`);
            for (const rule of candidate.rules) {
                expect(insightHtml).toContain(`${rule.support} (${rule.class_positive})`);
            }
        }

        // Accept every candidate through the same submit path the UI uses.
        const applied = await controller.submit(
            "insights",
            first.candidates.map((c) => c.id),
        );
        expect(applied.outcome).toBe("applied");

        // Walk the remaining phases, checking the exception view once.
        let sawExceptions = false;
        for (;;) {
            const view = await controller.load();
            if (view.kind === "report") break;
            if (view.kind === "exceptions" && !sawExceptions) {
                sawExceptions = true;
                const html = renderExceptionList(view.candidates);
                for (const candidate of view.candidates) {
                    expect(html).toContain(candidate.id);
                    expect(html).toContain(`× ${candidate.multiplicity}`);
                    for (const rid of candidate.record_ids) {
                        expect(html).toContain(rid);
                    }
                }
            }
            const ids = view.kind === "insights" ? view.candidates.map((c) => c.id) : [];
            const result = await controller.submit(view.kind, ids);
            expect(result.outcome).toBe("applied");
        }

        const state = await api.state();
        expect(state.status).toBe("terminated");

        // Export both documents through the API.
        const serviceReport = Buffer.from(await api.reportBytes());
        const serviceTrace = Buffer.from(await controller.trace());

        // Replay the exported trace with the CLI; bytes must match.
        const dir = await mkdtemp(join(tmpdir(), "lodana-ui-"));
        const tracePath = join(dir, "trace.json");
        await writeFile(tracePath, serviceTrace);
        await execFileAsync(PYTHON, [
            "-m",
            "lodana.cli",
            "analyze",
            "--patterns",
            FIXTURE,
            "--trace",
            tracePath,
            "--out",
            join(dir, "out"),
        ]);
        const cliReport = await readFile(join(dir, "out", "report.json"));
        expect(serviceReport.equals(cliReport)).toBe(true);

        // Every decision the UI submitted appears verbatim in the trace.
        const trace = JSON.parse(serviceTrace.toString());
        expect(trace.status).toBe("terminated");
        const firstRound = trace.cycles[0].insight_rounds[0];
        expect(firstRound).toEqual(first.candidates.map((c) => c.id));
    }, 60000);

    it("answers a stale submission with a conflict and applies nothing", async () => {
        const api = new ApiClient(BASE);
        const before = await api.state();
        const controller = new SessionController(api);
        await controller.load();
        // Session is terminated; any decision is refused either way, and the
        // state must not move.
        const result = await controller.submit("insights", []);
        expect(result.outcome).toBe("conflict");
        expect(await api.state()).toEqual(before);
    });
});
