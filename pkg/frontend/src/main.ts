/**
 * Browser entry: wires the pure renderers to the DOM. All state lives on
 * the server; every mutation round-trips through the controller.
 */

import { ApiClient, type DecisionKind } from "./api.js";
import { SessionController, type View } from "./controller.js";
import {
    renderConflictNotice,
    renderExceptionList,
    renderInsightTable,
    renderProgress,
    renderReport,
    renderStateBar,
    type InsightSort,
} from "./render.js";

const api = new ApiClient("");
const controller = new SessionController(api);

let currentView: View | null = null;
let insightSort: InsightSort = "support";
let notice = "";

function el(id: string): HTMLElement {
    const found = document.getElementById(id);
    if (!found) throw new Error(`missing element #${id}`);
    return found;
}

function viewBody(view: View): string {
    if (view.kind === "insights") return renderInsightTable(view.candidates, insightSort);
    if (view.kind === "exceptions") return renderExceptionList(view.candidates);
    if (view.state.status !== "terminated") return renderProgress(view.state);
    return renderReport(JSON.parse(new TextDecoder().decode(view.report)));
}

function paint(): void {
    if (!currentView) return;
    el("state").innerHTML = renderStateBar(currentView.state);
    el("view").innerHTML = notice + viewBody(currentView);
    notice = "";
}

async function reload(): Promise<void> {
    currentView = await controller.load();
    paint();
}

function checkedIds(): string[] {
    return Array.from(
        document.querySelectorAll<HTMLInputElement>("input.accept:checked"),
        (box) => box.value,
    );
}

function download(name: string, bytes: Uint8Array): void {
    // Copy to a plain ArrayBuffer-backed view so Blob accepts it.
    const url = URL.createObjectURL(new Blob([new Uint8Array(bytes)], { type: "application/json" }));
    const link = document.createElement("a");
    link.href = url;
    link.download = name;
    link.click();
    URL.revokeObjectURL(url);
}

async function onSubmit(kind: DecisionKind): Promise<void> {
    const result = await controller.submit(kind, checkedIds());
    if (result.outcome === "conflict") {
        notice = renderConflictNotice(result.detail);
    } else if (result.outcome === "rejected") {
        notice = renderConflictNotice(result.detail);
    }
    await reload();
}

document.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.id === "submit-decisions") {
        const kind = target.dataset.kind as DecisionKind;
        void onSubmit(kind);
    } else if (target.classList.contains("sortable")) {
        insightSort = target.dataset.sort as InsightSort;
        paint();
    } else if (target.id === "download-report" && currentView?.kind === "report") {
        download("report.json", currentView.report);
    } else if (target.id === "download-trace") {
        void controller.trace().then((bytes) => download("trace.json", bytes));
    }
});

void reload();
