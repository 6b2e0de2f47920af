// Pure rendering: an event stream in, a view model and HTML string out.
// Nothing in here touches the network or mutates shared state, so replaying
// a stored event log always produces the same DOM.

import type { EventRecord, PortfolioPosition, ShellRecord, TurnRecord } from "./types.js";

export interface ShellPreview {
  label: string;
  snippet: string;
  text: string;
  page: string | null;
}

export interface TraceEntry {
  kind: "call" | "result" | "unrenderable";
  headline: string;
  detail: string | null;
  shells: ShellPreview[];
}

export interface TurnView {
  user: string;
  triage: "from-memory" | "augment" | null;
  trace: TraceEntry[];
  answer: string;
  references: string[];
  record: TurnRecord | null;
}

const SNIPPET_LENGTH = 180;

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function shellPreview(shell: ShellRecord): ShellPreview {
  const label = typeof shell.metadata["label"] === "string"
    ? (shell.metadata["label"] as string)
    : shell.source;
  const page = shell.metadata["page"];
  const text = shell.text;
  const snippet = text.length > SNIPPET_LENGTH ? text.slice(0, SNIPPET_LENGTH) + "…" : text;
  return {
    label,
    snippet,
    text,
    page: page === undefined || page === null ? null : String(page),
  };
}

/** "pages 3, 4 and 1" / "page 3": the console-log phrasing. */
export function formatPages(pages: string[]): string {
  if (pages.length === 1) return `page ${pages[0]}`;
  const head = pages.slice(0, -1).join(", ");
  return `pages ${head} and ${pages[pages.length - 1]}`;
}

/** Headline for a tool_result entry, in the console-log style. */
export function formatRetrieved(shells: ShellPreview[]): string {
  if (shells.length === 0) return "Retrieved: nothing";
  const labels = [...new Set(shells.map((s) => s.label))];
  const pages = shells.map((s) => s.page);
  if (labels.length === 1 && pages.every((p) => p !== null)) {
    return `Retrieved: ${labels[0]}, ${formatPages(pages as string[])}`;
  }
  if (labels.length === 1) {
    return `Retrieved: ${labels[0]} (${shells.length} item${shells.length === 1 ? "" : "s"})`;
  }
  return `Retrieved: ${labels.join("; ")}`;
}

function unrenderable(event: EventRecord): TraceEntry {
  return {
    kind: "unrenderable",
    headline: "unrenderable event",
    detail: JSON.stringify(event),
    shells: [],
  };
}

/**
 * Fold one turn's event stream into a view model. Trace entries keep the
 * event order; anything malformed becomes a visible placeholder instead of
 * being dropped.
 */
export function renderTurn(userText: string, events: EventRecord[]): TurnView {
  const view: TurnView = {
    user: userText,
    triage: null,
    trace: [],
    answer: "",
    references: [],
    record: null,
  };
  for (const event of events) {
    if (!isObject(event.data) || typeof event.event !== "string") {
      view.trace.push(unrenderable(event));
      continue;
    }
    const data = event.data;
    switch (event.event) {
      case "triage": {
        const decision = data["decision"];
        if (decision === "from-memory" || decision === "augment") {
          view.triage = decision;
        } else {
          view.trace.push(unrenderable(event));
        }
        break;
      }
      case "tool_call": {
        if (typeof data["tool"] !== "string" || !isObject(data["arguments"])) {
          view.trace.push(unrenderable(event));
          break;
        }
        view.trace.push({
          kind: "call",
          headline: `Tool called: ${data["tool"]}`,
          detail: JSON.stringify(data["arguments"]),
          shells: [],
        });
        break;
      }
      case "tool_result": {
        const shells = data["shells"];
        if (!Array.isArray(shells)) {
          view.trace.push(unrenderable(event));
          break;
        }
        const previews = (shells as ShellRecord[]).map(shellPreview);
        view.trace.push({
          kind: "result",
          headline: formatRetrieved(previews),
          detail: typeof data["error"] === "string" ? `error: ${data["error"]}` : null,
          shells: previews,
        });
        break;
      }
      case "answer": {
        if (typeof data["text"] === "string") view.answer = data["text"];
        else view.trace.push(unrenderable(event));
        break;
      }
      case "references": {
        const refs = data["references"];
        if (Array.isArray(refs) && refs.every((r) => typeof r === "string")) {
          view.references = refs as string[];
        } else {
          view.trace.push(unrenderable(event));
        }
        break;
      }
      case "turn": {
        view.record = data as unknown as TurnRecord;
        break;
      }
      default:
        view.trace.push(unrenderable(event));
    }
  }
  return view;
}

// --- HTML ------------------------------------------------------------------

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function traceEntryHtml(entry: TraceEntry): string {
  if (entry.kind === "unrenderable") {
    return `<div class="trace-entry unrenderable">⚠ ${escapeHtml(entry.headline)}: <code>${escapeHtml(entry.detail ?? "")}</code></div>`;
  }
  const parts = [`<div class="headline">${escapeHtml(entry.headline)}</div>`];
  if (entry.detail) {
    parts.push(`<pre class="args">${escapeHtml(entry.detail)}</pre>`);
  }
  if (entry.shells.length > 0) {
    const cards = entry.shells
      .map(
        (shell) =>
          `<li class="shell-preview">` +
          `<span class="shell-label">${escapeHtml(shell.label)}</span>` +
          (shell.page !== null
            ? ` <span class="shell-page">page ${escapeHtml(shell.page)}</span>`
            : "") +
          `<blockquote>${escapeHtml(shell.snippet)}</blockquote></li>`,
      )
      .join("");
    parts.push(`<ul class="shells">${cards}</ul>`);
  }
  return `<div class="trace-entry trace-${entry.kind}">${parts.join("")}</div>`;
}

export function turnHtml(view: TurnView): string {
  const pieces = [`<div class="bubble user">${escapeHtml(view.user)}</div>`];
  const badge = view.triage
    ? `<span class="badge triage-${view.triage}">${view.triage}</span>`
    : "";
  const trace =
    view.trace.length > 0
      ? `<details class="trace" open><summary>Console (log)</summary>` +
        view.trace.map(traceEntryHtml).join("") +
        `</details>`
      : "";
  const chips =
    view.references.length > 0
      ? `<div class="refs">Reference: ` +
        view.references
          .map(
            (ref) =>
              `<button class="ref-chip" data-ref="${escapeHtml(ref)}">${escapeHtml(ref)}</button>`,
          )
          .join(" ") +
        `</div>`
      : "";
  pieces.push(
    `<div class="turn-body">${badge}${trace}` +
      `<div class="bubble system">${escapeHtml(view.answer)}</div>${chips}</div>`,
  );
  return `<article class="turn">${pieces.join("")}</article>`;
}

export function transcriptHtml(views: TurnView[]): string {
  return `<section class="transcript">${views.map(turnHtml).join("")}</section>`;
}

export function portfolioPanelHtml(positions: PortfolioPosition[]): string {
  const rows = positions
    .map(
      (p) =>
        `<li>${escapeHtml(p.security_name)} (${escapeHtml(p.ticker)}): ${p.weight}%</li>`,
    )
    .join("");
  return (
    `<aside class="portfolio"><h2>Portfolio: ${positions.length} positions</h2>` +
    `<details><summary>constituents</summary><ul>${rows}</ul></details></aside>`
  );
}

/** Shells a reference chip should open: exact label matches first, falling
 * back to verbatim graph paths (the reference text always points at
 * retrieved material from the session). */
export function shellsForReference(views: TurnView[], ref: string): ShellPreview[] {
  const all = views.flatMap((view) =>
    view.record ? view.record.invocations.flatMap((inv) => inv.result) : [],
  );
  const previews = all.map(shellPreview);
  const exact = previews.filter((shell) => shell.label === ref);
  if (exact.length > 0) return exact;
  return all
    .filter((shell) => shell.source === "graph-path")
    .map(shellPreview);
}
