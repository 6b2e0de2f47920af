// Browser wiring: portfolio upload, session lifecycle, message box, and the
// inspector panel behind reference chips. All rendering goes through the
// pure functions in render.ts; the only state that reaches the agent loop
// is the uploaded portfolio and the message text.

import { ChainsightClient } from "./client.js";
import {
  TurnView,
  escapeHtml,
  portfolioPanelHtml,
  renderTurn,
  shellsForReference,
  transcriptHtml,
} from "./render.js";
import type { PortfolioPosition } from "./types.js";

interface AppState {
  client: ChainsightClient;
  sessionId: string | null;
  positions: PortfolioPosition[];
  views: TurnView[];
  banner: string | null;
  busy: boolean;
}

const state: AppState = {
  client: new ChainsightClient(localStorage.getItem("chainsight-url") ?? ""),
  sessionId: null,
  positions: [],
  views: [],
  banner: null,
  busy: false,
};

function root(): HTMLElement {
  const el = document.getElementById("app");
  if (!el) throw new Error("missing #app container");
  return el;
}

function render(): void {
  const banner = state.banner
    ? `<div class="banner error">${escapeHtml(state.banner)} ` +
      `<button id="retry">retry</button></div>`
    : "";
  const connect = state.sessionId
    ? `<div class="session-header">session ${escapeHtml(state.sessionId)}, ` +
      `${state.positions.length} positions</div>`
    : `<div class="connect"><label>portfolio JSON ` +
      `<input type="file" id="portfolio-file" accept=".json"></label></div>`;
  const composer = state.sessionId
    ? `<form id="composer"><input id="message" autocomplete="off" ` +
      `placeholder="Ask about portfolio risk…" ${state.busy ? "disabled" : ""}>` +
      `<button ${state.busy ? "disabled" : ""}>send</button></form>`
    : "";
  root().innerHTML =
    banner +
    connect +
    (state.positions.length ? portfolioPanelHtml(state.positions) : "") +
    transcriptHtml(state.views) +
    composer +
    `<aside id="inspector" class="inspector" hidden></aside>`;
  wire();
}

function wire(): void {
  document.getElementById("retry")?.addEventListener("click", () => {
    state.banner = null;
    void connect(state.positions);
  });
  document
    .getElementById("portfolio-file")
    ?.addEventListener("change", async (event) => {
      const input = event.target as HTMLInputElement;
      const file = input.files?.[0];
      if (!file) return;
      const parsed = JSON.parse(await file.text()) as
        | { positions: PortfolioPosition[] }
        | PortfolioPosition[];
      const positions = Array.isArray(parsed) ? parsed : parsed.positions;
      await connect(positions);
    });
  document.getElementById("composer")?.addEventListener("submit", (event) => {
    event.preventDefault();
    const input = document.getElementById("message") as HTMLInputElement | null;
    const text = input?.value.trim();
    if (text) void send(text);
  });
  for (const chip of Array.from(document.querySelectorAll(".ref-chip"))) {
    chip.addEventListener("click", () => {
      const ref = chip.getAttribute("data-ref") ?? "";
      openInspector(ref);
    });
  }
}

function openInspector(ref: string): void {
  const panel = document.getElementById("inspector");
  if (!panel) return;
  const shells = shellsForReference(state.views, ref);
  const body = shells.length
    ? shells
        .map(
          (shell) =>
            `<section class="inspect-shell"><h3>${escapeHtml(shell.label)}</h3>` +
            `<pre>${escapeHtml(shell.text)}</pre></section>`,
        )
        .join("")
    : `<p>no stored shells for this reference</p>`;
  panel.innerHTML = `<h2>${escapeHtml(ref)}</h2>${body}<button id="close-inspector">close</button>`;
  panel.hidden = false;
  document
    .getElementById("close-inspector")
    ?.addEventListener("click", () => (panel.hidden = true));
}

async function connect(positions: PortfolioPosition[]): Promise<void> {
  state.positions = positions;
  try {
    state.sessionId = await state.client.createSession(positions);
    state.banner = null;
  } catch (error) {
    state.banner = `connection failed: ${String(error)}`;
  }
  render();
}

async function send(text: string): Promise<void> {
  if (!state.sessionId) return;
  state.busy = true;
  render();
  try {
    const events = await state.client.sendMessage(state.sessionId, text);
    state.views = [...state.views, renderTurn(text, events)];
    state.banner = null;
  } catch (error) {
    state.banner = `message failed: ${String(error)}`;
  }
  state.busy = false;
  render();
}

render();
