// Service client: session creation plus the per-message SSE stream.

import type { EventRecord, PortfolioPosition, TurnRecord } from "./types.js";

/**
 * Incremental server-sent-event parser. Feed it raw body chunks; it emits
 * complete events and buffers partial ones until the next push.
 */
export class SSEParser {
  private buffer = "";

  push(chunk: string): EventRecord[] {
    this.buffer += chunk;
    const events: EventRecord[] = [];
    let boundary = this.buffer.indexOf("\n\n");
    while (boundary >= 0) {
      const block = this.buffer.slice(0, boundary);
      this.buffer = this.buffer.slice(boundary + 2);
      const parsed = this.parseBlock(block);
      if (parsed) events.push(parsed);
      boundary = this.buffer.indexOf("\n\n");
    }
    return events;
  }

  end(): EventRecord[] {
    const rest = this.buffer.trim();
    this.buffer = "";
    if (!rest) return [];
    const parsed = this.parseBlock(rest);
    return parsed ? [parsed] : [];
  }

  private parseBlock(block: string): EventRecord | null {
    let name = "message";
    const dataLines: string[] = [];
    for (const line of block.split("\n")) {
      if (line.startsWith("event: ")) name = line.slice(7).trim();
      else if (line.startsWith("data: ")) dataLines.push(line.slice(6));
      else if (line.startsWith("data:")) dataLines.push(line.slice(5));
    }
    if (dataLines.length === 0) return null;
    try {
      return { event: name, data: JSON.parse(dataLines.join("\n")) };
    } catch {
      // keep malformed payloads visible downstream instead of dropping them
      return { event: name, data: { unparsed: dataLines.join("\n") } };
    }
  }
}

export class ChainsightClient {
  constructor(private readonly baseUrl: string) {}

  private url(path: string): string {
    return this.baseUrl.replace(/\/$/, "") + path;
  }

  async createSession(positions: PortfolioPosition[]): Promise<string> {
    const response = await fetch(this.url("/sessions"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ positions }),
    });
    if (!response.ok) {
      throw new Error(`session creation failed: HTTP ${response.status}`);
    }
    const body = (await response.json()) as { session_id: string };
    return body.session_id;
  }

  /** POST a message and stream its events; resolves with the full list. */
  async sendMessage(
    sessionId: string,
    text: string,
    onEvent?: (event: EventRecord) => void,
  ): Promise<EventRecord[]> {
    const response = await fetch(this.url(`/sessions/${sessionId}/messages`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    if (!response.ok || !response.body) {
      throw new Error(`message failed: HTTP ${response.status}`);
    }
    const parser = new SSEParser();
    const events: EventRecord[] = [];
    const reader = response.body.getReader();
    const decoder = new TextDecoder();
    for (;;) {
      const { done, value } = await reader.read();
      const chunk = value ? decoder.decode(value, { stream: !done }) : "";
      for (const event of parser.push(chunk)) {
        events.push(event);
        onEvent?.(event);
      }
      if (done) break;
    }
    for (const event of parser.end()) {
      events.push(event);
      onEvent?.(event);
    }
    return events;
  }

  async getTranscript(
    sessionId: string,
  ): Promise<{ session_id: string; turns: TurnRecord[] }> {
    const response = await fetch(this.url(`/sessions/${sessionId}`));
    if (!response.ok) throw new Error(`transcript failed: HTTP ${response.status}`);
    return (await response.json()) as { session_id: string; turns: TurnRecord[] };
  }
}
