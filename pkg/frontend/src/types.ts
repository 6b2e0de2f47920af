// Wire types mirroring the chainsight service's JSON exactly.

export interface ShellRecord {
  text: string;
  source: string;
  metadata: Record<string, unknown>;
}

export interface InvocationRecord {
  tool: string;
  arguments: Record<string, unknown>;
  result: ShellRecord[];
  error: string | null;
}

export interface TurnRecord {
  user_message: string;
  triage: "from-memory" | "augment";
  invocations: InvocationRecord[];
  response: string;
  references: string[];
  prompts: Record<string, Array<{ role: string; content: string }>>;
}

/** One server-sent event as (name, payload). */
export interface EventRecord {
  event: string;
  data: Record<string, unknown>;
}

export interface StoredReplay {
  messages: Array<{ text: string; events: EventRecord[] }>;
}

export interface PortfolioPosition {
  security_name: string;
  ticker: string;
  weight: number;
}
