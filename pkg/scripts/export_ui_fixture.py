#!/usr/bin/env python3
"""Export the canonical three-turn replay event log for the chat UI.

Runs the scripted coltan dialogue against the shipped stores and captures
the per-message event stream exactly as the HTTP service emits it. The
result is the frontend's replay fixture.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from chainsight.agents import MockBackend, Portfolio, Session, run_turn  # noqa: E402
from chainsight.config import build_stores, load_config  # noqa: E402

MESSAGES = [
    "I read about problems in the DRC with coltan.",
    "What has been in the news on this?",
    "Can you walk me through the various ways this could hurt Apple?",
]


def main() -> None:
    config = load_config(ROOT / "data" / "config.json")
    stores = build_stores(config)
    backend = MockBackend.from_file((ROOT / "data" / "scenario_coltan.jsonl").read_text())
    portfolio = Portfolio.from_json((ROOT / "data" / "portfolio_top50.json").read_text())
    session = Session(portfolio=portfolio)

    messages = []
    for text in MESSAGES:
        events: list[dict] = []
        run_turn(
            session, text, backend, stores,
            on_event=lambda name, payload: events.append(
                {"event": name, "data": payload}
            ),
        )
        messages.append({"text": text, "events": events})

    out = ROOT / "frontend" / "fixtures" / "coltan_replay_events.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps({"messages": messages}, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({sum(len(m['events']) for m in messages)} events)")


if __name__ == "__main__":
    main()
