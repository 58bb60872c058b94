"""Append-only session event log, one JSON object per line."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

# Event kinds, in pipeline order.
GAZE_SAMPLE = "gaze_sample"
FIXATION = "fixation"
INTENT = "intent"
PARSE = "parse"
FEEDBACK = "feedback"
SAFETY = "safety"
STATE_CHANGE = "state_change"


@dataclass(frozen=True)
class SessionEvent:
    t: float
    seq: int
    kind: str
    payload: dict

    def to_dict(self) -> dict:
        return {"t": self.t, "seq": self.seq, "kind": self.kind, "payload": self.payload}


def event_line(event: SessionEvent) -> str:
    return json.dumps(event.to_dict(), separators=(",", ":"))


class EventLog:
    """Strictly ordered (t, seq) event sink; events are never rewritten."""

    def __init__(self):
        self.events: list[SessionEvent] = []
        self._seq = 0

    def append(self, t: float, kind: str, payload: dict) -> SessionEvent:
        event = SessionEvent(t, self._seq, kind, payload)
        self._seq += 1
        self.events.append(event)
        return event

    def since(self, seq: int) -> list[SessionEvent]:
        return [e for e in self.events if e.seq >= seq]

    def write(self, path: str | Path):
        with open(path, "w", encoding="utf-8") as f:
            for event in self.events:
                f.write(event_line(event))
                f.write("\n")

    def dumps(self) -> str:
        return "".join(event_line(e) + "\n" for e in self.events)
