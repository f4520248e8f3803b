"""Append-only newline-delimited JSON event log.

The log is the only persistence: service state is rebuilt by replaying it.
Appends are serialized through one lock and flushed per event, so a reader
sees either a complete line or nothing.  A truncated final line (crash while
writing) is tolerated on replay; corruption anywhere else raises.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

__all__ = ["EventStore", "CorruptLogError"]


class CorruptLogError(RuntimeError):
    """A non-final log line failed to parse."""


class EventStore:
    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._fh = self.path.open("a", encoding="utf-8")

    def append(self, event: dict) -> None:
        line = json.dumps(event, separators=(",", ":"))
        with self._lock:
            self._fh.write(line + "\n")
            self._fh.flush()

    def replay(self) -> list[dict]:
        if not self.path.exists():
            return []
        events: list[dict] = []
        raw_lines = self.path.read_text(encoding="utf-8").splitlines()
        last_index = len(raw_lines) - 1
        for i, line in enumerate(raw_lines):
            if not line.strip():
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError:
                if i == last_index:
                    break  # interrupted final append; everything before it is intact
                raise CorruptLogError(f"{self.path}: undecodable event at line {i + 1}")
        return events

    def close(self) -> None:
        with self._lock:
            if not self._fh.closed:
                self._fh.close()

    def __enter__(self) -> "EventStore":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
