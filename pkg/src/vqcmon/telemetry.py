"""Run-log persistence and live event fan-out.

Events are JSON Lines on disk (write-through: the file is appended before
record() returns) and streamed to live consumers in batches on a timer.
Late subscribers receive the full history before any live batch
(replay-then-tail). Each consumer owns a bounded buffer; a slow consumer
loses its oldest batches and sees a gap marker, and never slows the recorder.
"""
from __future__ import annotations

import json
import math
import re
import sys
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

from .errors import InputError

SCALAR = "scalar"
TEXT = "text"

SCALAR_TAGS = {
    "train_loss",
    "test_accuracy",
    "bp_variance.RX",
    "bp_variance.RY",
    "bp_variance.RZ",
    "threshold",
}
TEXT_TAGS = {"model_feedback"}
_PARAM_TAG = re.compile(r"^bp_variance\.param\.\d+$")


@dataclass(frozen=True)
class TelemetryEvent:
    kind: str  # SCALAR or TEXT
    tag: str
    step: int
    value: float | str
    wall_time: float

    def __post_init__(self):
        if self.kind == SCALAR:
            if self.tag not in SCALAR_TAGS and not _PARAM_TAG.match(self.tag):
                raise InputError(f"unknown scalar tag {self.tag!r}")
            if not isinstance(self.value, (int, float)) or not math.isfinite(
                self.value
            ):
                raise InputError(f"scalar value must be finite, got {self.value!r}")
        elif self.kind == TEXT:
            if self.tag not in TEXT_TAGS:
                raise InputError(f"unknown text tag {self.tag!r}")
            if not isinstance(self.value, str):
                raise InputError("text value must be a string")
        else:
            raise InputError(f"unknown event kind {self.kind!r}")
        if self.step < 0:
            raise InputError("step must be nonnegative")

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "tag": self.tag,
                "step": self.step,
                "value": self.value,
                "wall_time": self.wall_time,
            }
        )

    @staticmethod
    def from_json(line: str) -> "TelemetryEvent":
        obj = json.loads(line)
        return TelemetryEvent(
            kind=obj["kind"],
            tag=obj["tag"],
            step=obj["step"],
            value=obj["value"],
            wall_time=obj["wall_time"],
        )


def scalar_event(tag: str, step: int, value: float) -> TelemetryEvent:
    return TelemetryEvent(SCALAR, tag, step, float(value), time.time())


def text_event(tag: str, step: int, value: str) -> TelemetryEvent:
    return TelemetryEvent(TEXT, tag, step, value, time.time())


@dataclass
class ReadResult:
    events: list[TelemetryEvent]
    skipped: int


def read_run_log(path: str | Path) -> ReadResult:
    """Parse an events.jsonl file, tolerating (and counting) corrupt lines."""
    path = Path(path)
    events: list[TelemetryEvent] = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                events.append(TelemetryEvent.from_json(line))
            except (json.JSONDecodeError, KeyError, TypeError, InputError):
                skipped += 1
    return ReadResult(events, skipped)


class Subscriber:
    """One live consumer's bounded batch buffer."""

    def __init__(self, history: list[TelemetryEvent], max_batches: int = 256):
        self._cond = threading.Condition()
        self._batches: deque[list[TelemetryEvent]] = deque()
        self._max_batches = max_batches
        self._dropped = 0
        self._closed = False
        if history:
            self._batches.append(history)

    def push(self, batch: list[TelemetryEvent]) -> None:
        with self._cond:
            if self._closed:
                return
            if len(self._batches) >= self._max_batches:
                lost = self._batches.popleft()
                self._dropped += len(lost)
            self._batches.append(batch)
            self._cond.notify()

    def pop(self, timeout: Optional[float] = None) -> tuple[Optional[list[TelemetryEvent]], int]:
        """Next batch (or None on timeout/close) plus events dropped since the
        previous pop. A nonzero drop count means a gap precedes this batch."""
        with self._cond:
            if not self._batches and not self._closed:
                self._cond.wait(timeout)
            dropped, self._dropped = self._dropped, 0
            if self._batches:
                return self._batches.popleft(), dropped
            return None, dropped

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    @property
    def closed(self) -> bool:
        return self._closed


class TelemetryRecorder:
    """Single-producer event sink: in-memory buffer + JSONL run log +
    batched fan-out to subscribers.

    record() is called only from the training thread and never blocks on
    consumers; a run-log write failure is reported and training continues.
    """

    def __init__(self, run_dir: str | Path, on_io_error: Optional[Callable[[Exception], None]] = None):
        self.run_dir = Path(run_dir)
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.run_dir / "events.jsonl"
        self._events: list[TelemetryEvent] = []
        self._pending_from = 0
        self._lock = threading.Lock()
        self._subscribers: list[Subscriber] = []
        self._on_io_error = on_io_error or (
            lambda exc: print(f"telemetry: run-log write failed: {exc}", file=sys.stderr)
        )
        self._fh = None
        try:
            self._fh = open(self.log_path, "a", encoding="utf-8")
        except OSError as exc:
            self._on_io_error(exc)

    def record(self, event: TelemetryEvent) -> int:
        """Append one event; returns its position in the run buffer."""
        line = event.to_json()  # validates via construction; serialize first
        with self._lock:
            self._events.append(event)
            position = len(self._events) - 1
        if self._fh is not None:
            try:
                self._fh.write(line + "\n")
                self._fh.flush()
            except OSError as exc:
                self._on_io_error(exc)
        return position

    def subscribe(self, max_batches: int = 256) -> Subscriber:
        """Register a live consumer; it receives the full history first."""
        with self._lock:
            sub = Subscriber(list(self._events), max_batches=max_batches)
            self._subscribers.append(sub)
        return sub

    def unsubscribe(self, sub: Subscriber) -> None:
        sub.close()
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def flush_stream(self) -> list[TelemetryEvent]:
        """Deliver the delta since the last flush to every subscriber."""
        with self._lock:
            batch = self._events[self._pending_from :]
            self._pending_from = len(self._events)
            subs = list(self._subscribers)
        if batch:
            for sub in subs:
                sub.push(batch)
        return batch

    @property
    def events(self) -> list[TelemetryEvent]:
        with self._lock:
            return list(self._events)

    @property
    def subscriber_count(self) -> int:
        with self._lock:
            return len(self._subscribers)

    def close(self) -> None:
        self.flush_stream()
        with self._lock:
            subs = list(self._subscribers)
        for sub in subs:
            sub.close()
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class StreamEmitter:
    """Timer thread driving flush_stream every interval seconds."""

    def __init__(self, recorder: TelemetryRecorder, interval_seconds: float):
        if interval_seconds <= 0:
            raise InputError("interval must be positive")
        self.recorder = recorder
        self.interval = interval_seconds
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._loop, daemon=True)

    def start(self) -> None:
        self._thread.start()

    def _loop(self) -> None:
        while not self._stop.wait(self.interval):
            self.recorder.flush_stream()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join()
        self.recorder.flush_stream()
