"""Loopback HTTP server exposing the live telemetry stream.

Endpoints:
  GET  /events   server-sent events, one JSON event object per message,
                 full-history replay before live tail; gap markers
                 ({"kind": "gap", "dropped": N}) where a slow consumer
                 lost batches.
  GET  /status   {"run_id", "epoch", "threshold", "connected_consumers"}
  POST /command  {"set_threshold": <float>} -> {"threshold": <applied>}
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Optional

from .errors import VqcmonError
from .telemetry import TelemetryRecorder


class RunStatus:
    """Mutable snapshot the training loop keeps current."""

    def __init__(self, run_id: str, threshold: float):
        self._lock = threading.Lock()
        self.run_id = run_id
        self._epoch = -1
        self._threshold = threshold

    def update(self, epoch: Optional[int] = None, threshold: Optional[float] = None) -> None:
        with self._lock:
            if epoch is not None:
                self._epoch = epoch
            if threshold is not None:
                self._threshold = threshold

    def snapshot(self, connected: int) -> dict:
        with self._lock:
            return {
                "run_id": self.run_id,
                "epoch": self._epoch,
                "threshold": self._threshold,
                "connected_consumers": connected,
            }


class TelemetryServer:
    """Wraps ThreadingHTTPServer; request handlers read recorder/status and
    forward threshold commands to the engine callback."""

    def __init__(
        self,
        recorder: TelemetryRecorder,
        status: RunStatus,
        set_threshold: Optional[Callable[[float], float]] = None,
        host: str = "127.0.0.1",
        port: int = 8321,
    ):
        self.recorder = recorder
        self.status = status
        self.set_threshold = set_threshold
        outer = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def log_message(self, fmt, *args):  # quiet by default
                pass

            def _send_json(self, code: int, payload: dict) -> None:
                body = json.dumps(payload).encode()
                self.send_response(code)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def do_GET(self):
                if self.path == "/status":
                    self._send_json(
                        200, outer.status.snapshot(outer.recorder.subscriber_count)
                    )
                elif self.path == "/events":
                    self._stream_events()
                else:
                    self._send_json(404, {"error": "not found"})

            def _stream_events(self):
                self.send_response(200)
                self.send_header("Content-Type", "text/event-stream")
                self.send_header("Cache-Control", "no-cache")
                self.send_header("Connection", "close")
                self.end_headers()
                sub = outer.recorder.subscribe()
                try:
                    while not outer._shutdown.is_set():
                        batch, dropped = sub.pop(timeout=0.25)
                        if dropped:
                            self._write_sse(json.dumps({"kind": "gap", "dropped": dropped}))
                        if batch is None:
                            if sub.closed:
                                break
                            continue
                        for event in batch:
                            self._write_sse(event.to_json())
                except (BrokenPipeError, ConnectionResetError):
                    pass
                finally:
                    outer.recorder.unsubscribe(sub)

            def _write_sse(self, data: str) -> None:
                self.wfile.write(f"data: {data}\n\n".encode())
                self.wfile.flush()

            def do_POST(self):
                if self.path != "/command":
                    self._send_json(404, {"error": "not found"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    body = json.loads(self.rfile.read(length) or b"{}")
                except json.JSONDecodeError:
                    self._send_json(400, {"error": "invalid JSON"})
                    return
                if not isinstance(body, dict) or "set_threshold" not in body:
                    self._send_json(400, {"error": "expected {\"set_threshold\": <float>}"})
                    return
                value = body["set_threshold"]
                if not isinstance(value, (int, float)) or isinstance(value, bool):
                    self._send_json(400, {"error": "threshold must be a number"})
                    return
                if outer.set_threshold is None:
                    self._send_json(400, {"error": "no active run accepts commands"})
                    return
                try:
                    applied = outer.set_threshold(float(value))
                except VqcmonError as exc:
                    self._send_json(400, {"error": str(exc)})
                    return
                self._send_json(200, {"threshold": applied})

        self._shutdown = threading.Event()
        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._httpd.daemon_threads = True
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)

    @property
    def port(self) -> int:
        return self._httpd.server_address[1]

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._shutdown.set()
        self._httpd.shutdown()
        self._httpd.server_close()
        self._thread.join()
