"""Live session endpoint: one engine per WebSocket connection.

Each text frame from a client is a batch of newline-separated records in
the trace grammar.  The server applies the batch in order, then sends one
snapshot record, then a metrics record per trial completed by the batch.
Events may omit "t": the server stamps them with the session-relative
arrival time.  The whole session is downloadable as a canonical trace
(send a ``download_trace`` record), which replays headlessly to the
identical final snapshot.

Malformed or inapplicable records produce an error record and the session
continues.  A protocol version mismatch (``?v=`` query parameter) is
answered with an error record and the connection is closed.
"""

from __future__ import annotations

import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .canon import canon_json, q6
from .config import SessionConfig
from .engine import Engine
from .errors import EngineError
from .tasks import TrialMetrics
from .traceio import parse_event, parse_record, serialize_trace

PROTOCOL_VERSION = 1

_EVENT_TYPES = ("contact", "gaze", "head", "command")


def _metrics_record(m: TrialMetrics) -> dict:
    return {
        "type": "metrics",
        "trial_id": m.trial_id,
        "condition": m.condition,
        "tct_s": m.tct_s,
        "distance_cm": m.placement_distance_cm,
        "errors": m.errors,
    }


def _error_record(reason: str) -> dict:
    return {"type": "error", "reason": reason}


class SessionRunner:
    """Protocol logic for one session, transport-agnostic and testable."""

    def __init__(self, config: SessionConfig):
        self.engine = Engine(config)
        self._started = time.monotonic()

    def initial_messages(self) -> list[str]:
        return [canon_json(self.engine.snapshot())]

    def _stamp(self) -> float:
        elapsed = q6(time.monotonic() - self._started)
        return max(elapsed, self.engine.last_t)

    def handle_batch(self, text: str) -> list[str]:
        """Apply one frame's records; returns the reply messages in order.

        Each batch is answered with any error records, then exactly one
        snapshot, then a metrics record per trial the batch completed.
        """
        replies: list[str] = []
        new_metrics: list[TrialMetrics] = []
        emit_snapshot = False
        for line in text.split("\n"):
            if not line.strip():
                continue
            try:
                record = parse_record(line)
                rtype = record.get("type")
                if rtype == "download_trace":
                    replies.append(
                        canon_json(
                            {"type": "trace", "text": serialize_trace(self.engine.trace())}
                        )
                    )
                    continue
                if rtype not in _EVENT_TYPES:
                    replies.append(canon_json(_error_record(f"unknown record type {rtype!r}")))
                    emit_snapshot = True
                    continue
                if "t" not in record:
                    record = {**record, "t": self._stamp()}
                event = parse_event(record)
                new_metrics.extend(self.engine.apply(event))
                emit_snapshot = True
            except EngineError as exc:
                replies.append(canon_json(_error_record(str(exc))))
                emit_snapshot = True
        if emit_snapshot or not replies:
            replies.append(canon_json(self.engine.snapshot()))
        replies.extend(canon_json(_metrics_record(m)) for m in new_metrics)
        return replies


def create_app(config: SessionConfig, frontend_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="screenarc session server")

    @app.websocket("/ws")
    async def session(ws: WebSocket) -> None:
        await ws.accept()
        version = ws.query_params.get("v", str(PROTOCOL_VERSION))
        if version != str(PROTOCOL_VERSION):
            await ws.send_text(
                canon_json(
                    {
                        "type": "error",
                        "reason": f"protocol version {version} unsupported",
                        "server_version": PROTOCOL_VERSION,
                    }
                )
            )
            await ws.close(code=1002)
            return
        runner = SessionRunner(config)
        for message in runner.initial_messages():
            await ws.send_text(message)
        try:
            while True:
                text = await ws.receive_text()
                for message in runner.handle_batch(text):
                    await ws.send_text(message)
        except WebSocketDisconnect:
            return

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="frontend")
    return app
