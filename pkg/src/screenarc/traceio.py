"""Canonical newline-delimited record format for traces and the protocol.

One record per line, UTF-8, each line a flat JSON object whose first field
is a ``"type"`` discriminator.  A trace starts with a ``header`` record
followed by time-ordered events of type ``contact``, ``gaze``, ``head`` or
``command``.  Canonical serialization fixes the field order per type and
renders every number with exactly six decimal places, so equal traces are
byte-identical.

Field order:
    header   type, version, then config keys in the documented order
    contact  type, t, id, phase, x, y
    gaze     type, t, ox, oy, oz, dx, dy, dz
    head     type, t, px, py, pz, qw, qx, qy, qz
    command  type, t, name, value
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from .canon import fmt6, q6
from .errors import TraceError
from .geometry import Pose
from .inputs import (
    COMMAND_NAMES,
    Command,
    ContactEvent,
    GazeSample,
    HeadPoseEvent,
    InputEvent,
    Phase,
)

TRACE_VERSION = 1

_EVENT_TYPES = ("contact", "gaze", "head", "command")


@dataclass(frozen=True)
class InputTrace:
    """Header (flat config mapping) plus time-ordered events."""

    header: dict[str, object]
    events: tuple[InputEvent, ...]


def _fmt_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return fmt6(value)
    if isinstance(value, int):
        return str(value)
    if value is None:
        return "null"
    return json.dumps(value, ensure_ascii=False)


def _record_line(fields: list[tuple[str, object]]) -> str:
    body = ",".join(f"{json.dumps(k)}:{_fmt_value(v)}" for k, v in fields)
    return "{" + body + "}"


def serialize_event(event: InputEvent) -> str:
    if isinstance(event, ContactEvent):
        return _record_line(
            [
                ("type", "contact"),
                ("t", float(event.t)),
                ("id", event.contact_id),
                ("phase", event.phase.value),
                ("x", float(event.x_cm)),
                ("y", float(event.y_cm)),
            ]
        )
    if isinstance(event, GazeSample):
        ox, oy, oz = event.origin
        dx, dy, dz = event.direction
        return _record_line(
            [
                ("type", "gaze"),
                ("t", float(event.t)),
                ("ox", float(ox)),
                ("oy", float(oy)),
                ("oz", float(oz)),
                ("dx", float(dx)),
                ("dy", float(dy)),
                ("dz", float(dz)),
            ]
        )
    if isinstance(event, HeadPoseEvent):
        px, py, pz = event.pose.position
        qw, qx, qy, qz = event.pose.orientation
        return _record_line(
            [
                ("type", "head"),
                ("t", float(event.t)),
                ("px", float(px)),
                ("py", float(py)),
                ("pz", float(pz)),
                ("qw", float(qw)),
                ("qx", float(qx)),
                ("qy", float(qy)),
                ("qz", float(qz)),
            ]
        )
    if isinstance(event, Command):
        return _record_line(
            [
                ("type", "command"),
                ("t", float(event.t)),
                ("name", event.name),
                ("value", event.value),
            ]
        )
    raise TypeError(f"not a trace event: {event!r}")


def serialize_header(header: dict[str, object]) -> str:
    fields: list[tuple[str, object]] = [("type", "header"), ("version", TRACE_VERSION)]
    for key, value in header.items():
        if key in ("type", "version"):
            continue
        fields.append((key, value))
    return _record_line(fields)


def serialize_trace(trace: InputTrace) -> str:
    lines = [serialize_header(trace.header)]
    lines.extend(serialize_event(e) for e in trace.events)
    return "\n".join(lines) + "\n"


def _require(record: dict, key: str, line: int) -> object:
    if key not in record:
        raise TraceError(f"record missing field {key!r}", line)
    return record[key]


def _number(record: dict, key: str, line: int) -> float:
    value = _require(record, key, line)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TraceError(f"field {key!r} must be numeric", line)
    return q6(float(value))


def parse_event(record: dict, line: int = 0) -> InputEvent:
    """Build one event from a decoded record object.

    All numeric fields are quantized to the canonical 6-decimal wire
    resolution on the way in, so replays operate on exactly the values a
    serialized trace would carry.
    """
    rtype = _require(record, "type", line)
    t = _number(record, "t", line)
    if rtype == "contact":
        phase_raw = _require(record, "phase", line)
        try:
            phase = Phase(phase_raw)
        except ValueError:
            raise TraceError(f"unknown contact phase {phase_raw!r}", line) from None
        cid = _require(record, "id", line)
        if isinstance(cid, bool) or not isinstance(cid, int):
            raise TraceError("contact id must be an integer", line)
        return ContactEvent(
            t=t,
            contact_id=cid,
            phase=phase,
            x_cm=_number(record, "x", line),
            y_cm=_number(record, "y", line),
        )
    if rtype == "gaze":
        origin = tuple(_number(record, k, line) for k in ("ox", "oy", "oz"))
        direction = tuple(_number(record, k, line) for k in ("dx", "dy", "dz"))
        try:
            return GazeSample(t=t, origin=origin, direction=direction)
        except ValueError as exc:
            raise TraceError(str(exc), line) from None
    if rtype == "head":
        position = tuple(_number(record, k, line) for k in ("px", "py", "pz"))
        quat = tuple(_number(record, k, line) for k in ("qw", "qx", "qy", "qz"))
        try:
            pose = Pose(position, quat)
        except ValueError as exc:
            raise TraceError(str(exc), line) from None
        return HeadPoseEvent(t=t, pose=pose)
    if rtype == "command":
        name = _require(record, "name", line)
        if name not in COMMAND_NAMES:
            raise TraceError(f"unknown command {name!r}", line)
        value = record.get("value")
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            raise TraceError("command value must be an integer or null", line)
        return Command(t=t, name=name, value=value)
    raise TraceError(f"unknown record type {rtype!r}", line)


def parse_record(line_text: str, line: int = 0) -> dict:
    try:
        record = json.loads(line_text)
    except json.JSONDecodeError as exc:
        raise TraceError(f"malformed record: {exc.msg}", line) from None
    if not isinstance(record, dict):
        raise TraceError("record must be a JSON object", line)
    return record


def parse_trace(data: str | bytes) -> InputTrace:
    """Parse a full trace; errors name the offending 1-based line."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    lines = [ln for ln in data.split("\n") if ln.strip() != ""]
    if not lines:
        raise TraceError("empty trace: header record required", 1)

    header_rec = parse_record(lines[0], 1)
    if header_rec.get("type") != "header":
        raise TraceError("first record must be the header", 1)
    version = header_rec.get("version")
    if version != TRACE_VERSION:
        raise TraceError(f"unsupported trace version {version!r}", 1)
    header = {
        k: (q6(float(v)) if isinstance(v, float) else v)
        for k, v in header_rec.items()
        if k not in ("type", "version")
    }

    events: list[InputEvent] = []
    last_t: float | None = None
    for i, text in enumerate(lines[1:], start=2):
        record = parse_record(text, i)
        if record.get("type") not in _EVENT_TYPES:
            raise TraceError(f"record type {record.get('type')!r} not allowed in traces", i)
        event = parse_event(record, i)
        if last_t is not None and event.t < last_t:
            raise TraceError(f"timestamp {event.t} decreases (previous {last_t})", i)
        last_t = event.t
        events.append(event)
    return InputTrace(header=header, events=tuple(events))


def canonicalize_event(event: InputEvent) -> InputEvent:
    """Quantize an event's floats to the wire resolution.

    The engine canonicalizes every event at ingestion so that a live
    session and the replay of its serialized trace see bit-identical
    numbers.
    """
    if isinstance(event, ContactEvent):
        return ContactEvent(
            t=q6(event.t),
            contact_id=event.contact_id,
            phase=event.phase,
            x_cm=q6(event.x_cm),
            y_cm=q6(event.y_cm),
        )
    if isinstance(event, GazeSample):
        return GazeSample(
            t=q6(event.t),
            origin=tuple(q6(c) for c in event.origin),
            direction=tuple(q6(c) for c in event.direction),
        )
    if isinstance(event, HeadPoseEvent):
        pose = event.pose
        return HeadPoseEvent(
            t=q6(event.t),
            pose=Pose(
                tuple(q6(c) for c in pose.position),
                tuple(q6(c) for c in pose.orientation),
            ),
        )
    if isinstance(event, Command):
        return Command(t=q6(event.t), name=event.name, value=event.value)
    raise TypeError(f"not a trace event: {event!r}")


def events_of(trace: InputTrace) -> Iterable[InputEvent]:
    return trace.events
