from __future__ import annotations

import random
import re

import pytest

from screenarc.canon import q6
from screenarc.config import SessionConfig, to_header
from screenarc.errors import TraceError
from screenarc.geometry import Pose
from screenarc.inputs import Command, ContactEvent, GazeSample, HeadPoseEvent, Phase
from screenarc.traceio import InputTrace, parse_trace, serialize_trace
from screenarc.vecmath import qnormalize, vnormalize


def default_header():
    return to_header(SessionConfig())


def test_header_only_round_trip():
    trace = InputTrace(header=default_header(), events=())
    text = serialize_trace(trace)
    back = parse_trace(text)
    assert back == trace
    assert serialize_trace(back) == text


def random_trace(seed: int) -> InputTrace:
    rng = random.Random(seed)
    events = []
    t = 0.0
    live = set()
    for i in range(rng.randrange(0, 60)):
        t = q6(t + rng.uniform(0.0, 0.5))
        kind = rng.randrange(4)
        if kind == 0:
            cid = rng.randrange(3)
            if cid in live:
                phase = rng.choice((Phase.MOVE, Phase.UP))
                if phase is Phase.UP:
                    live.discard(cid)
            else:
                phase = Phase.DOWN
                live.add(cid)
            events.append(
                ContactEvent(
                    t=t,
                    contact_id=cid,
                    phase=phase,
                    x_cm=q6(rng.uniform(-3, 25)),
                    y_cm=q6(rng.uniform(-3, 16)),
                )
            )
        elif kind == 1:
            direction = vnormalize(
                (rng.uniform(0.5, 1), rng.uniform(-1, 1), rng.uniform(-1, 1))
            )
            events.append(
                GazeSample(
                    t=t,
                    origin=tuple(q6(rng.uniform(-5, 5)) for _ in range(3)),
                    direction=tuple(q6(c) for c in direction),
                )
            )
        elif kind == 2:
            quat = qnormalize((rng.uniform(0.5, 1), 0.0, 0.0, rng.uniform(-0.5, 0.5)))
            events.append(
                HeadPoseEvent(
                    t=t,
                    pose=Pose(
                        tuple(q6(rng.uniform(-20, 20)) for _ in range(3)),
                        tuple(q6(c) for c in quat),
                    ),
                )
            )
        else:
            name = rng.choice(("select_layer", "show_all", "next"))
            value = rng.randrange(4) if name == "select_layer" else None
            events.append(Command(t=t, name=name, value=value))
    return InputTrace(header=default_header(), events=tuple(events))


def test_random_traces_round_trip():
    for seed in range(25):
        trace = random_trace(seed)
        text = serialize_trace(trace)
        back = parse_trace(text)
        assert back == trace
        # canonical: serializing the parse reproduces the bytes
        assert serialize_trace(back) == text


def test_fixed_decimal_formatting():
    trace = random_trace(3)
    text = serialize_trace(trace)
    for match in re.finditer(r'"(?:t|x|y|ox|oy|oz|dx|dy|dz|px|py|pz|qw|qx|qy|qz)":([^,}]+)', text):
        value = match.group(1)
        assert re.fullmatch(r"-?\d+\.\d{6}", value), value


def test_decreasing_time_rejected():
    lines = [
        serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0],
        '{"type":"command","t":2.000000,"name":"show_all","value":null}',
        '{"type":"command","t":1.000000,"name":"show_all","value":null}',
    ]
    with pytest.raises(TraceError, match="line 3"):
        parse_trace("\n".join(lines))


def test_malformed_line_names_line_number():
    header = serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0]
    with pytest.raises(TraceError, match="line 2"):
        parse_trace(header + "\n{not json}\n")


def test_missing_header():
    with pytest.raises(TraceError, match="header"):
        parse_trace('{"type":"command","t":1.0,"name":"next","value":null}\n')
    with pytest.raises(TraceError, match="header"):
        parse_trace("")


def test_unknown_record_type_in_trace():
    header = serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0]
    with pytest.raises(TraceError, match="not allowed"):
        parse_trace(header + '\n{"type":"snapshot","t":1.0}\n')


def test_bad_gaze_direction():
    header = serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0]
    bad = '{"type":"gaze","t":1.000000,"ox":0.0,"oy":0.0,"oz":0.0,"dx":2.0,"dy":0.0,"dz":0.0}'
    with pytest.raises(TraceError, match="unit length"):
        parse_trace(header + "\n" + bad + "\n")


def test_unknown_command_rejected():
    header = serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0]
    bad = '{"type":"command","t":1.000000,"name":"warp","value":null}'
    with pytest.raises(TraceError, match="unknown command"):
        parse_trace(header + "\n" + bad + "\n")


def test_parse_quantizes_to_wire_resolution():
    header = serialize_trace(InputTrace(header=default_header(), events=())).splitlines()[0]
    text = header + '\n{"type":"contact","t":0.1234567891,"id":1,"phase":"down","x":1.0,"y":2.0}\n'
    trace = parse_trace(text)
    assert trace.events[0].t == q6(0.1234567891)
