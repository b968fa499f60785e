from __future__ import annotations

import json
from pathlib import Path

import pytest

from screenarc.config import SessionConfig, parse_config, to_header
from screenarc.engine import Engine, replay
from screenarc.errors import ConfigError, SceneError, TraceError
from screenarc.inputs import Command, ContactEvent, GazeSample, HeadPoseEvent, Phase
from screenarc.geometry import Pose, screen_to_world
from screenarc.tasks import metrics_to_records
from screenarc.traceio import InputTrace, parse_trace, serialize_trace
from screenarc.vecmath import vnormalize

from .agent import Driver, run_puzzle, run_transfer_block
from .reference import run_reference

GOLDEN = Path(__file__).parent / "golden"

GAZE_FREE = """
[session]
technique = gaze_touch
seed = 1
"""

TRANSFER_15 = """
[session]
technique = gaze_touch
seed = 3
[task]
kind = transfer
screens = 15
"""

PUZZLE_10 = """
[session]
technique = gaze_touch
seed = 5
[layout]
screen_count = 1
columns = 1
rows = 1
[task]
kind = puzzle
layers = 10
"""


def test_empty_trace_initial_snapshot():
    config = parse_config(GAZE_FREE)
    trace = InputTrace(header=to_header(config), events=())
    snapshot, metrics, _ = replay(trace)
    assert snapshot["revision"] == 1
    assert snapshot["cursor"] == {"screen": 7, "u": 0.5, "v": 0.5}
    assert metrics == []


def test_replay_twice_bit_identical():
    trace = parse_trace((GOLDEN / "gaze_switch_basic.trace").read_text())
    _, m1, e1 = replay(trace)
    _, m2, e2 = replay(trace)
    assert e1.snapshot_json() == e2.snapshot_json()
    assert metrics_to_records(m1) == metrics_to_records(m2)


def test_golden_gaze_switch_basic():
    trace = parse_trace((GOLDEN / "gaze_switch_basic.trace").read_text())
    expected = json.loads((GOLDEN / "gaze_switch_basic.expected.json").read_text())
    snapshot, metrics, engine = replay(trace)
    assert engine.router.active_screen == expected["active_screen"]
    assert engine.router.cursor[0] == expected["cursor_u"]
    assert engine.router.cursor[1] == expected["cursor_v"]
    assert not metrics
    # the reference interpreter agrees event-for-event
    ref = run_reference(engine.layout, engine.technique, list(trace.events), {})
    assert ref["active"] == expected["active_screen"]
    assert ref["switches"] == expected["switches"]
    # byte-stable replay output
    assert engine.snapshot_json() + "\n" == (
        GOLDEN / "gaze_switch_basic.snapshot.json"
    ).read_text()


def test_golden_transfer_one_trial():
    trace = parse_trace((GOLDEN / "transfer_one_trial.trace").read_text())
    _, metrics, engine = replay(trace)
    assert metrics_to_records(metrics) == (GOLDEN / "transfer_one_trial.metrics").read_text()
    assert engine.snapshot_json() + "\n" == (
        GOLDEN / "transfer_one_trial.snapshot.json"
    ).read_text()


def test_revision_counts_applied_events():
    engine = Engine(parse_config(GAZE_FREE))
    assert engine.revision == 1
    engine.apply(ContactEvent(0.1, 1, Phase.DOWN, 5.0, 5.0))
    engine.apply(ContactEvent(0.2, 1, Phase.UP, 5.0, 5.0))
    assert engine.revision == 3
    assert engine.snapshot()["revision"] == 3


def test_long_press_grab_via_recognizer():
    engine = Engine(parse_config(TRANSFER_15))
    driver = Driver(engine)
    trial = engine.snapshot()["task"]["trial"]
    driver.gaze_to_screen(trial["start_screen"])
    driver.move_cursor_to(trial["start_u"], trial["start_v"])
    driver.long_press()
    assert engine.router.held_item == "disk"
    snap = engine.snapshot()
    disk = next(i for i in snap["items"] if i["id"] == "disk")
    assert disk["held"] is True
    # the held item rides with the cursor in snapshots
    assert disk["u"] == snap["cursor"]["u"]


def test_transfer_block_completes_and_replays():
    engine = Engine(parse_config(TRANSFER_15))
    run_transfer_block(engine)
    assert len(engine.metrics) == 32
    assert all(m.tct_s >= 0 for m in engine.metrics)
    assert all(m.placement_distance_cm < 0.01 for m in engine.metrics)
    assert engine.snapshot()["task"]["trial"] is None
    text = serialize_trace(engine.trace())
    snapshot, metrics, replayed = replay(parse_trace(text))
    assert replayed.snapshot_json() == engine.snapshot_json()
    assert metrics_to_records(metrics) == metrics_to_records(engine.metrics)


def test_bimanual_transfer_block_completes():
    config = parse_config(TRANSFER_15.replace("gaze_touch", "bimanual"))
    engine = Engine(config)
    run_transfer_block(engine)
    assert len(engine.metrics) == 32
    assert engine.metrics[0].condition == "bimanual-15"


def test_transfer_4_screen_block():
    config = parse_config(
        TRANSFER_15.replace("screens = 15", "screens = 4")
        + "[layout]\nscreen_count = 4\ncolumns = 2\nrows = 2\n"
    )
    engine = Engine(config)
    run_transfer_block(engine)
    assert len(engine.metrics) == 32
    assert engine.metrics[0].condition == "gaze_touch-4"


def test_failed_release_keeps_trial_running():
    engine = Engine(parse_config(TRANSFER_15))
    driver = Driver(engine)
    trial = engine.snapshot()["task"]["trial"]
    driver.gaze_to_screen(trial["start_screen"])
    driver.move_cursor_to(trial["start_u"], trial["start_v"])
    driver.long_press()
    # drop it somewhere on the same screen, far from the target
    driver.move_cursor_to(0.5, 0.5)
    driver.long_press()
    assert engine.router.held_item is None
    assert engine.metrics == []
    assert engine.snapshot()["task"]["completed"] == 0
    # the disk stayed where it was dropped; grab it again and finish
    driver.long_press()
    assert engine.router.held_item == "disk"
    driver.gaze_to_screen(trial["target_screen"])
    driver.move_cursor_to(trial["target_u"], trial["target_v"])
    driver.long_press()
    assert len(engine.metrics) == 1
    # the clock runs from the first grab, so the detour cost time
    assert engine.metrics[0].tct_s > 0


def test_puzzle_completes_and_replays():
    engine = Engine(parse_config(PUZZLE_10))
    run_puzzle(engine)
    assert len(engine.metrics) == 1
    m = engine.metrics[0]
    assert m.errors == 0
    assert m.condition == "depth-10"
    text = serialize_trace(engine.trace())
    _, metrics, replayed = replay(parse_trace(text))
    assert replayed.snapshot_json() == engine.snapshot_json()
    assert metrics[0] == m


def test_puzzle_flat_condition_label_and_errors():
    config = parse_config(PUZZLE_10 + "[layers]\nview = flat\n")
    engine = Engine(config)
    driver = Driver(engine)
    driver.command("next")  # advance without moving anything
    assert engine.metrics[0].condition == "flat-10"
    assert engine.metrics[0].errors == 10
    with pytest.raises(SceneError, match="already completed"):
        driver.command("next")


def test_puzzle_piece_snaps_to_grid():
    engine = Engine(parse_config(PUZZLE_10))
    driver = Driver(engine)
    run = engine._puzzle
    layer = run.spec.layer_count - 1
    driver.command("select_layer", layer)
    driver.move_cursor_to(*engine._cell_uv(run.cells[layer]))
    driver.long_press()
    # release slightly off the template center: it must snap onto the cell
    tu, tv = engine._cell_uv(run.spec.template[layer])
    screen = engine.layout.screen(run.screen_id)
    driver.move_cursor_to(tu + 1.2 / screen.width_cm, tv - 0.9 / screen.height_cm)
    driver.long_press()
    assert run.cells[layer] == run.spec.template[layer]
    piece = engine.items[f"piece-{layer}"]
    assert piece.position == engine._cell_uv(run.spec.template[layer])


def test_puzzle_only_active_layer_grabbable():
    engine = Engine(parse_config(PUZZLE_10))
    driver = Driver(engine)
    run = engine._puzzle
    driver.command("select_layer", 3)
    # hover over layer 5's piece and long-press: nothing is picked up
    driver.move_cursor_to(*engine._cell_uv(run.cells[5]))
    driver.long_press()
    assert engine.router.held_item is None


def test_two_finger_swipe_navigates_layers():
    engine = Engine(parse_config(PUZZLE_10))
    driver = Driver(engine)
    assert engine.stack.active_index == 0
    driver.two_finger_swipe(4.2)
    assert engine.stack.active_index == 2
    # the residual accumulator dies with the gesture
    assert engine.stack.swipe_accum_cm == 0.0
    driver.two_finger_swipe(1.9)
    assert engine.stack.active_index == 2


def test_layer_commands():
    engine = Engine(parse_config(PUZZLE_10))
    driver = Driver(engine)
    driver.command("select_layer", 4)
    assert engine.stack.active_index == 4
    driver.command("toggle_visibility", 2)
    assert engine.stack.layers[2].visible is False
    driver.command("show_all")
    assert all(v.visible for v in engine.stack.rendered())
    assert all(v.z_cm == 0.0 for v in engine.stack.rendered())
    with pytest.raises(SceneError):
        driver.command("select_layer", 99)
    engine2 = Engine(parse_config(GAZE_FREE))
    with pytest.raises(SceneError, match="no layer stack"):
        Driver(engine2).command("select_layer", 0)


def test_grab_and_release_override_commands():
    engine = Engine(parse_config(TRANSFER_15))
    driver = Driver(engine)
    trial = engine.snapshot()["task"]["trial"]
    driver.gaze_to_screen(trial["start_screen"])
    driver.move_cursor_to(trial["start_u"], trial["start_v"])
    driver.command("grab_override")
    assert engine.router.held_item == "disk"
    driver.command("grab_override")  # idempotent while holding
    assert engine.router.held_item == "disk"
    driver.command("release_override")
    assert engine.router.held_item is None
    driver.command("release_override")  # idempotent while empty
    assert engine.router.held_item is None


def test_head_pose_updates_peek():
    engine = Engine(parse_config(GAZE_FREE))
    assert engine.snapshot()["peek"] is False
    engine.apply(HeadPoseEvent(0.1, Pose((10.5, 0.0, 0.0))))
    assert engine.snapshot()["peek"] is True
    engine.apply(HeadPoseEvent(0.2, Pose((9.5, 0.0, 0.0))))
    assert engine.snapshot()["peek"] is True  # hysteresis
    engine.apply(HeadPoseEvent(0.3, Pose((8.5, 0.0, 0.0))))
    assert engine.snapshot()["peek"] is False


def test_out_of_order_event_rejected():
    engine = Engine(parse_config(GAZE_FREE))
    engine.apply(Command(1.0, "show_all")) if engine.stack else None
    engine.apply(ContactEvent(1.0, 1, Phase.DOWN, 5.0, 5.0))
    with pytest.raises(TraceError):
        engine.apply(ContactEvent(0.5, 1, Phase.UP, 5.0, 5.0))


def test_bezel_contacts_not_routed_as_cursor_motion():
    engine = Engine(parse_config(GAZE_FREE.replace("gaze_touch", "bimanual")))
    engine.apply(ContactEvent(0.0, 1, Phase.DOWN, -1.0, 5.0))
    assert engine.router.mode.value == "coarse"
    assert engine.router.contacts == ()  # bezel contact is not a router contact
    engine.apply(ContactEvent(0.1, 1, Phase.UP, -1.0, 5.0))
    assert engine.router.mode.value == "fine"


def test_header_mismatch_rejected():
    config = parse_config(GAZE_FREE)
    other = parse_config(GAZE_FREE.replace("seed = 1", "seed = 2"))
    trace = InputTrace(header=to_header(other), events=())
    with pytest.raises(ConfigError, match="seed"):
        replay(trace, config)


def test_partial_header_fills_from_config():
    config = parse_config(TRANSFER_15)
    trace = InputTrace(header={"seed": 3, "technique": "gaze_touch"}, events=())
    snapshot, _, _ = replay(trace, config)
    assert snapshot["task"]["kind"] == "transfer"


def test_task_spec_file_round_trips_through_header(tmp_path):
    from screenarc.tasks import gen_transfer_block, serialize_transfer_block

    block = gen_transfer_block(15, seed=99)
    spec_file = tmp_path / "block.task"
    spec_file.write_text(serialize_transfer_block(block), encoding="utf-8")
    config = parse_config(TRANSFER_15 + f"spec = {spec_file}\n")
    engine = Engine(config)
    assert engine._transfer.block == block
    # the trace header embeds the spec, so a replay needs no file access
    spec_file.unlink()
    _, _, replayed = replay(parse_trace(serialize_trace(engine.trace())))
    assert replayed._transfer.block == block


def test_snapshot_is_prefix_function():
    trace = parse_trace((GOLDEN / "gaze_switch_basic.trace").read_text())
    engine_a = Engine(parse_config(GAZE_FREE))
    snapshots_a = [engine_a.snapshot_json()]
    for ev in trace.events:
        engine_a.apply(ev)
        snapshots_a.append(engine_a.snapshot_json())
    engine_b = Engine(parse_config(GAZE_FREE))
    snapshots_b = [engine_b.snapshot_json()]
    for ev in trace.events:
        engine_b.apply(ev)
        snapshots_b.append(engine_b.snapshot_json())
    assert snapshots_a == snapshots_b


def test_transfer_layout_mismatch_rejected():
    config = parse_config(
        TRANSFER_15 + "[layout]\nscreen_count = 4\ncolumns = 2\nrows = 2\n"
    )
    with pytest.raises(ConfigError, match="layout"):
        Engine(config)


def test_unknown_header_key_rejected():
    config = parse_config(GAZE_FREE)
    trace = InputTrace(header={"seed": 1, "mystery_key": 5}, events=())
    with pytest.raises(ConfigError, match="mystery_key"):
        replay(trace, config)


def test_gaze_events_inert_in_bimanual_session():
    engine = Engine(parse_config(GAZE_FREE.replace("gaze_touch", "bimanual")))
    target = engine.layout.at_grid(3, 1)
    point = screen_to_world(target, 0.5, 0.5)
    engine.apply(GazeSample(0.1, (0.0, 0.0, 0.0), vnormalize(point)))
    assert engine.router.active_screen != target.id
    assert engine.router.active_screen == 7
