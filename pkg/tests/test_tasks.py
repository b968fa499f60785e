from __future__ import annotations

import itertools
import math
import random
from collections import Counter

import pytest

from screenarc.errors import ConfigError
from screenarc.routing import ItemGrabbed, ItemReleased
from screenarc.tasks import (
    GridSpec,
    IncompleteTrialError,
    PuzzleSpec,
    TransferTrial,
    balanced_latin_square,
    gen_puzzle_spec,
    gen_transfer_block,
    metrics_to_csv,
    metrics_to_records,
    parse_metrics,
    parse_task_spec,
    score_puzzle,
    score_transfer,
    serialize_puzzle_spec,
    serialize_transfer_block,
    slot_uv,
    snap_to_grid,
    transfer_success,
    TrialMetrics,
)


def grid_pos(screen_id: int, columns: int) -> tuple[int, int]:
    return screen_id % columns, screen_id // columns


# -- transfer block generation ----------------------------------------------------


def test_block_15_covers_all_displacements():
    block = gen_transfer_block(15, seed=7)
    assert len(block.trials) == 32
    combos = Counter()
    for tr in block.trials:
        scol, srow = grid_pos(tr.start_screen, 5)
        tcol, trow = grid_pos(tr.target_screen, 5)
        combos[(tcol - scol, trow - srow)] += 1
        assert 0 <= tr.start_screen < 15 and 0 <= tr.target_screen < 15
    expected = {
        (sx * adx, sy * ady)
        for adx in range(1, 5)
        for ady in (1, 2)
        for sx in (1, -1)
        for sy in (1, -1)
    }
    assert set(combos) == expected
    assert all(count == 1 for count in combos.values())


def test_block_generation_deterministic():
    assert gen_transfer_block(15, seed=7) == gen_transfer_block(15, seed=7)
    assert gen_transfer_block(15, seed=7) != gen_transfer_block(15, seed=8)
    assert gen_transfer_block(4, seed=3) == gen_transfer_block(4, seed=3)


def test_block_4_distances_present_for_any_seed():
    for seed in range(40):
        block = gen_transfer_block(4, seed=seed)
        assert len(block.trials) == 32
        cheb = set()
        for tr in block.trials:
            assert tr.start_screen != tr.target_screen
            scol, srow = grid_pos(tr.start_screen, 2)
            tcol, trow = grid_pos(tr.target_screen, 2)
            cheb.add(
                math.hypot(tcol - scol, trow - srow)
            )
        assert 1.0 in cheb  # straight neighbours
        assert pytest.approx(math.sqrt(2.0)) in [c for c in cheb]  # diagonals


def test_block_rejects_other_sizes():
    with pytest.raises(ConfigError):
        gen_transfer_block(9, seed=0)


def test_trial_validation():
    with pytest.raises(ValueError):
        TransferTrial(start_screen=1, start_slot=3, target_screen=1, target_slot=3)
    with pytest.raises(ValueError):
        TransferTrial(start_screen=1, start_slot=9, target_screen=2, target_slot=0)


def test_slot_ring_positions(layout15):
    screen = layout15.screen(7)
    for slot in range(8):
        u, v = slot_uv(screen, slot)
        dx = (u - 0.5) * screen.width_cm
        dy = (v - 0.5) * screen.height_cm
        assert math.hypot(dx, dy) == pytest.approx(6.0, abs=1e-9)
        # a 4 cm disk at any slot stays fully on the screen
        assert 0 <= u - 2.0 / screen.width_cm and u + 2.0 / screen.width_cm <= 1
        assert 0 <= v - 2.0 / screen.height_cm and v + 2.0 / screen.height_cm <= 1
    assert len({slot_uv(screen, s) for s in range(8)}) == 8


# -- transfer scoring ---------------------------------------------------------------


def test_transfer_success_overlap_rule(layout15):
    trial = TransferTrial(start_screen=7, start_slot=0, target_screen=8, target_slot=2)
    target = layout15.screen(8)
    tu, tv = slot_uv(target, 2)
    ok, dist = transfer_success(trial, layout15, 8, tu, tv)
    assert ok and dist == pytest.approx(0.0, abs=1e-9)
    # 3.9 cm off-center: still a partial overlap of the 4 cm disks
    ok, dist = transfer_success(trial, layout15, 8, tu + 3.9 / target.width_cm, tv)
    assert ok and dist == pytest.approx(3.9, abs=1e-9)
    # 4.1 cm: no overlap, trial continues
    ok, dist = transfer_success(trial, layout15, 8, tu + 4.1 / target.width_cm, tv)
    assert not ok and dist == pytest.approx(4.1, abs=1e-9)
    # same distance but on the wrong screen is never a success
    ok, _ = transfer_success(trial, layout15, 7, tu, tv)
    assert not ok


def test_score_transfer_from_log(layout15):
    trial = TransferTrial(start_screen=7, start_slot=0, target_screen=8, target_slot=2)
    target = layout15.screen(8)
    tu, tv = slot_uv(target, 2)
    log = [
        ItemGrabbed(t=1.5, item_id="disk"),
        ItemReleased(t=3.0, item_id="disk", screen_id=7, u=0.9, v=0.5),  # miss
        ItemGrabbed(t=4.0, item_id="disk"),
        ItemReleased(t=6.25, item_id="disk", screen_id=8, u=tu, v=tv),
    ]
    metrics = score_transfer(trial, log, layout15, trial_id=3, condition="gaze_touch-15")
    assert metrics.tct_s == pytest.approx(6.25 - 1.5)
    assert metrics.placement_distance_cm == pytest.approx(0.0, abs=1e-9)
    assert metrics.event_refs == (0, 3)


def test_score_transfer_incomplete(layout15):
    trial = TransferTrial(start_screen=7, start_slot=0, target_screen=8, target_slot=2)
    with pytest.raises(IncompleteTrialError):
        score_transfer(trial, [ItemGrabbed(t=1.0, item_id="disk")], layout15)
    with pytest.raises(IncompleteTrialError):
        score_transfer(trial, [], layout15)


# -- snap to grid ----------------------------------------------------------------------


def brute_force_snap(point, grid):
    cells = grid.cells()
    dists = [
        (math.hypot(point[0] - grid.cell_center(c, r)[0], point[1] - grid.cell_center(c, r)[1]), (c, r))
        for c, r in cells
    ]
    best = min(d for d, _ in dists)
    winners = sorted(cell for d, cell in dists if d == best)
    return winners[0]


def test_snap_example():
    grid = GridSpec()
    assert snap_to_grid((7.6, 2.3), grid) == (1, 0)
    assert grid.cell_center(1, 0) == (7.5, 2.5)


def test_snap_exact_center_and_tiebreak():
    grid = GridSpec()
    assert snap_to_grid((12.5, 7.5), grid) == (2, 1)
    # equidistant between (0,0) and (1,0): the lower (col,row) wins
    assert snap_to_grid((5.0, 2.5), grid) == (0, 0)
    # equidistant between (0,0) and (0,1)
    assert snap_to_grid((2.5, 5.0), grid) == (0, 0)


def test_snap_matches_brute_force():
    grid = GridSpec()
    rng = random.Random(123)
    for _ in range(2000):
        p = (rng.uniform(-5.0, 30.0), rng.uniform(-5.0, 20.0))
        assert snap_to_grid(p, grid) == brute_force_snap(p, grid)


# -- puzzle ------------------------------------------------------------------------------


def test_puzzle_spec_generation():
    for layers in (4, 10):
        for seed in range(10):
            spec = gen_puzzle_spec(layers, seed)
            assert spec.layer_count == layers
            assert len(set(spec.template)) == layers
            for i in range(layers):
                assert spec.start[i] != spec.template[i]
    assert gen_puzzle_spec(10, 3) == gen_puzzle_spec(10, 3)


def test_puzzle_spec_validation():
    grid = GridSpec()
    with pytest.raises(ValueError, match="distinct"):
        PuzzleSpec(layer_count=2, template=((0, 0), (0, 0)), start=((1, 0), (1, 1)), grid=grid)
    with pytest.raises(ValueError, match="starts on"):
        PuzzleSpec(layer_count=1, template=((0, 0),), start=((0, 0),), grid=grid)
    with pytest.raises(ConfigError):
        gen_puzzle_spec(16, 0)


def test_score_puzzle_counts_mismatches():
    spec = gen_puzzle_spec(4, seed=1)
    perfect = {i: spec.template[i] for i in range(4)}
    m = score_puzzle(spec, perfect, t_start=0.0, t_next=30.0, condition="depth-4")
    assert m.errors == 0 and m.tct_s == pytest.approx(30.0)
    one_off = dict(perfect)
    one_off[2] = spec.start[2]
    m = score_puzzle(spec, one_off, t_start=0.0, t_next=30.0)
    assert m.errors == 1
    # brute-force comparison oracle over random assignments
    rng = random.Random(5)
    cells = spec.grid.cells()
    for _ in range(100):
        assignment = {i: rng.choice(cells) for i in range(4)}
        expected = sum(assignment[i] != spec.template[i] for i in range(4))
        assert score_puzzle(spec, assignment, 0.0, 1.0).errors == expected


def test_score_puzzle_requires_next():
    spec = gen_puzzle_spec(4, seed=1)
    with pytest.raises(IncompleteTrialError):
        score_puzzle(spec, {}, t_start=0.0, t_next=None)


def test_unmoved_pieces_default_to_start():
    spec = gen_puzzle_spec(4, seed=1)
    m = score_puzzle(spec, {}, t_start=0.0, t_next=5.0)
    assert m.errors == 4  # start never equals template


# -- balanced latin square ------------------------------------------------------------------


def verify_balanced_latin_square(rows):
    n = len(rows)
    for row in rows:
        assert sorted(row) == list(range(n))
    for col in range(n):
        assert sorted(r[col] for r in rows) == list(range(n))
    adjacency = Counter()
    for row in rows:
        for a, b in zip(row, row[1:]):
            adjacency[(a, b)] += 1
    expected_pairs = set(itertools.permutations(range(n), 2))
    assert set(adjacency) == expected_pairs
    assert all(count == 1 for count in adjacency.values())


def test_latin_square_n4():
    verify_balanced_latin_square(balanced_latin_square(4))


def test_latin_square_n2():
    assert balanced_latin_square(2) == [[0, 1], [1, 0]]


@pytest.mark.parametrize("n", [2, 4, 6, 8, 10])
def test_latin_square_even_orders(n):
    verify_balanced_latin_square(balanced_latin_square(n))


def test_latin_square_odd_unsupported():
    with pytest.raises(ConfigError):
        balanced_latin_square(3)
    with pytest.raises(ConfigError):
        balanced_latin_square(0)


# -- serialization ----------------------------------------------------------------------------


def test_task_spec_round_trip():
    block = gen_transfer_block(15, seed=11)
    assert parse_task_spec(serialize_transfer_block(block)) == block
    spec = gen_puzzle_spec(10, seed=11)
    assert parse_task_spec(serialize_puzzle_spec(spec)) == spec


def test_metrics_round_trip_and_csv():
    metrics = [
        TrialMetrics(trial_id=0, condition="gaze_touch-15", tct_s=3.25, placement_distance_cm=1.5),
        TrialMetrics(trial_id=1, condition="gaze_touch-15", tct_s=4.0, placement_distance_cm=0.0),
        TrialMetrics(trial_id=0, condition="depth-10", tct_s=37.125, errors=2),
    ]
    records = metrics_to_records(metrics)
    parsed = parse_metrics(records)
    stripped = [
        TrialMetrics(m.trial_id, m.condition, m.tct_s, m.placement_distance_cm, m.errors)
        for m in metrics
    ]
    assert parsed == stripped
    assert metrics_to_records(parsed) == records  # canonical
    csv = metrics_to_csv(metrics)
    lines = csv.strip().split("\n")
    assert lines[0] == "trial_id,condition,tct_s,distance_cm,errors"
    assert lines[1] == "0,gaze_touch-15,3.250000,1.500000,"
    assert lines[3] == "0,depth-10,37.125000,,2"


def test_metrics_validation():
    with pytest.raises(ValueError):
        TrialMetrics(trial_id=0, condition="x", tct_s=-1.0)
