"""Evaluation tasks: content transfer across screens and the layered puzzle.

Transfer trials move a 4 cm disk from a start slot on one screen to a
same-sized target on another; the eight slots sit on a 6 cm ring around
the screen center at 45-degree steps.  A 15-screen block covers every
signed grid displacement (1..4 columns x 1..2 rows x both directions per
axis) exactly once, 32 trials in total; a 4-screen block draws 32 trials
from all ordered screen pairs so that straight and diagonal moves both
occur for every seed.

The puzzle places one 5x5 cm piece per depth layer on a 5x3 grid of 5 cm
cells; scoring counts pieces off their template cell when the participant
advances.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from .canon import fmt6, q6
from .errors import ConfigError, EngineError, TraceError
from .geometry import ScaffoldLayout, VirtualScreen, screen_to_world
from .routing import ItemGrabbed, ItemReleased
from .traceio import parse_record
from .vecmath import vdist

SLOT_COUNT = 8
SLOT_RING_RADIUS_CM = 6.0
DISK_DIAMETER_CM = 4.0
TRANSFER_TRIALS_PER_BLOCK = 32
PIECE_CM = 5.0


class IncompleteTrialError(EngineError):
    """The event log lacks the grab/release (or advance) that ends a trial."""


@dataclass(frozen=True)
class TransferTrial:
    start_screen: int
    start_slot: int
    target_screen: int
    target_slot: int
    disk_diameter_cm: float = DISK_DIAMETER_CM
    target_diameter_cm: float = DISK_DIAMETER_CM

    def __post_init__(self) -> None:
        if not (0 <= self.start_slot < SLOT_COUNT and 0 <= self.target_slot < SLOT_COUNT):
            raise ValueError("slots must be in 0..7")
        if (self.start_screen, self.start_slot) == (self.target_screen, self.target_slot):
            raise ValueError("start and target must differ")


@dataclass(frozen=True)
class TransferBlock:
    screens: int  # 4 or 15
    seed: int
    trials: tuple[TransferTrial, ...]


@dataclass(frozen=True)
class GridSpec:
    columns: int = 5
    rows: int = 3
    cell_cm: float = PIECE_CM

    def __post_init__(self) -> None:
        if self.columns < 1 or self.rows < 1 or self.cell_cm <= 0:
            raise ValueError("invalid grid")

    @property
    def width_cm(self) -> float:
        return self.columns * self.cell_cm

    @property
    def height_cm(self) -> float:
        return self.rows * self.cell_cm

    def cell_center(self, col: int, row: int) -> tuple[float, float]:
        return (col + 0.5) * self.cell_cm, (row + 0.5) * self.cell_cm

    def cells(self) -> list[tuple[int, int]]:
        return [(c, r) for c in range(self.columns) for r in range(self.rows)]


@dataclass(frozen=True)
class PuzzleSpec:
    layer_count: int
    template: tuple[tuple[int, int], ...]  # layer -> target cell
    start: tuple[tuple[int, int], ...]  # layer -> starting cell
    grid: GridSpec = field(default_factory=GridSpec)
    piece_cm: float = PIECE_CM
    seed: int = 0

    def __post_init__(self) -> None:
        if self.layer_count < 1:
            raise ValueError("layer_count must be >= 1")
        if len(self.template) != self.layer_count or len(self.start) != self.layer_count:
            raise ValueError("template/start must assign every layer")
        if len(set(self.template)) != self.layer_count:
            raise ValueError("template cells must be distinct")
        valid = set(self.grid.cells())
        for cell in (*self.template, *self.start):
            if cell not in valid:
                raise ValueError(f"cell {cell} outside the grid")
        for layer in range(self.layer_count):
            if self.template[layer] == self.start[layer]:
                raise ValueError(f"layer {layer} starts on its template cell")


@dataclass(frozen=True)
class TrialMetrics:
    trial_id: int
    condition: str
    tct_s: float
    placement_distance_cm: float | None = None  # transfer
    errors: int | None = None  # puzzle
    event_refs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.tct_s < 0:
            raise ValueError("task completion time must be non-negative")
        if self.placement_distance_cm is not None and self.placement_distance_cm < 0:
            raise ValueError("distance must be non-negative")


# -- geometry helpers ----------------------------------------------------------


def slot_uv(
    screen: VirtualScreen, slot: int, ring_radius_cm: float = SLOT_RING_RADIUS_CM
) -> tuple[float, float]:
    """Normalized position of slot 0..7 on the ring around screen center."""
    ang = math.radians(45.0 * slot)
    u = 0.5 + ring_radius_cm * math.cos(ang) / screen.width_cm
    v = 0.5 + ring_radius_cm * math.sin(ang) / screen.height_cm
    return u, v


def transfer_success(
    trial: TransferTrial,
    layout: ScaffoldLayout,
    release_screen: int,
    u: float,
    v: float,
) -> tuple[bool, float]:
    """(success, center distance in cm) for a release at (screen, u, v).

    Success needs at least partial overlap of disk and target: release on
    the target's screen with center distance below the two radii summed.
    The distance itself is the world-space distance, defined even when the
    disk lands on a different screen.
    """
    target = layout.screen(trial.target_screen)
    tu, tv = slot_uv(target, trial.target_slot)
    release_world = screen_to_world(layout.screen(release_screen), u, v)
    target_world = screen_to_world(target, tu, tv)
    distance = vdist(release_world, target_world)
    overlap = distance < 0.5 * (trial.disk_diameter_cm + trial.target_diameter_cm)
    return (release_screen == trial.target_screen and overlap), distance


# -- generation ----------------------------------------------------------------


def _grid_dims(screens: int) -> tuple[int, int]:
    if screens == 4:
        return 2, 2
    if screens == 15:
        return 5, 3
    raise ConfigError(f"transfer blocks support 4 or 15 screens, not {screens}")


def gen_transfer_block(screens: int, seed: int) -> TransferBlock:
    """Deterministic 32-trial block for the given screen count."""
    columns, rows = _grid_dims(screens)
    rng = random.Random(seed)
    trials: list[TransferTrial] = []

    if screens == 15:
        combos = [
            (sx * adx, sy * ady)
            for adx in range(1, 5)
            for ady in range(1, 3)
            for sx in (1, -1)
            for sy in (1, -1)
        ]
        rng.shuffle(combos)
        for dx, dy in combos:
            cols_ok = [c for c in range(columns) if 0 <= c + dx < columns]
            rows_ok = [r for r in range(rows) if 0 <= r + dy < rows]
            col = rng.choice(cols_ok)
            row = rng.choice(rows_ok)
            trials.append(
                TransferTrial(
                    start_screen=row * columns + col,
                    start_slot=rng.randrange(SLOT_COUNT),
                    target_screen=(row + dy) * columns + (col + dx),
                    target_slot=rng.randrange(SLOT_COUNT),
                )
            )
    else:
        # cycle shuffled copies of all 12 ordered pairs so every seed
        # includes straight (distance-1) and diagonal (distance-sqrt2) moves
        pairs = [(a, b) for a in range(4) for b in range(4) if a != b]
        sequence: list[tuple[int, int]] = []
        while len(sequence) < TRANSFER_TRIALS_PER_BLOCK:
            batch = pairs[:]
            rng.shuffle(batch)
            sequence.extend(batch)
        sequence = sequence[:TRANSFER_TRIALS_PER_BLOCK]
        rng.shuffle(sequence)
        for a, b in sequence:
            trials.append(
                TransferTrial(
                    start_screen=a,
                    start_slot=rng.randrange(SLOT_COUNT),
                    target_screen=b,
                    target_slot=rng.randrange(SLOT_COUNT),
                )
            )
    return TransferBlock(screens=screens, seed=seed, trials=tuple(trials))


def gen_puzzle_spec(layer_count: int, seed: int, grid: GridSpec | None = None) -> PuzzleSpec:
    """Deterministic puzzle: random distinct template cells, pieces starting
    stacked row-major from the grid origin, never on their own target."""
    grid = grid or GridSpec()
    if layer_count < 1 or layer_count > grid.columns * grid.rows:
        raise ConfigError(
            f"layer_count must be 1..{grid.columns * grid.rows}, got {layer_count}"
        )
    rng = random.Random(seed)
    start = tuple(
        (i % grid.columns, (i // grid.columns) % grid.rows) for i in range(layer_count)
    )
    cells = grid.cells()
    while True:
        template = tuple(rng.sample(cells, layer_count))
        if all(template[i] != start[i] for i in range(layer_count)):
            break
    return PuzzleSpec(
        layer_count=layer_count, template=template, start=start, grid=grid, seed=seed
    )


def snap_to_grid(point: tuple[float, float], grid: GridSpec) -> tuple[int, int]:
    """Cell whose center is nearest; exact ties go to the lower (col, row)."""
    best: tuple[int, int] | None = None
    best_d = math.inf
    for col, row in grid.cells():  # lexicographic (col, row)
        cx, cy = grid.cell_center(col, row)
        d = (point[0] - cx) ** 2 + (point[1] - cy) ** 2
        if d < best_d:
            best_d = d
            best = (col, row)
    assert best is not None
    return best


# -- scoring -------------------------------------------------------------------


def score_transfer(
    trial: TransferTrial,
    log: list,
    layout: ScaffoldLayout,
    disk_item: str = "disk",
    trial_id: int = 0,
    condition: str = "",
) -> TrialMetrics:
    """Score one trial from a router effect log.

    The clock starts at the first grab of the disk and stops at the final
    release (the successful placement ends the trial, earlier misses just
    extend it).
    """
    grab_t: float | None = None
    grab_ref: int | None = None
    release: ItemReleased | None = None
    release_ref: int | None = None
    for i, effect in enumerate(log):
        if isinstance(effect, ItemGrabbed) and effect.item_id == disk_item:
            if grab_t is None:
                grab_t = effect.t
                grab_ref = i
        elif isinstance(effect, ItemReleased) and effect.item_id == disk_item:
            release = effect
            release_ref = i
    if grab_t is None or release is None:
        raise IncompleteTrialError("trial log lacks a grab/release of the disk")
    _, distance = transfer_success(trial, layout, release.screen_id, release.u, release.v)
    return TrialMetrics(
        trial_id=trial_id,
        condition=condition,
        tct_s=release.t - grab_t,
        placement_distance_cm=distance,
        event_refs=(grab_ref, release_ref),
    )


def score_puzzle(
    spec: PuzzleSpec,
    piece_cells: dict[int, tuple[int, int]],
    t_start: float,
    t_next: float | None,
    trial_id: int = 0,
    condition: str = "",
) -> TrialMetrics:
    """Errors = pieces off their template cell when "next" was issued."""
    if t_next is None:
        raise IncompleteTrialError('puzzle trial lacks the "next" command')
    errors = 0
    for layer in range(spec.layer_count):
        if piece_cells.get(layer, spec.start[layer]) != spec.template[layer]:
            errors += 1
    return TrialMetrics(
        trial_id=trial_id, condition=condition, tct_s=t_next - t_start, errors=errors
    )


# -- balanced latin square -------------------------------------------------------


def balanced_latin_square(n: int) -> list[list[int]]:
    """n orderings of n conditions, balanced for first-order carryover.

    Every condition appears once per row and once per column position,
    and every ordered pair of adjacent conditions occurs exactly once
    across rows.  Only even n is supported.
    """
    if n < 2 or n % 2 != 0:
        raise ConfigError(f"balanced latin square requires an even n >= 2, got {n}")
    offsets = [0, 1]
    k = 2
    while len(offsets) < n:
        offsets.append(n - k // 2 if k % 2 == 0 else (k + 1) // 2)
        k += 1
    return [[(row + off) % n for off in offsets] for row in range(n)]


# -- task spec and metrics serialization ----------------------------------------


def serialize_transfer_block(block: TransferBlock) -> str:
    lines = [
        f'{{"type":"task","kind":"transfer","screens":{block.screens},"seed":{block.seed}}}'
    ]
    for i, tr in enumerate(block.trials):
        lines.append(
            '{"type":"trial"'
            + f',"i":{i},"start_screen":{tr.start_screen},"start_slot":{tr.start_slot}'
            + f',"target_screen":{tr.target_screen},"target_slot":{tr.target_slot}'
            + "}"
        )
    return "\n".join(lines) + "\n"


def serialize_puzzle_spec(spec: PuzzleSpec) -> str:
    g = spec.grid
    lines = [
        '{"type":"task","kind":"puzzle"'
        + f',"layers":{spec.layer_count},"seed":{spec.seed}'
        + f',"grid_columns":{g.columns},"grid_rows":{g.rows}'
        + f',"cell_cm":{fmt6(g.cell_cm)},"piece_cm":{fmt6(spec.piece_cm)}'
        + "}"
    ]
    for layer in range(spec.layer_count):
        tc, tr = spec.template[layer]
        sc, sr = spec.start[layer]
        lines.append(
            '{"type":"piece"'
            + f',"layer":{layer},"template_col":{tc},"template_row":{tr}'
            + f',"start_col":{sc},"start_row":{sr}'
            + "}"
        )
    return "\n".join(lines) + "\n"


def parse_task_spec(text: str) -> TransferBlock | PuzzleSpec:
    lines = [ln for ln in text.split("\n") if ln.strip()]
    if not lines:
        raise TraceError("empty task spec", 1)
    head = parse_record(lines[0], 1)
    if head.get("type") != "task":
        raise TraceError("task spec must start with a task record", 1)
    kind = head.get("kind")
    if kind == "transfer":
        trials = []
        for i, ln in enumerate(lines[1:], start=2):
            rec = parse_record(ln, i)
            if rec.get("type") != "trial":
                raise TraceError("expected trial record", i)
            trials.append(
                TransferTrial(
                    start_screen=rec["start_screen"],
                    start_slot=rec["start_slot"],
                    target_screen=rec["target_screen"],
                    target_slot=rec["target_slot"],
                )
            )
        return TransferBlock(
            screens=int(head["screens"]), seed=int(head["seed"]), trials=tuple(trials)
        )
    if kind == "puzzle":
        grid = GridSpec(
            columns=int(head["grid_columns"]),
            rows=int(head["grid_rows"]),
            cell_cm=q6(float(head["cell_cm"])),
        )
        template: dict[int, tuple[int, int]] = {}
        start: dict[int, tuple[int, int]] = {}
        for i, ln in enumerate(lines[1:], start=2):
            rec = parse_record(ln, i)
            if rec.get("type") != "piece":
                raise TraceError("expected piece record", i)
            layer = int(rec["layer"])
            template[layer] = (int(rec["template_col"]), int(rec["template_row"]))
            start[layer] = (int(rec["start_col"]), int(rec["start_row"]))
        count = int(head["layers"])
        return PuzzleSpec(
            layer_count=count,
            template=tuple(template[i] for i in range(count)),
            start=tuple(start[i] for i in range(count)),
            grid=grid,
            piece_cm=q6(float(head["piece_cm"])),
            seed=int(head["seed"]),
        )
    raise TraceError(f"unknown task kind {kind!r}", 1)


METRICS_CSV_COLUMNS = ("trial_id", "condition", "tct_s", "distance_cm", "errors")


def metrics_to_records(metrics: list[TrialMetrics]) -> str:
    lines = []
    for m in metrics:
        dist = "null" if m.placement_distance_cm is None else fmt6(m.placement_distance_cm)
        errs = "null" if m.errors is None else str(m.errors)
        cond = json.dumps(m.condition, ensure_ascii=False)
        lines.append(
            '{"type":"metrics"'
            + f',"trial_id":{m.trial_id},"condition":{cond}'
            + f',"tct_s":{fmt6(m.tct_s)},"distance_cm":{dist},"errors":{errs}'
            + "}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_metrics(text: str) -> list[TrialMetrics]:
    out = []
    for i, ln in enumerate(ln for ln in text.split("\n") if ln.strip()):
        rec = parse_record(ln, i + 1)
        if rec.get("type") != "metrics":
            raise TraceError("expected metrics record", i + 1)
        dist = rec.get("distance_cm")
        out.append(
            TrialMetrics(
                trial_id=int(rec["trial_id"]),
                condition=str(rec["condition"]),
                tct_s=q6(float(rec["tct_s"])),
                placement_distance_cm=None if dist is None else q6(float(dist)),
                errors=None if rec.get("errors") is None else int(rec["errors"]),
            )
        )
    return out


def metrics_to_csv(metrics: list[TrialMetrics]) -> str:
    lines = [",".join(METRICS_CSV_COLUMNS)]
    for m in metrics:
        dist = "" if m.placement_distance_cm is None else fmt6(m.placement_distance_cm)
        errs = "" if m.errors is None else str(m.errors)
        lines.append(f"{m.trial_id},{m.condition},{fmt6(m.tct_s)},{dist},{errs}")
    return "\n".join(lines) + "\n"
