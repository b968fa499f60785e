"""The deterministic session engine.

One engine instance owns a session: it feeds contact events through the
gesture recognizer, routes surface contacts, gestures and gaze samples
through the cursor router, applies layer commands and two-finger swipes
to the depth stack, tracks lean-to-peek, and runs the configured task
(content transfer or puzzle), scoring trials as they complete.

Event application is strictly sequential and transactional enough for
replay: the snapshot after N events is a pure function of (config, first
N events).  Applied events are retained so any session can be exported as
a canonical trace and replayed to the identical final snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .canon import canon_json
from .config import SessionConfig, TaskKind, check_header_matches, from_header, to_header
from .errors import ConfigError, SceneError, TraceError
from .geometry import ScaffoldLayout, build_layout, screen_axes
from .inputs import (
    BezelHold,
    Command,
    ContactEvent,
    GazeSample,
    GestureRecognizer,
    HeadPoseEvent,
    InputEvent,
    LongPress,
    Region,
    TwoFingerSwipe,
    classify_contact,
)
from .layers import (
    LayerStack,
    ViewMode,
    end_swipe_episode,
    make_stack,
    peek_active,
    select_layer,
    show_all,
    swipe_layers,
    toggle_visibility,
)
from .routing import (
    Effect,
    Item,
    ItemGrabbed,
    ItemReleased,
    RouterState,
    initial_state,
    step,
)
from .tasks import (
    PuzzleSpec,
    TransferBlock,
    TrialMetrics,
    gen_puzzle_spec,
    gen_transfer_block,
    parse_task_spec,
    score_puzzle,
    slot_uv,
    transfer_success,
)
from .traceio import InputTrace, canonicalize_event

DISK_ITEM = "disk"


@dataclass
class _TransferRun:
    block: TransferBlock
    condition: str
    index: int = 0
    first_grab_t: float | None = None

    @property
    def done(self) -> bool:
        return self.index >= len(self.block.trials)


@dataclass
class _PuzzleRun:
    spec: PuzzleSpec
    condition: str
    screen_id: int
    cells: dict[int, tuple[int, int]]
    scored: bool = False


class Engine:
    def __init__(self, config: SessionConfig):
        if config.task.spec_path and not config.task.spec_text:
            try:
                with open(config.task.spec_path, "r", encoding="utf-8") as fh:
                    spec_text = fh.read()
            except OSError as exc:
                raise ConfigError(f"cannot read task spec: {exc}") from None
            config = replace(config, task=replace(config.task, spec_text=spec_text))
        self.config = config
        self.layout: ScaffoldLayout = build_layout(config.layout, config.anchor)
        self.technique = config.technique
        self.recognizer = GestureRecognizer(config.tablet, config.gestures)
        self.router: RouterState = initial_state(self.layout)
        self.items: dict[str, Item] = {}
        self.effects: list[Effect] = []
        self.metrics: list[TrialMetrics] = []
        self.applied: list[InputEvent] = []
        self.head = config.anchor
        self.peek = False
        self.last_t = 0.0

        self.stack: LayerStack | None = None
        self._transfer: _TransferRun | None = None
        self._puzzle: _PuzzleRun | None = None
        self._init_task()

    # -- construction ---------------------------------------------------------

    def _init_task(self) -> None:
        config = self.config
        task = config.task
        if task.kind is TaskKind.TRANSFER:
            if task.spec_text:
                block = parse_task_spec(task.spec_text)
                if not isinstance(block, TransferBlock):
                    raise ConfigError("task spec is not a transfer block")
            else:
                block = gen_transfer_block(task.screens, config.task_seed)
            grid = {4: (2, 2), 15: (5, 3)}[block.screens]
            if (config.layout.columns, config.layout.rows) != grid:
                raise ConfigError(
                    f"{block.screens}-screen transfer block needs a "
                    f"{grid[0]}x{grid[1]} layout"
                )
            condition = f"{config.technique.variant.value}-{block.screens}"
            self._transfer = _TransferRun(block=block, condition=condition)
            self._place_disk()
        elif task.kind is TaskKind.PUZZLE:
            if task.spec_text:
                spec = parse_task_spec(task.spec_text)
                if not isinstance(spec, PuzzleSpec):
                    raise ConfigError("task spec is not a puzzle spec")
            else:
                spec = gen_puzzle_spec(task.layers, config.task_seed)
            screen = self.layout.screen(self.router.active_screen)
            if (
                spec.grid.width_cm > screen.width_cm
                or spec.grid.height_cm > screen.height_cm
            ):
                raise ConfigError("puzzle grid does not fit on the screen")
            self.stack = make_stack(
                spec.layer_count,
                spacing_cm=config.layers.spacing_cm,
                swipe_cm_per_layer=config.layers.swipe_cm_per_layer,
                view_mode=config.layers.view,
            )
            label = "depth" if config.layers.view is ViewMode.ALIGNED else "flat"
            self._puzzle = _PuzzleRun(
                spec=spec,
                condition=f"{label}-{spec.layer_count}",
                screen_id=screen.id,
                cells={i: spec.start[i] for i in range(spec.layer_count)},
            )
            for layer in range(spec.layer_count):
                self.items[f"piece-{layer}"] = Item(
                    id=f"piece-{layer}",
                    owner_screen=screen.id,
                    position=self._cell_uv(spec.start[layer]),
                    radius_cm=spec.piece_cm / 2.0,
                    owner_layer=layer,
                )
        else:
            if config.layers.count > 0:
                self.stack = make_stack(
                    config.layers.count,
                    spacing_cm=config.layers.spacing_cm,
                    swipe_cm_per_layer=config.layers.swipe_cm_per_layer,
                    view_mode=config.layers.view,
                )

    def _place_disk(self) -> None:
        run = self._transfer
        assert run is not None
        if run.done:
            return
        trial = run.block.trials[run.index]
        screen = self.layout.screen(trial.start_screen)
        self.items[DISK_ITEM] = Item(
            id=DISK_ITEM,
            owner_screen=trial.start_screen,
            position=slot_uv(screen, trial.start_slot),
            radius_cm=trial.disk_diameter_cm / 2.0,
        )

    # -- puzzle grid mapping ----------------------------------------------------

    def _puzzle_screen(self):
        assert self._puzzle is not None
        return self.layout.screen(self._puzzle.screen_id)

    def _cell_uv(self, cell: tuple[int, int]) -> tuple[float, float]:
        """Grid cell center in screen-normalized coordinates (grid centered)."""
        assert self._puzzle is not None
        grid = self._puzzle.spec.grid
        screen = self._puzzle_screen()
        cx, cy = grid.cell_center(*cell)
        u = 0.5 + (cx - grid.width_cm / 2.0) / screen.width_cm
        v = 0.5 + (cy - grid.height_cm / 2.0) / screen.height_cm
        return u, v

    def _uv_to_grid(self, u: float, v: float) -> tuple[float, float]:
        assert self._puzzle is not None
        grid = self._puzzle.spec.grid
        screen = self._puzzle_screen()
        gx = (u - 0.5) * screen.width_cm + grid.width_cm / 2.0
        gy = (v - 0.5) * screen.height_cm + grid.height_cm / 2.0
        return gx, gy

    # -- event application --------------------------------------------------------

    def apply(self, event: InputEvent) -> list[TrialMetrics]:
        """Apply one event; returns metrics completed by this event.

        Events are canonicalized (floats quantized to wire resolution) on
        the way in, so live sessions match their replays bit for bit.
        """
        event = canonicalize_event(event)
        if event.t < self.last_t:
            raise TraceError(
                f"event at t={event.t} precedes session clock {self.last_t}"
            )
        before = len(self.metrics)

        if isinstance(event, ContactEvent):
            for gesture in self.recognizer.feed(event):
                self._route(gesture)
            region = classify_contact(self.config.tablet, event.x_cm, event.y_cm)
            if region is Region.SURFACE:
                self._route(event)
            if self.stack is not None and self.recognizer.surface_contact_count != 2:
                self.stack = end_swipe_episode(self.stack)
        elif isinstance(event, GazeSample):
            for gesture in self.recognizer.advance(event.t):
                self._route(gesture)
            self._route(event)
        elif isinstance(event, HeadPoseEvent):
            for gesture in self.recognizer.advance(event.t):
                self._route(gesture)
            self.head = event.pose
            self.peek = peek_active(
                self.head, self.config.anchor, self.config.peek, self.peek
            )
        elif isinstance(event, Command):
            for gesture in self.recognizer.advance(event.t):
                self._route(gesture)
            self._command(event)
        else:
            raise TraceError(f"unsupported event {event!r}")

        self.last_t = event.t
        self.applied.append(event)
        return self.metrics[before:]

    def _scene(self) -> dict[str, Item]:
        if self._puzzle is None or self.stack is None:
            return self.items
        active = self.stack.active_index
        held = self.router.held_item
        return {
            iid: item
            for iid, item in self.items.items()
            if item.owner_layer is None or item.owner_layer == active or iid == held
        }

    def _route(self, event) -> None:
        if isinstance(event, TwoFingerSwipe):
            if self.stack is not None:
                self.stack = swipe_layers(self.stack, event.delta_y_cm)
            return
        self.router, effects = step(
            self.router, event, self.layout, self.technique, self._scene()
        )
        for effect in effects:
            self.effects.append(effect)
            if isinstance(effect, ItemGrabbed):
                self._on_grab(effect)
            elif isinstance(effect, ItemReleased):
                self._on_release(effect)

    def _command(self, cmd: Command) -> None:
        name = cmd.name
        if name in ("select_layer", "toggle_visibility", "show_all"):
            if self.stack is None:
                raise SceneError(f"{name}: session has no layer stack")
            if name == "show_all":
                self.stack = show_all(self.stack)
                return
            if cmd.value is None:
                raise SceneError(f"{name} requires a layer index")
            try:
                if name == "select_layer":
                    self.stack = select_layer(self.stack, cmd.value)
                else:
                    self.stack = toggle_visibility(self.stack, cmd.value)
            except IndexError as exc:
                raise SceneError(str(exc)) from None
            return
        if name == "next":
            self._puzzle_next(cmd.t)
            return
        if name == "grab_override":
            if self.router.held_item is None:
                self._route(LongPress(t=cmd.t, contact_id=-1, x_cm=0.0, y_cm=0.0))
            return
        if name == "release_override":
            if self.router.held_item is not None:
                self._route(LongPress(t=cmd.t, contact_id=-1, x_cm=0.0, y_cm=0.0))
            return
        raise SceneError(f"unknown command {name!r}")

    # -- task progression -----------------------------------------------------------

    def _on_grab(self, effect: ItemGrabbed) -> None:
        run = self._transfer
        if run is not None and effect.item_id == DISK_ITEM and run.first_grab_t is None:
            run.first_grab_t = effect.t

    def _on_release(self, effect: ItemReleased) -> None:
        item = self.items.get(effect.item_id)
        if item is None:
            raise SceneError(f"released unknown item {effect.item_id!r}")

        if self._puzzle is not None and item.owner_layer is not None:
            # pieces live on the puzzle screen; releases elsewhere don't move them
            if effect.screen_id == self._puzzle.screen_id:
                cell = self._snap_cell(effect.u, effect.v)
                self._puzzle.cells[item.owner_layer] = cell
                self.items[item.id] = replace(item, position=self._cell_uv(cell))
            return

        self.items[item.id] = replace(
            item, owner_screen=effect.screen_id, position=(effect.u, effect.v)
        )
        run = self._transfer
        if run is None or effect.item_id != DISK_ITEM or run.done:
            return
        trial = run.block.trials[run.index]
        success, distance = transfer_success(
            trial, self.layout, effect.screen_id, effect.u, effect.v
        )
        if not success:
            return
        grab_t = run.first_grab_t if run.first_grab_t is not None else effect.t
        self.metrics.append(
            TrialMetrics(
                trial_id=run.index,
                condition=run.condition,
                tct_s=effect.t - grab_t,
                placement_distance_cm=distance,
            )
        )
        run.index += 1
        run.first_grab_t = None
        self._place_disk()

    def _snap_cell(self, u: float, v: float) -> tuple[int, int]:
        from .tasks import snap_to_grid

        assert self._puzzle is not None
        return snap_to_grid(self._uv_to_grid(u, v), self._puzzle.spec.grid)

    def _puzzle_next(self, t: float) -> None:
        run = self._puzzle
        if run is None:
            raise SceneError('"next" outside a puzzle session')
        if run.scored:
            raise SceneError("puzzle already completed")
        self.metrics.append(
            score_puzzle(
                run.spec,
                run.cells,
                t_start=0.0,
                t_next=t,
                trial_id=0,
                condition=run.condition,
            )
        )
        run.scored = True

    # -- outputs ---------------------------------------------------------------------

    @property
    def revision(self) -> int:
        return 1 + len(self.applied)

    def trace(self) -> InputTrace:
        return InputTrace(header=to_header(self.config), events=tuple(self.applied))

    def snapshot(self) -> dict:
        """Full scene state; canonical field order, floats at wire precision."""
        anchor = self.config.anchor
        screens = []
        for s in sorted(self.layout.screens, key=lambda s: s.id):
            right, up, _ = screen_axes(s)
            cx, cy, cz = s.center_pose.position
            screens.append(
                {
                    "id": s.id,
                    "col": s.grid_pos[0],
                    "row": s.grid_pos[1],
                    "cx": cx,
                    "cy": cy,
                    "cz": cz,
                    "rx": right[0],
                    "ry": right[1],
                    "rz": right[2],
                    "ux": up[0],
                    "uy": up[1],
                    "uz": up[2],
                    "w_cm": s.width_cm,
                    "h_cm": s.height_cm,
                    "active": s.id == self.router.active_screen,
                }
            )
        items = []
        for iid in sorted(self.items):
            item = self.items[iid]
            held = iid == self.router.held_item
            u, v = self.router.cursor if held else item.position
            items.append(
                {
                    "id": iid,
                    "screen": self.router.active_screen if held else item.owner_screen,
                    "layer": item.owner_layer,
                    "u": u,
                    "v": v,
                    "radius_cm": item.radius_cm,
                    "held": held,
                }
            )
        layers = None
        if self.stack is not None:
            layers = {
                "active": self.stack.active_index,
                "view": self.stack.view_mode.value,
                "collapsed": self.stack.collapsed,
                "spacing_cm": self.stack.spacing_cm,
                "swipe_accum_cm": self.stack.swipe_accum_cm,
                "entries": [
                    {
                        "index": lv.index,
                        "z_cm": lv.z_cm,
                        "visible": lv.visible,
                        "transparent": lv.transparent,
                    }
                    for lv in self.stack.rendered()
                ],
            }
        fx, fy, fz = anchor.forward
        return {
            "type": "snapshot",
            "revision": self.revision,
            "t": self.last_t,
            "technique": self.technique.variant.value,
            "clutch": self.technique.params.clutch_mode.value,
            "mode": self.router.mode.value,
            "anchor": {
                "px": anchor.position[0],
                "py": anchor.position[1],
                "pz": anchor.position[2],
                "qw": anchor.orientation[0],
                "qx": anchor.orientation[1],
                "qy": anchor.orientation[2],
                "qz": anchor.orientation[3],
                "fx": fx,
                "fy": fy,
                "fz": fz,
            },
            "screens": screens,
            "cursor": {
                "screen": self.router.active_screen,
                "u": self.router.cursor[0],
                "v": self.router.cursor[1],
            },
            "held": self.router.held_item,
            "items": items,
            "layers": layers,
            "peek": self.peek,
            "task": self._task_snapshot(),
        }

    def _task_snapshot(self) -> dict | None:
        if self._transfer is not None:
            run = self._transfer
            trial_block = None
            if not run.done:
                trial = run.block.trials[run.index]
                start = self.layout.screen(trial.start_screen)
                target = self.layout.screen(trial.target_screen)
                su, sv = slot_uv(start, trial.start_slot)
                tu, tv = slot_uv(target, trial.target_slot)
                trial_block = {
                    "index": run.index,
                    "start_screen": trial.start_screen,
                    "start_slot": trial.start_slot,
                    "start_u": su,
                    "start_v": sv,
                    "target_screen": trial.target_screen,
                    "target_slot": trial.target_slot,
                    "target_u": tu,
                    "target_v": tv,
                    "disk_diameter_cm": trial.disk_diameter_cm,
                    "target_diameter_cm": trial.target_diameter_cm,
                }
            return {
                "kind": "transfer",
                "condition": run.condition,
                "total": len(run.block.trials),
                "completed": run.index,
                "disk": DISK_ITEM,
                "trial": trial_block,
            }
        if self._puzzle is not None:
            run = self._puzzle
            grid = run.spec.grid
            return {
                "kind": "puzzle",
                "condition": run.condition,
                "screen": run.screen_id,
                "layers": run.spec.layer_count,
                "grid": {
                    "columns": grid.columns,
                    "rows": grid.rows,
                    "cell_cm": grid.cell_cm,
                },
                "template": [list(c) for c in run.spec.template],
                "template_uv": [
                    list(self._cell_uv(c)) for c in run.spec.template
                ],
                "cells": [list(run.cells[i]) for i in range(run.spec.layer_count)],
                "scored": run.scored,
            }
        return None

    def snapshot_json(self) -> str:
        return canon_json(self.snapshot())


def replay(
    trace: InputTrace, config: SessionConfig | None = None
) -> tuple[dict, list[TrialMetrics], Engine]:
    """Replay a trace; returns (final snapshot, metrics, engine).

    With no config the session is rebuilt entirely from the trace header;
    with one, any header keys present are cross-checked against it.
    """
    if config is None:
        config = from_header(trace.header)
    else:
        check_header_matches(config, trace.header)
    engine = Engine(config)
    for event in trace.events:
        engine.apply(event)
    return engine.snapshot(), engine.metrics, engine
