"""Cursor routing: tablet and gaze input onto the active virtual screen.

Two techniques are implemented.  In the bimanual technique the tablet is
a relative touchpad (one-to-one by default) and holding a finger on the
bezel clutches into a coarse mode where every 2 cm of drag moves the
active screen one grid cell.  In the gaze+touch technique the active
screen follows the gaze: as soon as the gaze ray penetrates another
screen past 5% of that screen's extent (on each axis separating it from
the current screen) the cursor transfers, keeping its normalized (u, v).

The router is a deterministic, functional state machine: ``step`` maps
(state, event) to (new state, effects) and never mutates its inputs.  It
only understands *surface* contacts; the caller classifies contacts and
converts bezel activity into BezelHold gestures (see the engine).

Coarse switching quantizes the *episode total*: the displacement since
the bezel was pressed, truncated toward zero per 2 cm quantum, decides
the grid cell.  The outcome therefore depends only on the summed drag,
not on its segmentation, and clamping at a layout edge resets that
axis's accumulator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

from .errors import SceneError, TraceError
from .geometry import ScaffoldLayout, ScreenCoord, VirtualScreen
from .inputs import (
    BezelHold,
    ContactEvent,
    GazeSample,
    GestureEvent,
    LongPress,
    Phase,
    TabletConfig,
    TwoFingerSwipe,
)


class TechniqueVariant(str, Enum):
    BIMANUAL = "bimanual"
    GAZE_TOUCH = "gaze_touch"


class ClutchMode(str, Enum):
    STUDY = "study"  # gaze switching always live
    WINDOW_MANAGER = "window_manager"  # gaze locked while touching


class Mode(str, Enum):
    FINE = "fine"
    COARSE = "coarse"


@dataclass(frozen=True)
class TechniqueParams:
    fine_gain: float = 1.0  # cm on screen per cm on tablet
    coarse_cm_per_screen: float = 2.0
    gaze_spatial_threshold_frac: float = 0.05
    gaze_temporal_threshold_s: float = 0.0
    clutch_mode: ClutchMode = ClutchMode.STUDY

    def __post_init__(self) -> None:
        if self.fine_gain <= 0 or self.coarse_cm_per_screen <= 0:
            raise ValueError("gains must be positive")
        if self.gaze_spatial_threshold_frac < 0 or self.gaze_temporal_threshold_s < 0:
            raise ValueError("thresholds must be non-negative")


@dataclass(frozen=True)
class Technique:
    variant: TechniqueVariant
    params: TechniqueParams = field(default_factory=TechniqueParams)


@dataclass(frozen=True)
class Item:
    """A grabbable disc on a screen (optionally bound to a depth layer)."""

    id: str
    owner_screen: int
    position: tuple[float, float]  # (u, v), normalized
    radius_cm: float = 2.0
    owner_layer: int | None = None

    def __post_init__(self) -> None:
        u, v = self.position
        if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
            raise ValueError("item position must lie within the unit square")
        if self.radius_cm <= 0:
            raise ValueError("item radius must be positive")


@dataclass(frozen=True)
class RouterState:
    active_screen: int
    cursor: tuple[float, float] = (0.5, 0.5)
    mode: Mode = Mode.FINE
    coarse_accum: tuple[float, float] = (0.0, 0.0)  # episode drag totals, cm
    coarse_base: tuple[int, int] = (0, 0)  # grid cell at episode start
    held_item: str | None = None
    pending_gaze: tuple[int, float] | None = None  # (screen id, entry time)
    # live surface contacts: (id, x, y) in down order
    contacts: tuple[tuple[int, float, float], ...] = ()
    last_t: float = float("-inf")

    def cursor_coord(self) -> ScreenCoord:
        return ScreenCoord.from_raw(self.active_screen, self.cursor[0], self.cursor[1])


# -- effects -----------------------------------------------------------------


@dataclass(frozen=True)
class ScreenSwitched:
    t: float
    from_screen: int
    to_screen: int
    cause: str  # "gaze" | "coarse"


@dataclass(frozen=True)
class ItemGrabbed:
    t: float
    item_id: str


@dataclass(frozen=True)
class ItemReleased:
    t: float
    item_id: str
    screen_id: int
    u: float
    v: float


Effect = ScreenSwitched | ItemGrabbed | ItemReleased

RouteEvent = ContactEvent | GestureEvent | GazeSample


def initial_state(layout: ScaffoldLayout) -> RouterState:
    """Cursor centered on the screen nearest the anchor's forward axis."""
    config = layout.config
    center = layout.at_grid(config.columns // 2, config.rows // 2)
    assert center is not None
    return RouterState(active_screen=center.id, coarse_base=center.grid_pos)


def step(
    state: RouterState,
    event: RouteEvent,
    layout: ScaffoldLayout,
    technique: Technique,
    scene: Mapping[str, Item],
) -> tuple[RouterState, list[Effect]]:
    if event.t < state.last_t:
        raise TraceError(f"event at t={event.t} precedes router clock {state.last_t}")
    state = replace(state, last_t=event.t)

    if isinstance(event, ContactEvent):
        return _on_contact(state, event, layout, technique)
    if isinstance(event, BezelHold):
        return _on_bezel(state, event, layout, technique)
    if isinstance(event, LongPress):
        return _on_long_press(state, event, layout, scene)
    if isinstance(event, TwoFingerSwipe):
        return state, []  # depth navigation is the layer stack's concern
    if isinstance(event, GazeSample):
        return _on_gaze(state, event, layout, technique)
    raise TypeError(f"router cannot handle {event!r}")


# -- contacts and coarse switching -------------------------------------------


def _on_contact(
    state: RouterState,
    event: ContactEvent,
    layout: ScaffoldLayout,
    technique: Technique,
) -> tuple[RouterState, list[Effect]]:
    contacts = state.contacts
    if event.phase is Phase.DOWN:
        if any(cid == event.contact_id for cid, _, _ in contacts):
            raise TraceError(f"contact {event.contact_id} down while already down")
        return replace(
            state, contacts=contacts + ((event.contact_id, event.x_cm, event.y_cm),)
        ), []

    idx = next(
        (i for i, (cid, _, _) in enumerate(contacts) if cid == event.contact_id), None
    )
    if idx is None:
        raise TraceError(f"{event.phase.value} for unknown contact {event.contact_id}")

    if event.phase is Phase.UP:
        return replace(state, contacts=contacts[:idx] + contacts[idx + 1 :]), []

    _, px, py = contacts[idx]
    dx, dy = event.x_cm - px, event.y_cm - py
    new_contacts = (
        contacts[:idx] + ((event.contact_id, event.x_cm, event.y_cm),) + contacts[idx + 1 :]
    )
    state = replace(state, contacts=new_contacts)

    # only a lone finger steers; pairs belong to the swipe recognizer
    if len(new_contacts) != 1:
        return state, []

    if state.mode is Mode.COARSE:
        return _coarse_drag(state, event.t, dx, dy, layout, technique)

    screen = layout.screen(state.active_screen)
    gain = technique.params.fine_gain
    u = min(1.0, max(0.0, state.cursor[0] + gain * dx / screen.width_cm))
    v = min(1.0, max(0.0, state.cursor[1] + gain * dy / screen.height_cm))
    return replace(state, cursor=(u, v)), []


def _axis_target(base: int, total: float, quantum: float, hi: int) -> tuple[int, int, float]:
    """Derive one axis of coarse switching from the episode total.

    Returns (new_base, cell, new_total); a clamp at either end lands on
    the edge cell and clears the accumulated total for that axis.
    """
    steps = int(total / quantum)
    target = base + steps
    clamped = min(max(target, 0), hi)
    if target != clamped:
        return clamped, clamped, 0.0
    return base, target, total


def _coarse_drag(
    state: RouterState,
    t: float,
    dx: float,
    dy: float,
    layout: ScaffoldLayout,
    technique: Technique,
) -> tuple[RouterState, list[Effect]]:
    config = layout.config
    quantum = technique.params.coarse_cm_per_screen
    ax, ay = state.coarse_accum[0] + dx, state.coarse_accum[1] + dy
    base_col, base_row = state.coarse_base

    new_base_col, col, ax = _axis_target(base_col, ax, quantum, config.columns - 1)
    # upward drag (+y) moves one row up; row indices grow downward
    steps = int(ay / quantum)
    target_row = base_row - steps
    clamped_row = min(max(target_row, 0), config.rows - 1)
    if target_row != clamped_row:
        new_base_row, row, ay = clamped_row, clamped_row, 0.0
    else:
        new_base_row, row = base_row, target_row

    state = replace(
        state, coarse_accum=(ax, ay), coarse_base=(new_base_col, new_base_row)
    )
    current = layout.screen(state.active_screen)
    if (col, row) == current.grid_pos:
        return state, []
    target = layout.at_grid(col, row)
    if target is None:
        raise SceneError(f"no screen at grid cell ({col}, {row})")
    effects: list[Effect] = [
        ScreenSwitched(t=t, from_screen=current.id, to_screen=target.id, cause="coarse")
    ]
    return replace(state, active_screen=target.id), effects


def _on_bezel(
    state: RouterState,
    event: BezelHold,
    layout: ScaffoldLayout,
    technique: Technique,
) -> tuple[RouterState, list[Effect]]:
    if technique.variant is not TechniqueVariant.BIMANUAL:
        return state, []
    if event.active:
        base = layout.screen(state.active_screen).grid_pos
        return replace(
            state, mode=Mode.COARSE, coarse_accum=(0.0, 0.0), coarse_base=base
        ), []
    return replace(state, mode=Mode.FINE, coarse_accum=(0.0, 0.0)), []


# -- grab / release -----------------------------------------------------------


def _cursor_distance_cm(
    screen: VirtualScreen, cursor: tuple[float, float], position: tuple[float, float]
) -> float:
    du = (cursor[0] - position[0]) * screen.width_cm
    dv = (cursor[1] - position[1]) * screen.height_cm
    return math.hypot(du, dv)


def _on_long_press(
    state: RouterState,
    event: LongPress,
    layout: ScaffoldLayout,
    scene: Mapping[str, Item],
) -> tuple[RouterState, list[Effect]]:
    if state.held_item is not None:
        if state.held_item not in scene:
            raise SceneError(f"held item {state.held_item!r} missing from scene")
        u, v = state.cursor
        effect = ItemReleased(
            t=event.t, item_id=state.held_item, screen_id=state.active_screen, u=u, v=v
        )
        return replace(state, held_item=None), [effect]

    screen = layout.screen(state.active_screen)
    best: tuple[float, str] | None = None
    for item in scene.values():
        if item.owner_screen != state.active_screen:
            continue
        d = _cursor_distance_cm(screen, state.cursor, item.position)
        if d <= item.radius_cm and (best is None or (d, item.id) < best):
            best = (d, item.id)
    if best is None:
        return state, []
    return replace(state, held_item=best[1]), [ItemGrabbed(t=event.t, item_id=best[1])]


# -- gaze switching ------------------------------------------------------------


def _penetrates(
    hit_u: float, hit_v: float, target: VirtualScreen, origin: VirtualScreen, frac: float
) -> bool:
    """Deep enough past the target's boundary facing the origin screen?"""
    tcol, trow = target.grid_pos
    ocol, orow = origin.grid_pos
    if tcol > ocol and hit_u < frac:  # entered through the left edge
        return False
    if tcol < ocol and hit_u > 1.0 - frac:  # entered through the right edge
        return False
    if trow > orow and hit_v > 1.0 - frac:  # target below: entered from the top
        return False
    if trow < orow and hit_v < frac:  # target above: entered from the bottom
        return False
    return True


def _on_gaze(
    state: RouterState,
    event: GazeSample,
    layout: ScaffoldLayout,
    technique: Technique,
) -> tuple[RouterState, list[Effect]]:
    from .geometry import gaze_hit

    if technique.variant is not TechniqueVariant.GAZE_TOUCH:
        return state, []
    if (
        technique.params.clutch_mode is ClutchMode.WINDOW_MANAGER
        and len(state.contacts) > 0
    ):
        # glancing around while touching must not steal the active window
        return replace(state, pending_gaze=None), []

    hit = gaze_hit(layout, event.origin, event.direction)
    if hit is None or hit.screen_id == state.active_screen:
        return replace(state, pending_gaze=None), []

    target = layout.screen(hit.screen_id)
    origin_screen = layout.screen(state.active_screen)
    frac = technique.params.gaze_spatial_threshold_frac
    if not _penetrates(hit.u_raw, hit.v_raw, target, origin_screen, frac):
        return replace(state, pending_gaze=None), []

    dwell = technique.params.gaze_temporal_threshold_s
    if dwell > 0.0:
        pending = state.pending_gaze
        if pending is None or pending[0] != hit.screen_id:
            return replace(state, pending_gaze=(hit.screen_id, event.t)), []
        if event.t - pending[1] < dwell:
            return state, []

    effect = ScreenSwitched(
        t=event.t, from_screen=state.active_screen, to_screen=hit.screen_id, cause="gaze"
    )
    # the cursor keeps its exact (u, v) in the new screen
    return replace(state, active_screen=hit.screen_id, pending_gaze=None), [effect]


def retarget(
    physical: tuple[float, float], tablet: TabletConfig, target: VirtualScreen
) -> ScreenCoord:
    """Absolute mapping of the tablet's active area onto a full screen.

    Corners map to corners; the per-axis gain is target size over active
    area size.  Points outside the active area clamp to the edges.
    """
    u = physical[0] / tablet.active_width_cm
    v = physical[1] / tablet.active_height_cm
    return ScreenCoord.from_raw(target.id, u, v)
