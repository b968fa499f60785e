"""Input event vocabulary and gesture recognition.

Tablet-surface coordinates are in cm with the origin at the bottom-left
corner of the active area; x grows right, y grows away from the user
(towards the top edge).  The bezel extends 2 cm beyond the left, right and
bottom edges only; the top bezel is not an input surface.

The recognizer is a causal, sequential state machine: it consumes contact
events in time order and emits gesture events whose timestamps never
exceed the logical clock.  One instance per event stream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .errors import TraceError
from .geometry import Pose
from .vecmath import Vec3

# 10.1-inch 16:10 tablet active area (25.654 cm diagonal).
DEFAULT_ACTIVE_WIDTH_CM = 21.754548
DEFAULT_ACTIVE_HEIGHT_CM = 13.596593
DEFAULT_BEZEL_WIDTH_CM = 2.0


class Region(str, Enum):
    SURFACE = "surface"
    BEZEL_LEFT = "bezel_left"
    BEZEL_RIGHT = "bezel_right"
    BEZEL_BOTTOM = "bezel_bottom"
    OUTSIDE = "outside"


class Phase(str, Enum):
    DOWN = "down"
    MOVE = "move"
    UP = "up"


@dataclass(frozen=True)
class TabletConfig:
    active_width_cm: float = DEFAULT_ACTIVE_WIDTH_CM
    active_height_cm: float = DEFAULT_ACTIVE_HEIGHT_CM
    bezel_width_cm: float = DEFAULT_BEZEL_WIDTH_CM

    def __post_init__(self) -> None:
        if min(self.active_width_cm, self.active_height_cm, self.bezel_width_cm) <= 0:
            raise ValueError("tablet dimensions must be positive")


@dataclass(frozen=True)
class ContactEvent:
    t: float
    contact_id: int
    phase: Phase
    x_cm: float
    y_cm: float


@dataclass(frozen=True)
class GazeSample:
    t: float
    origin: Vec3
    direction: Vec3

    def __post_init__(self) -> None:
        n = math.sqrt(sum(c * c for c in self.direction))
        if abs(n - 1.0) > 1e-6:
            raise ValueError("gaze direction must be unit length (within 1e-6)")


@dataclass(frozen=True)
class HeadPoseEvent:
    t: float
    pose: Pose


@dataclass(frozen=True)
class Command:
    """Discrete instruction: layer selection, task advance, grab override."""

    t: float
    name: str
    value: int | None = None


COMMAND_NAMES = frozenset(
    [
        "select_layer",
        "toggle_visibility",
        "show_all",
        "next",
        "grab_override",
        "release_override",
    ]
)


# -- gesture events ----------------------------------------------------------


@dataclass(frozen=True)
class LongPress:
    t: float
    contact_id: int
    x_cm: float
    y_cm: float


@dataclass(frozen=True)
class TwoFingerSwipe:
    """Incremental vertical motion (cm) of the midpoint of two fingers."""

    t: float
    delta_y_cm: float


@dataclass(frozen=True)
class BezelHold:
    t: float
    active: bool


GestureEvent = LongPress | TwoFingerSwipe | BezelHold
InputEvent = ContactEvent | GazeSample | HeadPoseEvent | Command


@dataclass(frozen=True)
class GestureParams:
    long_press_s: float = 0.5
    movement_tolerance_cm: float = 0.3
    swipe_min_separation_cm: float = 1.0
    swipe_direction_tolerance_deg: float = 45.0

    def __post_init__(self) -> None:
        if self.long_press_s <= 0 or self.movement_tolerance_cm < 0:
            raise ValueError("invalid long-press parameters")
        if self.swipe_min_separation_cm < 0:
            raise ValueError("swipe separation must be non-negative")


def classify_contact(tablet: TabletConfig, x_cm: float, y_cm: float) -> Region:
    """Partition the tablet plane into surface / bezel strips / outside.

    The bottom bezel owns the two lower corners; anything above the top
    edge is outside (no top bezel).
    """
    w, h, b = tablet.active_width_cm, tablet.active_height_cm, tablet.bezel_width_cm
    if 0.0 <= x_cm <= w and 0.0 <= y_cm <= h:
        return Region.SURFACE
    if -b <= y_cm < 0.0 and -b <= x_cm <= w + b:
        return Region.BEZEL_BOTTOM
    if -b <= x_cm < 0.0 and 0.0 <= y_cm <= h:
        return Region.BEZEL_LEFT
    if w < x_cm <= w + b and 0.0 <= y_cm <= h:
        return Region.BEZEL_RIGHT
    return Region.OUTSIDE


@dataclass
class _Track:
    contact_id: int
    region: Region
    down_t: float
    down_x: float
    down_y: float
    x: float
    y: float
    moved: bool = False  # ever beyond the long-press tolerance
    long_press_fired: bool = False
    # cumulative displacement since the current swipe pair formed
    swipe_dx: float = 0.0
    swipe_dy: float = 0.0


class GestureRecognizer:
    """Turns a contact stream into long-press / swipe / bezel-hold events.

    Contacts are classified once, at their down position; a finger sliding
    from the surface onto the bezel keeps its surface role until lifted.
    Two-finger swipes require exactly two concurrent surface contacts that
    started at least ``swipe_min_separation_cm`` apart and whose motions
    agree in direction within ``swipe_direction_tolerance_deg`` (pinches
    are ignored).
    """

    # both fingers must have travelled this far before the direction
    # agreement test is meaningful
    _DIRECTION_CHECK_CM = 0.5

    def __init__(self, tablet: TabletConfig, params: GestureParams | None = None):
        self.tablet = tablet
        self.params = params or GestureParams()
        self._tracks: dict[int, _Track] = {}
        self._surface_order: list[int] = []
        self._bezel_count = 0
        self._pair: tuple[int, int] | None = None
        self._pair_ok = False
        self._pair_rejected = False
        self._clock = 0.0
        self._index = 0  # events fed so far, for error reporting

    # -- public API ----------------------------------------------------------

    def feed(self, event: ContactEvent) -> list[GestureEvent]:
        """Process one contact event; returns gestures in emission order."""
        self._index += 1
        out = self.advance(event.t)
        if event.phase is Phase.DOWN:
            out.extend(self._on_down(event))
        elif event.phase is Phase.MOVE:
            out.extend(self._on_move(event))
        else:
            out.extend(self._on_up(event))
        return out

    def advance(self, t: float) -> list[GestureEvent]:
        """Advance the logical clock; fires any due long presses."""
        if t < self._clock:
            raise TraceError(
                f"event at t={t} precedes recognizer clock {self._clock}", self._index
            )
        self._clock = t
        due: list[_Track] = []
        for track in self._tracks.values():
            if (
                track.region is Region.SURFACE
                and not track.long_press_fired
                and not track.moved
                and t >= track.down_t + self.params.long_press_s
            ):
                due.append(track)
        due.sort(key=lambda tr: (tr.down_t, tr.contact_id))
        out: list[GestureEvent] = []
        for track in due:
            track.long_press_fired = True
            out.append(
                LongPress(
                    t=track.down_t + self.params.long_press_s,
                    contact_id=track.contact_id,
                    x_cm=track.down_x,
                    y_cm=track.down_y,
                )
            )
        return out

    # -- phase handlers --------------------------------------------------------

    def _on_down(self, event: ContactEvent) -> list[GestureEvent]:
        if event.contact_id in self._tracks:
            raise TraceError(
                f"contact {event.contact_id} down while already down", self._index
            )
        region = classify_contact(self.tablet, event.x_cm, event.y_cm)
        self._tracks[event.contact_id] = _Track(
            contact_id=event.contact_id,
            region=region,
            down_t=event.t,
            down_x=event.x_cm,
            down_y=event.y_cm,
            x=event.x_cm,
            y=event.y_cm,
        )
        out: list[GestureEvent] = []
        if region is Region.SURFACE:
            self._surface_order.append(event.contact_id)
            self._reform_pair()
        elif region in (Region.BEZEL_LEFT, Region.BEZEL_RIGHT, Region.BEZEL_BOTTOM):
            self._bezel_count += 1
            if self._bezel_count == 1:
                out.append(BezelHold(t=event.t, active=True))
        return out

    def _on_move(self, event: ContactEvent) -> list[GestureEvent]:
        track = self._tracks.get(event.contact_id)
        if track is None:
            raise TraceError(f"move for unknown contact {event.contact_id}", self._index)
        out: list[GestureEvent] = []
        in_pair = self._pair is not None and event.contact_id in self._pair
        mid_before = self._pair_mid_y() if in_pair else 0.0

        dx = event.x_cm - track.x
        dy = event.y_cm - track.y
        track.x = event.x_cm
        track.y = event.y_cm
        if not track.moved and math.hypot(
            track.x - track.down_x, track.y - track.down_y
        ) > self.params.movement_tolerance_cm:
            track.moved = True

        if in_pair and self._pair_ok and not self._pair_rejected:
            track.swipe_dx += dx
            track.swipe_dy += dy
            if self._pair_directions_disagree():
                self._pair_rejected = True
            else:
                delta = self._pair_mid_y() - mid_before
                if delta != 0.0:
                    out.append(TwoFingerSwipe(t=event.t, delta_y_cm=delta))
        return out

    def _on_up(self, event: ContactEvent) -> list[GestureEvent]:
        track = self._tracks.pop(event.contact_id, None)
        if track is None:
            raise TraceError(f"up for unknown contact {event.contact_id}", self._index)
        out: list[GestureEvent] = []
        if track.region is Region.SURFACE:
            self._surface_order.remove(event.contact_id)
            self._reform_pair()
        elif track.region is not Region.OUTSIDE:
            self._bezel_count -= 1
            if self._bezel_count == 0:
                out.append(BezelHold(t=event.t, active=False))
        return out

    # -- swipe pair bookkeeping ------------------------------------------------

    def _reform_pair(self) -> None:
        if len(self._surface_order) == 2:
            a, b = self._surface_order
            ta, tb = self._tracks[a], self._tracks[b]
            for tr in (ta, tb):
                tr.swipe_dx = 0.0
                tr.swipe_dy = 0.0
            self._pair = (a, b)
            self._pair_ok = (
                math.hypot(ta.x - tb.x, ta.y - tb.y) >= self.params.swipe_min_separation_cm
            )
            self._pair_rejected = False
        else:
            self._pair = None
            self._pair_ok = False
            self._pair_rejected = False

    def _pair_mid_y(self) -> float:
        assert self._pair is not None
        a, b = self._pair
        return 0.5 * (self._tracks[a].y + self._tracks[b].y)

    def _pair_directions_disagree(self) -> bool:
        assert self._pair is not None
        a, b = self._pair
        ta, tb = self._tracks[a], self._tracks[b]
        na = math.hypot(ta.swipe_dx, ta.swipe_dy)
        nb = math.hypot(tb.swipe_dx, tb.swipe_dy)
        if na < self._DIRECTION_CHECK_CM or nb < self._DIRECTION_CHECK_CM:
            return False
        cos = (ta.swipe_dx * tb.swipe_dx + ta.swipe_dy * tb.swipe_dy) / (na * nb)
        return cos < math.cos(math.radians(self.params.swipe_direction_tolerance_deg))

    # -- observers used by the engine -----------------------------------------

    @property
    def surface_contact_count(self) -> int:
        return len(self._surface_order)

    @property
    def bezel_held(self) -> bool:
        return self._bezel_count > 0


def recognize_gestures(
    events: Iterable[ContactEvent],
    tablet: TabletConfig,
    params: GestureParams | None = None,
) -> list[GestureEvent]:
    """Run a whole contact stream through a fresh recognizer."""
    recognizer = GestureRecognizer(tablet, params)
    out: list[GestureEvent] = []
    for event in events:
        out.extend(recognizer.feed(event))
    return out
