"""Depth-extruded layer stack behind the physical screen.

Layers sit 2.5 cm apart (aligned mode).  Selecting layer i aligns it with
the screen plane: everything in front of it becomes transparent and layer
j renders at (j - i) * spacing behind the screen.  Flat mode (the baseline
visualization) renders every layer at depth 0 with full opacity.

Swipe navigation uses the same 2 cm quantum as coarse screen switching.
Within one two-finger gesture the stack tracks the swipe's running total
and derives the active index from it, so the final index depends only on
the summed displacement, never on how the motion was chopped into events.
The residual (total modulo quantum) is exposed as the accumulator and is
cleared when a clamp at either end occurs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import CapacityError
from .geometry import VirtualScreen, screen_axes
from .vecmath import Vec3, vadd, vscale

DEFAULT_SPACING_CM = 2.5
DEFAULT_SWIPE_CM_PER_LAYER = 2.0
PEEK_RELEASE_HYSTERESIS_CM = 1.0


class ViewMode(str, Enum):
    ALIGNED = "aligned"
    FLAT = "flat"
    EXPLOSION = "explosion"
    PARALLAX = "parallax"


@dataclass(frozen=True)
class Layer:
    index: int
    visible: bool = True
    content: object = None


@dataclass(frozen=True)
class LayerView:
    """Rendering instructions for one layer."""

    index: int
    z_cm: float
    visible: bool
    transparent: bool


@dataclass(frozen=True)
class PeekParams:
    lean_threshold_cm: float = 10.0
    parallax_gain: float = 3.0
    explosion_radius_cm: float = 40.0
    viewing_distance_cm: float = 50.0

    def __post_init__(self) -> None:
        if (
            min(
                self.lean_threshold_cm,
                self.parallax_gain,
                self.explosion_radius_cm,
                self.viewing_distance_cm,
            )
            <= 0
        ):
            raise ValueError("peek parameters must be positive")


@dataclass(frozen=True)
class LayerStack:
    layers: tuple[Layer, ...]
    active_index: int = 0
    spacing_cm: float = DEFAULT_SPACING_CM
    swipe_cm_per_layer: float = DEFAULT_SWIPE_CM_PER_LAYER
    view_mode: ViewMode = ViewMode.ALIGNED
    collapsed: bool = False  # transient flat view set by show_all
    # swipe episode state: active = clamp(base + trunc(total / quantum))
    swipe_base_index: int = 0
    swipe_total_cm: float = 0.0
    parallax_gain: float = 3.0

    def __post_init__(self) -> None:
        if not self.layers:
            raise ValueError("stack requires at least one layer")
        if [layer.index for layer in self.layers] != list(range(len(self.layers))):
            raise ValueError("layer indices must be contiguous from 0")
        if not 0 <= self.active_index < len(self.layers):
            raise ValueError("active_index out of range")
        if self.spacing_cm <= 0 or self.swipe_cm_per_layer <= 0:
            raise ValueError("spacing and swipe quantum must be positive")

    @property
    def swipe_accum_cm(self) -> float:
        """Residual displacement below one quantum, in (-q, q)."""
        return math.fmod(self.swipe_total_cm, self.swipe_cm_per_layer)

    def base_offsets(self) -> tuple[float, ...]:
        """Stack-frame z of each layer (index * spacing), behind-screen positive."""
        return tuple(layer.index * self.spacing_cm for layer in self.layers)

    def rendered(self) -> tuple[LayerView, ...]:
        """Per-layer depth and transparency under the current view."""
        flat = self.view_mode is ViewMode.FLAT or self.collapsed
        views = []
        for layer in self.layers:
            if flat or self.view_mode is ViewMode.EXPLOSION:
                z = 0.0
                transparent = False
            else:
                z = (layer.index - self.active_index) * self.spacing_cm
                transparent = layer.index < self.active_index
            views.append(
                LayerView(
                    index=layer.index, z_cm=z, visible=layer.visible, transparent=transparent
                )
            )
        return tuple(views)


def make_stack(
    count: int,
    spacing_cm: float = DEFAULT_SPACING_CM,
    swipe_cm_per_layer: float = DEFAULT_SWIPE_CM_PER_LAYER,
    view_mode: ViewMode = ViewMode.ALIGNED,
) -> LayerStack:
    return LayerStack(
        layers=tuple(Layer(index=i) for i in range(count)),
        spacing_cm=spacing_cm,
        swipe_cm_per_layer=swipe_cm_per_layer,
        view_mode=view_mode,
    )


def swipe_layers(stack: LayerStack, delta_cm: float) -> LayerStack:
    """Apply an incremental swipe; positive delta moves deeper (higher index)."""
    total = stack.swipe_total_cm + delta_cm
    steps = int(total / stack.swipe_cm_per_layer)  # trunc toward zero
    target = stack.swipe_base_index + steps
    last = len(stack.layers) - 1
    clamped = min(max(target, 0), last)
    if target != clamped:
        # ran past an end: land there and drop the residual
        return replace(
            stack, active_index=clamped, swipe_base_index=clamped, swipe_total_cm=0.0
        )
    return replace(stack, active_index=clamped, swipe_total_cm=total)


def end_swipe_episode(stack: LayerStack) -> LayerStack:
    """Reset the swipe accumulator (two-finger gesture ended)."""
    return replace(stack, swipe_base_index=stack.active_index, swipe_total_cm=0.0)


def _check_index(stack: LayerStack, i: int) -> None:
    if not 0 <= i < len(stack.layers):
        raise IndexError(f"layer index {i} out of range 0..{len(stack.layers) - 1}")


def select_layer(stack: LayerStack, i: int) -> LayerStack:
    """Align layer i with the screen plane (direct selection)."""
    _check_index(stack, i)
    return replace(
        stack, active_index=i, collapsed=False, swipe_base_index=i, swipe_total_cm=0.0
    )


def toggle_visibility(stack: LayerStack, i: int) -> LayerStack:
    _check_index(stack, i)
    layers = tuple(
        replace(layer, visible=not layer.visible) if layer.index == i else layer
        for layer in stack.layers
    )
    return replace(stack, layers=layers)


def show_all(stack: LayerStack) -> LayerStack:
    """Collapse to a single depth and make every layer visible."""
    layers = tuple(replace(layer, visible=True) for layer in stack.layers)
    return replace(stack, layers=layers, collapsed=True)


@dataclass(frozen=True)
class Placement:
    """Explosion-diagram slot for one layer, coplanar with the screen."""

    layer_index: int
    offset_x_cm: float  # in-plane, along the screen's right axis
    offset_y_cm: float  # in-plane, along the screen's up axis
    width_cm: float
    height_cm: float

    def world_center(self, screen: VirtualScreen) -> Vec3:
        right, up, _ = screen_axes(screen)
        return vadd(
            screen.center_pose.position,
            vadd(vscale(right, self.offset_x_cm), vscale(up, self.offset_y_cm)),
        )


def _slots(n: int, semi_x: float, semi_y: float) -> list[tuple[float, float]]:
    # slot 0 straight above the screen, the rest counterclockwise
    out = []
    for i in range(n):
        ang = 0.5 * math.pi + 2.0 * math.pi * i / n
        out.append((semi_x * math.cos(ang), semi_y * math.sin(ang)))
    return out


def _rects_disjoint(
    a: tuple[float, float, float, float], b: tuple[float, float, float, float]
) -> bool:
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    return abs(ax - bx) >= 0.5 * (aw + bw) or abs(ay - by) >= 0.5 * (ah + bh)


def _explosion_fits(
    n: int, w: float, h: float, semi_x: float, semi_y: float
) -> list[tuple[float, float]] | None:
    slots = _slots(n, semi_x, semi_y)
    rects = [(x, y, w, h) for x, y in slots]
    center = (0.0, 0.0, w, h)
    for i, rect in enumerate(rects):
        if not _rects_disjoint(rect, center):
            return None
        for other in rects[i + 1 :]:
            if not _rects_disjoint(rect, other):
                return None
    return slots


def explosion_layout(
    stack: LayerStack, physical_screen: VirtualScreen, params: PeekParams
) -> list[Placement]:
    """Scatter all layers on a ring around the physical screen.

    The ring is stretched to the screen's aspect ratio so landscape
    content gets proportionate horizontal clearance.  Raises CapacityError
    (reporting the maximum that fits) when the requested layer count
    cannot be placed without overlap.
    """
    w, h = physical_screen.width_cm, physical_screen.height_cm
    radius = params.explosion_radius_cm
    semi_x = radius * max(1.0, w / h)
    semi_y = radius * max(1.0, h / w)
    n = len(stack.layers)

    slots = _explosion_fits(n, w, h, semi_x, semi_y)
    if slots is None:
        max_fit = 0
        for m in range(n - 1, 0, -1):
            if _explosion_fits(m, w, h, semi_x, semi_y) is not None:
                max_fit = m
                break
        raise CapacityError(
            f"{n} layers exceed the explosion ring capacity "
            f"(at most {max_fit} fit at radius {radius:g} cm)",
            max_supported=max_fit,
        )
    return [
        Placement(
            layer_index=layer.index,
            offset_x_cm=slots[layer.index][0],
            offset_y_cm=slots[layer.index][1],
            width_cm=w,
            height_cm=h,
        )
        for layer in stack.layers
    ]


def parallax_offset(
    head_offset_lateral_cm: float,
    layer_z_cm: float,
    gain: float,
    viewing_distance_cm: float = 50.0,
) -> float:
    """Amplified lateral shift of a layer under sideways head motion.

    shift = gain * head_offset * (layer_z / viewing_distance); gain 1
    reproduces the natural small-angle parallax ratio.
    """
    if viewing_distance_cm <= 0:
        raise ValueError("viewing distance must be positive")
    return gain * head_offset_lateral_cm * (layer_z_cm / viewing_distance_cm)


def peek_active(
    head, anchor, params: PeekParams, was_active: bool = False
) -> bool:
    """Lean-to-peek latch: forward lean past the threshold activates,
    with 1 cm of release hysteresis."""
    disp = head.position
    rel = (
        disp[0] - anchor.position[0],
        disp[1] - anchor.position[1],
        disp[2] - anchor.position[2],
    )
    fwd = anchor.forward
    lean = rel[0] * fwd[0] + rel[1] * fwd[1] + rel[2] * fwd[2]
    if was_active:
        return lean > params.lean_threshold_cm - PEEK_RELEASE_HYSTERESIS_CM
    return lean >= params.lean_threshold_cm
