"""Scaffold geometry: virtual screens on a cylindrical arc around the user.

World frame: +x forward, +y left, +z up (right-handed), units cm.  Screens
are flat rectangles tangent to a vertical cylinder centered on the anchor
position; the middle column faces the anchor's horizontal forward
direction.  The layout is world-fixed once built: later head movement does
not move the screens.

Screen-local coordinates (u, v) are normalized: (0, 0) is the bottom-left
corner as seen by the user, (1, 1) the top-right, (0.5, 0.5) the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigError
from .vecmath import (
    Quat,
    Vec3,
    IDENTITY_QUAT,
    Z_AXIS,
    qnorm,
    qnormalize,
    qrotate,
    quat_from_yaw,
    vadd,
    vdot,
    vnormalize,
    vscale,
    vsub,
)

CM_PER_INCH = 2.54

# Hard placement bounds, in degrees.
MAX_HORIZONTAL_SPAN_DEG = 190.0
MAX_UP_DEG = 30.0
MAX_DOWN_DEG = 35.0

_RAY_EPS = 1e-9


@dataclass(frozen=True)
class Pose:
    """Position (cm) plus unit orientation quaternion (w, x, y, z).

    The unit-norm check allows 2e-6 of slack: a unit quaternion quantized
    to the 6-decimal wire format can drift by up to 1e-6 in norm.
    Engine-constructed poses are normalized to machine precision.
    """

    position: Vec3 = (0.0, 0.0, 0.0)
    orientation: Quat = IDENTITY_QUAT

    def __post_init__(self) -> None:
        if abs(qnorm(self.orientation) - 1.0) > 2e-6:
            raise ValueError("orientation quaternion must be unit length")

    @classmethod
    def from_raw(cls, position: Vec3, orientation: Quat) -> "Pose":
        """Build a pose, renormalizing a slightly-off-unit quaternion."""
        return cls(position, qnormalize(orientation))

    @property
    def forward(self) -> Vec3:
        return qrotate(self.orientation, (1.0, 0.0, 0.0))

    @property
    def left(self) -> Vec3:
        return qrotate(self.orientation, (0.0, 1.0, 0.0))

    @property
    def up(self) -> Vec3:
        return qrotate(self.orientation, (0.0, 0.0, 1.0))


@dataclass(frozen=True)
class VirtualScreen:
    """One world-fixed screen rectangle."""

    id: int
    center_pose: Pose
    width_cm: float
    height_cm: float
    grid_pos: tuple[int, int]  # (col, row); col 0 leftmost, row 0 topmost

    def __post_init__(self) -> None:
        if self.width_cm <= 0 or self.height_cm <= 0:
            raise ValueError("screen dimensions must be positive")


@dataclass(frozen=True)
class ScreenCoord:
    """A point on (or relative to) a screen.

    ``u``/``v`` are clamped to [0, 1]; ``u_raw``/``v_raw`` keep the
    unclamped values for threshold logic.  ``on_screen`` is true when the
    raw point lies inside the rectangle.
    """

    screen_id: int
    u: float
    v: float
    u_raw: float
    v_raw: float
    on_screen: bool

    @classmethod
    def from_raw(cls, screen_id: int, u_raw: float, v_raw: float) -> "ScreenCoord":
        on = 0.0 <= u_raw <= 1.0 and 0.0 <= v_raw <= 1.0
        return cls(
            screen_id=screen_id,
            u=min(1.0, max(0.0, u_raw)),
            v=min(1.0, max(0.0, v_raw)),
            u_raw=u_raw,
            v_raw=v_raw,
            on_screen=on,
        )


@dataclass(frozen=True)
class LayoutConfig:
    """Parameters of the cylindrical screen arrangement.

    Units: ``diagonal_inch`` in inches, ``radius_cm``/``vertical_gap_cm``
    in cm, ``horizontal_gap_deg`` in degrees.  Aspect ratio is stored as an
    exact integer pair so serialized configs reproduce bit-identical
    layouts.
    """

    screen_count: int = 15
    columns: int = 5
    rows: int = 3
    diagonal_inch: float = 24.0
    aspect_w: int = 16
    aspect_h: int = 9
    radius_cm: float = 90.0
    horizontal_gap_deg: float = 2.0
    vertical_gap_cm: float = 2.0

    def __post_init__(self) -> None:
        if self.screen_count < 1:
            raise ConfigError("screen_count must be >= 1")
        if self.columns < 1 or self.rows < 1:
            raise ConfigError("columns and rows must be >= 1")
        if self.columns * self.rows != self.screen_count:
            raise ConfigError(
                f"columns x rows = {self.columns}x{self.rows} does not equal "
                f"screen_count {self.screen_count}"
            )
        if self.diagonal_inch <= 0 or self.radius_cm <= 0:
            raise ConfigError("diagonal_inch and radius_cm must be positive")
        if self.aspect_w < 1 or self.aspect_h < 1:
            raise ConfigError("aspect ratio components must be >= 1")
        if self.horizontal_gap_deg < 0 or self.vertical_gap_cm < 0:
            raise ConfigError("gaps must be non-negative")

    @classmethod
    def canonical(cls, screen_count: int) -> "LayoutConfig":
        """The two study arrangements: 4 screens as 2x2, 15 as 5x3."""
        if screen_count == 4:
            return cls(screen_count=4, columns=2, rows=2)
        if screen_count == 15:
            return cls(screen_count=15, columns=5, rows=3)
        raise ConfigError(f"no canonical layout for {screen_count} screens")

    @property
    def screen_width_cm(self) -> float:
        diag_cm = self.diagonal_inch * CM_PER_INCH
        hyp = math.hypot(self.aspect_w, self.aspect_h)
        return diag_cm * self.aspect_w / hyp

    @property
    def screen_height_cm(self) -> float:
        diag_cm = self.diagonal_inch * CM_PER_INCH
        hyp = math.hypot(self.aspect_w, self.aspect_h)
        return diag_cm * self.aspect_h / hyp

    @property
    def screen_angular_width_deg(self) -> float:
        """Horizontal angle subtended by one tangent screen at the axis."""
        return math.degrees(2.0 * math.atan(0.5 * self.screen_width_cm / self.radius_cm))

    def horizontal_span_deg(self) -> float:
        aw = self.screen_angular_width_deg
        return self.columns * aw + (self.columns - 1) * self.horizontal_gap_deg

    def vertical_extents_deg(self) -> tuple[float, float]:
        """(up, down) elevation of the highest/lowest screen edge."""
        pitch = self.screen_height_cm + self.vertical_gap_cm
        top = (self.rows - 1) / 2.0 * pitch + 0.5 * self.screen_height_cm
        ang = math.degrees(math.atan(top / self.radius_cm))
        return ang, ang


@dataclass(frozen=True)
class ScaffoldLayout:
    """A built, world-fixed set of screens plus the anchor they face."""

    anchor: Pose
    screens: tuple[VirtualScreen, ...]
    config: LayoutConfig

    def screen(self, screen_id: int) -> VirtualScreen:
        for s in self.screens:
            if s.id == screen_id:
                return s
        raise KeyError(f"no screen with id {screen_id}")

    def at_grid(self, col: int, row: int) -> VirtualScreen | None:
        for s in self.screens:
            if s.grid_pos == (col, row):
                return s
        return None


def screen_axes(screen: VirtualScreen) -> tuple[Vec3, Vec3, Vec3]:
    """Unit (right, up, normal) axes of a screen in world space.

    "Right" means to the right from the viewer's perspective, i.e. the
    direction of increasing u; the normal points from the screen towards
    the viewer.
    """
    pose = screen.center_pose
    normal = pose.forward
    up = pose.up
    # viewer-right: with the screen facing the viewer, u grows along the
    # screen body's +y (which mirrors the viewer's own left axis).
    right = pose.left
    return right, up, normal


def build_layout(config: LayoutConfig, anchor: Pose) -> ScaffoldLayout:
    """Place ``config``'s grid of screens on a cylinder around ``anchor``.

    Raises ConfigError when the arrangement would exceed the placement
    bounds (190 degrees of horizontal span, 30 up / 35 down), naming the
    violated bound.
    """
    span = config.horizontal_span_deg()
    if span > MAX_HORIZONTAL_SPAN_DEG:
        raise ConfigError(
            f"horizontal span {span:.2f} deg exceeds {MAX_HORIZONTAL_SPAN_DEG:.0f} deg"
        )
    up_deg, down_deg = config.vertical_extents_deg()
    if up_deg > MAX_UP_DEG:
        raise ConfigError(f"vertical span {up_deg:.2f} deg up exceeds {MAX_UP_DEG:.0f} deg")
    if down_deg > MAX_DOWN_DEG:
        raise ConfigError(
            f"vertical span {down_deg:.2f} deg down exceeds {MAX_DOWN_DEG:.0f} deg"
        )

    fwd = anchor.forward
    yaw0 = math.atan2(fwd[1], fwd[0])
    width = config.screen_width_cm
    height = config.screen_height_cm
    pitch_deg = config.screen_angular_width_deg + config.horizontal_gap_deg
    pitch_z = height + config.vertical_gap_cm
    radius = config.radius_cm

    screens: list[VirtualScreen] = []
    for row in range(config.rows):
        z_off = ((config.rows - 1) / 2.0 - row) * pitch_z
        for col in range(config.columns):
            azimuth = yaw0 + math.radians(((config.columns - 1) / 2.0 - col) * pitch_deg)
            radial = (math.cos(azimuth), math.sin(azimuth), 0.0)
            center = vadd(vadd(anchor.position, vscale(radial, radius)), (0.0, 0.0, z_off))
            # screen faces back towards the cylinder axis
            orientation = quat_from_yaw(azimuth + math.pi)
            screens.append(
                VirtualScreen(
                    id=row * config.columns + col,
                    center_pose=Pose(center, qnormalize(orientation)),
                    width_cm=width,
                    height_cm=height,
                    grid_pos=(col, row),
                )
            )
    return ScaffoldLayout(anchor=anchor, screens=tuple(screens), config=config)


def screen_to_world(screen: VirtualScreen, u: float, v: float) -> Vec3:
    """World position of normalized screen point (u, v).

    u and v may lie outside [0, 1]; the affine map extends past the edges.
    """
    right, up, _ = screen_axes(screen)
    du = (u - 0.5) * screen.width_cm
    dv = (v - 0.5) * screen.height_cm
    return vadd(screen.center_pose.position, vadd(vscale(right, du), vscale(up, dv)))


def plane_hit(
    screen: VirtualScreen, origin: Vec3, direction: Vec3
) -> tuple[float, float, float] | None:
    """Intersect a ray with a screen's (infinite) plane.

    Returns (t, u_raw, v_raw) with t the positive ray parameter, or None
    when the ray is parallel to or points away from the plane.
    """
    right, up, normal = screen_axes(screen)
    denom = vdot(direction, normal)
    if abs(denom) < _RAY_EPS:
        return None
    t = vdot(vsub(screen.center_pose.position, origin), normal) / denom
    if t <= _RAY_EPS:
        return None
    point = vadd(origin, vscale(direction, t))
    rel = vsub(point, screen.center_pose.position)
    u_raw = vdot(rel, right) / screen.width_cm + 0.5
    v_raw = vdot(rel, up) / screen.height_cm + 0.5
    return t, u_raw, v_raw


def gaze_hit(layout: ScaffoldLayout, origin: Vec3, direction: Vec3) -> ScreenCoord | None:
    """Nearest screen rectangle hit by a gaze ray, or None.

    ``direction`` must be a unit vector (checked to 1e-6); degenerate rays
    raise ValueError.
    """
    n = math.sqrt(vdot(direction, direction))
    if n == 0.0:
        raise ValueError("gaze direction must be non-zero")
    if abs(n - 1.0) > 1e-6:
        raise ValueError("gaze direction must be unit length")

    best: tuple[float, VirtualScreen, float, float] | None = None
    for screen in layout.screens:
        hit = plane_hit(screen, origin, direction)
        if hit is None:
            continue
        t, u_raw, v_raw = hit
        if not (0.0 <= u_raw <= 1.0 and 0.0 <= v_raw <= 1.0):
            continue
        if best is None or t < best[0]:
            best = (t, screen, u_raw, v_raw)
    if best is None:
        return None
    _, screen, u_raw, v_raw = best
    return ScreenCoord.from_raw(screen.id, u_raw, v_raw)
