"""Session configuration: INI-style config files and trace headers.

The config file is human-editable key/value text (configparser syntax).
Units: lengths in cm, angles in degrees, times in seconds, the screen
diagonal in inches.  Every float is quantized to the 6-decimal wire
resolution on load so a session and the replay of its serialized trace
compute on identical numbers.

A trace header is the flat, prefixed form of the same data; see
``to_header`` / ``from_header``.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from enum import Enum

from .canon import q6
from .errors import ConfigError
from .geometry import LayoutConfig, Pose
from .inputs import GestureParams, TabletConfig
from .layers import PeekParams, ViewMode
from .routing import ClutchMode, Technique, TechniqueParams, TechniqueVariant
from .vecmath import qnormalize


class TaskKind(str, Enum):
    NONE = "none"
    TRANSFER = "transfer"
    PUZZLE = "puzzle"


@dataclass(frozen=True)
class TaskConfig:
    kind: TaskKind = TaskKind.NONE
    screens: int = 15  # transfer block layout kind
    layers: int = 10  # puzzle layer count
    seed: int | None = None  # defaults to the session seed
    spec_path: str | None = None  # optional pre-generated task spec file
    spec_text: str | None = None  # embedded spec (used by trace headers)


@dataclass(frozen=True)
class LayersConfig:
    count: int = 0  # 0 = no layer stack (unless a puzzle task creates one)
    spacing_cm: float = 2.5
    swipe_cm_per_layer: float = 2.0
    view: ViewMode = ViewMode.ALIGNED

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ConfigError("layer count must be non-negative")
        if self.view not in (ViewMode.ALIGNED, ViewMode.FLAT):
            raise ConfigError("session view mode must be aligned or flat")


@dataclass(frozen=True)
class SessionConfig:
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    tablet: TabletConfig = field(default_factory=TabletConfig)
    technique: Technique = field(
        default_factory=lambda: Technique(TechniqueVariant.GAZE_TOUCH)
    )
    gestures: GestureParams = field(default_factory=GestureParams)
    layers: LayersConfig = field(default_factory=LayersConfig)
    peek: PeekParams = field(default_factory=PeekParams)
    task: TaskConfig = field(default_factory=TaskConfig)
    seed: int = 0
    anchor: Pose = field(default_factory=Pose)

    @property
    def task_seed(self) -> int:
        return self.seed if self.task.seed is None else self.task.seed


_SESSION_KEYS = {
    "seed",
    "technique",
    "clutch",
    "anchor_px",
    "anchor_py",
    "anchor_pz",
    "anchor_qw",
    "anchor_qx",
    "anchor_qy",
    "anchor_qz",
}
_LAYOUT_KEYS = {
    "screen_count",
    "columns",
    "rows",
    "diagonal_inch",
    "aspect_w",
    "aspect_h",
    "radius_cm",
    "horizontal_gap_deg",
    "vertical_gap_cm",
}
_TABLET_KEYS = {"active_width_cm", "active_height_cm", "bezel_width_cm"}
_TECHNIQUE_KEYS = {
    "fine_gain",
    "coarse_cm_per_screen",
    "gaze_spatial_threshold_frac",
    "gaze_temporal_threshold_s",
}
_GESTURE_KEYS = {
    "long_press_s",
    "movement_tolerance_cm",
    "swipe_min_separation_cm",
    "swipe_direction_tolerance_deg",
}
_LAYERS_KEYS = {"count", "spacing_cm", "swipe_cm_per_layer", "view"}
_PEEK_KEYS = {
    "lean_threshold_cm",
    "parallax_gain",
    "explosion_radius_cm",
    "viewing_distance_cm",
}
_TASK_KEYS = {"kind", "screens", "layers", "seed", "spec"}


class _Section:
    def __init__(self, name: str, values: dict[str, str], allowed: set[str]):
        unknown = set(values) - allowed
        if unknown:
            raise ConfigError(f"unknown key(s) in [{name}]: {', '.join(sorted(unknown))}")
        self.name = name
        self.values = values

    def get_int(self, key: str, default: int) -> int:
        if key not in self.values:
            return default
        try:
            return int(self.values[key])
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} must be an integer") from None

    def get_float(self, key: str, default: float) -> float:
        if key not in self.values:
            return default
        try:
            return q6(float(self.values[key]))
        except ValueError:
            raise ConfigError(f"[{self.name}] {key} must be a number") from None

    def get_str(self, key: str, default: str) -> str:
        return self.values.get(key, default)


def parse_config(text: str, overrides: dict[str, str] | None = None) -> SessionConfig:
    """Parse INI config text; ``overrides`` maps "section.key" to values
    (the CLI's --set flags) and is applied on top of the file."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config syntax: {exc}") from None
    for dotted, value in (overrides or {}).items():
        section, _, key = dotted.partition(".")
        if not section or not key:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)

    allowed_sections = {
        "session": _SESSION_KEYS,
        "layout": _LAYOUT_KEYS,
        "tablet": _TABLET_KEYS,
        "technique": _TECHNIQUE_KEYS,
        "gestures": _GESTURE_KEYS,
        "layers": _LAYERS_KEYS,
        "peek": _PEEK_KEYS,
        "task": _TASK_KEYS,
    }
    sections: dict[str, _Section] = {}
    for name in parser.sections():
        if name not in allowed_sections:
            raise ConfigError(f"unknown config section [{name}]")
        sections[name] = _Section(name, dict(parser[name]), allowed_sections[name])
    for name, allowed in allowed_sections.items():
        sections.setdefault(name, _Section(name, {}, allowed))

    ses = sections["session"]
    lay = sections["layout"]
    tab = sections["tablet"]
    tec = sections["technique"]
    ges = sections["gestures"]
    lyr = sections["layers"]
    pek = sections["peek"]
    tsk = sections["task"]

    try:
        variant = TechniqueVariant(ses.get_str("technique", "gaze_touch"))
        clutch = ClutchMode(ses.get_str("clutch", "study"))
        view = ViewMode(lyr.get_str("view", "aligned"))
        kind = TaskKind(tsk.get_str("kind", "none"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    anchor = Pose(
        position=(
            ses.get_float("anchor_px", 0.0),
            ses.get_float("anchor_py", 0.0),
            ses.get_float("anchor_pz", 0.0),
        ),
        orientation=qnormalize(
            (
                ses.get_float("anchor_qw", 1.0),
                ses.get_float("anchor_qx", 0.0),
                ses.get_float("anchor_qy", 0.0),
                ses.get_float("anchor_qz", 0.0),
            )
        ),
    )

    defaults = SessionConfig()
    try:
        config = SessionConfig(
            layout=LayoutConfig(
                screen_count=lay.get_int("screen_count", 15),
                columns=lay.get_int("columns", 5),
                rows=lay.get_int("rows", 3),
                diagonal_inch=lay.get_float("diagonal_inch", 24.0),
                aspect_w=lay.get_int("aspect_w", 16),
                aspect_h=lay.get_int("aspect_h", 9),
                radius_cm=lay.get_float("radius_cm", 90.0),
                horizontal_gap_deg=lay.get_float("horizontal_gap_deg", 2.0),
                vertical_gap_cm=lay.get_float("vertical_gap_cm", 2.0),
            ),
            tablet=TabletConfig(
                active_width_cm=tab.get_float(
                    "active_width_cm", defaults.tablet.active_width_cm
                ),
                active_height_cm=tab.get_float(
                    "active_height_cm", defaults.tablet.active_height_cm
                ),
                bezel_width_cm=tab.get_float("bezel_width_cm", 2.0),
            ),
            technique=Technique(
                variant=variant,
                params=TechniqueParams(
                    fine_gain=tec.get_float("fine_gain", 1.0),
                    coarse_cm_per_screen=tec.get_float("coarse_cm_per_screen", 2.0),
                    gaze_spatial_threshold_frac=tec.get_float(
                        "gaze_spatial_threshold_frac", 0.05
                    ),
                    gaze_temporal_threshold_s=tec.get_float(
                        "gaze_temporal_threshold_s", 0.0
                    ),
                    clutch_mode=clutch,
                ),
            ),
            gestures=GestureParams(
                long_press_s=ges.get_float("long_press_s", 0.5),
                movement_tolerance_cm=ges.get_float("movement_tolerance_cm", 0.3),
                swipe_min_separation_cm=ges.get_float("swipe_min_separation_cm", 1.0),
                swipe_direction_tolerance_deg=ges.get_float(
                    "swipe_direction_tolerance_deg", 45.0
                ),
            ),
            layers=LayersConfig(
                count=lyr.get_int("count", 0),
                spacing_cm=lyr.get_float("spacing_cm", 2.5),
                swipe_cm_per_layer=lyr.get_float("swipe_cm_per_layer", 2.0),
                view=view,
            ),
            peek=PeekParams(
                lean_threshold_cm=pek.get_float("lean_threshold_cm", 10.0),
                parallax_gain=pek.get_float("parallax_gain", 3.0),
                explosion_radius_cm=pek.get_float("explosion_radius_cm", 40.0),
                viewing_distance_cm=pek.get_float("viewing_distance_cm", 50.0),
            ),
            task=TaskConfig(
                kind=kind,
                screens=tsk.get_int("screens", 15),
                layers=tsk.get_int("layers", 10),
                seed=tsk.get_int("seed", -1) if "seed" in tsk.values else None,
                spec_path=tsk.get_str("spec", "") or None,
            ),
            seed=ses.get_int("seed", 0),
        )
    except (ValueError, ConfigError) as exc:
        raise ConfigError(str(exc)) from None
    return replace(config, anchor=anchor)


def load_config(path: str, overrides: dict[str, str] | None = None) -> SessionConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read(), overrides)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None


# -- trace header mapping --------------------------------------------------------

# key order is the canonical serialization order
HEADER_KEYS: tuple[str, ...] = (
    "seed",
    "technique",
    "clutch",
    "anchor_px",
    "anchor_py",
    "anchor_pz",
    "anchor_qw",
    "anchor_qx",
    "anchor_qy",
    "anchor_qz",
    "fine_gain",
    "coarse_cm_per_screen",
    "gaze_spatial_threshold_frac",
    "gaze_temporal_threshold_s",
    "long_press_s",
    "movement_tolerance_cm",
    "swipe_min_separation_cm",
    "swipe_direction_tolerance_deg",
    "layout_screen_count",
    "layout_columns",
    "layout_rows",
    "layout_diagonal_inch",
    "layout_aspect_w",
    "layout_aspect_h",
    "layout_radius_cm",
    "layout_horizontal_gap_deg",
    "layout_vertical_gap_cm",
    "tablet_active_width_cm",
    "tablet_active_height_cm",
    "tablet_bezel_width_cm",
    "layers_count",
    "layers_spacing_cm",
    "layers_swipe_cm_per_layer",
    "layers_view",
    "peek_lean_threshold_cm",
    "peek_parallax_gain",
    "peek_explosion_radius_cm",
    "peek_viewing_distance_cm",
    "task_kind",
    "task_screens",
    "task_layers",
    "task_seed",
    "task_spec",
)


def to_header(config: SessionConfig) -> dict[str, object]:
    """Flat, canonical-order mapping carrying the full effective config."""
    t = config.technique
    values: dict[str, object] = {
        "seed": config.seed,
        "technique": t.variant.value,
        "clutch": t.params.clutch_mode.value,
        "anchor_px": float(config.anchor.position[0]),
        "anchor_py": float(config.anchor.position[1]),
        "anchor_pz": float(config.anchor.position[2]),
        "anchor_qw": float(config.anchor.orientation[0]),
        "anchor_qx": float(config.anchor.orientation[1]),
        "anchor_qy": float(config.anchor.orientation[2]),
        "anchor_qz": float(config.anchor.orientation[3]),
        "fine_gain": t.params.fine_gain,
        "coarse_cm_per_screen": t.params.coarse_cm_per_screen,
        "gaze_spatial_threshold_frac": t.params.gaze_spatial_threshold_frac,
        "gaze_temporal_threshold_s": t.params.gaze_temporal_threshold_s,
        "long_press_s": config.gestures.long_press_s,
        "movement_tolerance_cm": config.gestures.movement_tolerance_cm,
        "swipe_min_separation_cm": config.gestures.swipe_min_separation_cm,
        "swipe_direction_tolerance_deg": config.gestures.swipe_direction_tolerance_deg,
        "layout_screen_count": config.layout.screen_count,
        "layout_columns": config.layout.columns,
        "layout_rows": config.layout.rows,
        "layout_diagonal_inch": config.layout.diagonal_inch,
        "layout_aspect_w": config.layout.aspect_w,
        "layout_aspect_h": config.layout.aspect_h,
        "layout_radius_cm": config.layout.radius_cm,
        "layout_horizontal_gap_deg": config.layout.horizontal_gap_deg,
        "layout_vertical_gap_cm": config.layout.vertical_gap_cm,
        "tablet_active_width_cm": config.tablet.active_width_cm,
        "tablet_active_height_cm": config.tablet.active_height_cm,
        "tablet_bezel_width_cm": config.tablet.bezel_width_cm,
        "layers_count": config.layers.count,
        "layers_spacing_cm": config.layers.spacing_cm,
        "layers_swipe_cm_per_layer": config.layers.swipe_cm_per_layer,
        "layers_view": config.layers.view.value,
        "peek_lean_threshold_cm": config.peek.lean_threshold_cm,
        "peek_parallax_gain": config.peek.parallax_gain,
        "peek_explosion_radius_cm": config.peek.explosion_radius_cm,
        "peek_viewing_distance_cm": config.peek.viewing_distance_cm,
        "task_kind": config.task.kind.value,
        "task_screens": config.task.screens,
        "task_layers": config.task.layers,
        "task_seed": config.task_seed,
        "task_spec": config.task.spec_text,
    }
    header = {key: values[key] for key in HEADER_KEYS}
    if header["task_spec"] is None and config.task.spec_path is None:
        del header["task_spec"]
    return header


def from_header(header: dict[str, object]) -> SessionConfig:
    """Rebuild the session config from a complete trace header."""

    def need(key: str) -> object:
        if key not in header:
            raise ConfigError(f"trace header missing {key!r}")
        return header[key]

    def num(key: str) -> float:
        return q6(float(need(key)))  # type: ignore[arg-type]

    try:
        technique = Technique(
            variant=TechniqueVariant(str(need("technique"))),
            params=TechniqueParams(
                fine_gain=num("fine_gain"),
                coarse_cm_per_screen=num("coarse_cm_per_screen"),
                gaze_spatial_threshold_frac=num("gaze_spatial_threshold_frac"),
                gaze_temporal_threshold_s=num("gaze_temporal_threshold_s"),
                clutch_mode=ClutchMode(str(need("clutch"))),
            ),
        )
        task_seed = int(need("task_seed"))  # type: ignore[arg-type]
        config = SessionConfig(
            layout=LayoutConfig(
                screen_count=int(need("layout_screen_count")),  # type: ignore[arg-type]
                columns=int(need("layout_columns")),  # type: ignore[arg-type]
                rows=int(need("layout_rows")),  # type: ignore[arg-type]
                diagonal_inch=num("layout_diagonal_inch"),
                aspect_w=int(need("layout_aspect_w")),  # type: ignore[arg-type]
                aspect_h=int(need("layout_aspect_h")),  # type: ignore[arg-type]
                radius_cm=num("layout_radius_cm"),
                horizontal_gap_deg=num("layout_horizontal_gap_deg"),
                vertical_gap_cm=num("layout_vertical_gap_cm"),
            ),
            tablet=TabletConfig(
                active_width_cm=num("tablet_active_width_cm"),
                active_height_cm=num("tablet_active_height_cm"),
                bezel_width_cm=num("tablet_bezel_width_cm"),
            ),
            technique=technique,
            gestures=GestureParams(
                long_press_s=num("long_press_s"),
                movement_tolerance_cm=num("movement_tolerance_cm"),
                swipe_min_separation_cm=num("swipe_min_separation_cm"),
                swipe_direction_tolerance_deg=num("swipe_direction_tolerance_deg"),
            ),
            layers=LayersConfig(
                count=int(need("layers_count")),  # type: ignore[arg-type]
                spacing_cm=num("layers_spacing_cm"),
                swipe_cm_per_layer=num("layers_swipe_cm_per_layer"),
                view=ViewMode(str(need("layers_view"))),
            ),
            peek=PeekParams(
                lean_threshold_cm=num("peek_lean_threshold_cm"),
                parallax_gain=num("peek_parallax_gain"),
                explosion_radius_cm=num("peek_explosion_radius_cm"),
                viewing_distance_cm=num("peek_viewing_distance_cm"),
            ),
            task=TaskConfig(
                kind=TaskKind(str(need("task_kind"))),
                screens=int(need("task_screens")),  # type: ignore[arg-type]
                layers=int(need("task_layers")),  # type: ignore[arg-type]
                seed=task_seed,
                spec_text=(
                    str(header["task_spec"]) if header.get("task_spec") is not None else None
                ),
            ),
            seed=int(need("seed")),  # type: ignore[arg-type]
            anchor=Pose(
                position=(num("anchor_px"), num("anchor_py"), num("anchor_pz")),
                orientation=(
                    num("anchor_qw"),
                    num("anchor_qx"),
                    num("anchor_qy"),
                    num("anchor_qz"),
                ),
            ),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid trace header: {exc}") from None
    return config


def check_header_matches(config: SessionConfig, header: dict[str, object]) -> None:
    """Cross-check a trace header against a config; raises on any conflict."""
    expected = to_header(config)
    for key, value in header.items():
        if key not in expected:
            raise ConfigError(f"unknown header key {key!r}")
        want = expected[key]
        if isinstance(want, float) or isinstance(value, float):
            if q6(float(value)) != q6(float(want)):  # type: ignore[arg-type]
                raise ConfigError(
                    f"header {key}={value!r} conflicts with config value {want!r}"
                )
        elif value != want:
            raise ConfigError(
                f"header {key}={value!r} conflicts with config value {want!r}"
            )
