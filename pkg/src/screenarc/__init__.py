"""screenarc: a deterministic engine for tablet-driven virtual screen work.

Virtual screens sit on a cylindrical arc around the user with optional
depth layers behind the physical tablet.  Input routing supports a
bimanual (bezel-clutched) technique and a gaze+touch technique, replayed
from canonical traces or driven live over a WebSocket session protocol.
"""

from .config import SessionConfig, TaskConfig, TaskKind, load_config, parse_config
from .engine import Engine, replay
from .errors import (
    CapacityError,
    ConfigError,
    EngineError,
    ProtocolError,
    SceneError,
    TraceError,
)
from .geometry import (
    LayoutConfig,
    Pose,
    ScaffoldLayout,
    ScreenCoord,
    VirtualScreen,
    build_layout,
    gaze_hit,
    screen_to_world,
)
from .inputs import (
    BezelHold,
    Command,
    ContactEvent,
    GazeSample,
    GestureParams,
    GestureRecognizer,
    HeadPoseEvent,
    LongPress,
    Region,
    TabletConfig,
    TwoFingerSwipe,
    classify_contact,
)
from .layers import (
    LayerStack,
    PeekParams,
    ViewMode,
    explosion_layout,
    make_stack,
    parallax_offset,
    peek_active,
    select_layer,
    show_all,
    swipe_layers,
    toggle_visibility,
)
from .routing import (
    ClutchMode,
    Item,
    ItemGrabbed,
    ItemReleased,
    Mode,
    RouterState,
    ScreenSwitched,
    Technique,
    TechniqueParams,
    TechniqueVariant,
    initial_state,
    retarget,
    step,
)
from .tasks import (
    GridSpec,
    PuzzleSpec,
    TransferBlock,
    TransferTrial,
    TrialMetrics,
    balanced_latin_square,
    gen_puzzle_spec,
    gen_transfer_block,
    score_puzzle,
    score_transfer,
    snap_to_grid,
)
from .traceio import InputTrace, parse_trace, serialize_trace

__version__ = "0.1.0"
