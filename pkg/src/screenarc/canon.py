"""Canonical numeric formatting shared by traces, snapshots and metrics.

Every number that crosses a file or wire boundary is quantized to six
decimal places.  Both the serializers and the config loaders use the same
quantizer, so a live session and a replay of its logged trace operate on
bit-identical floats.
"""

from __future__ import annotations

import json
import math


def q6(x: float) -> float:
    """Quantize to 6 decimal places (the canonical wire resolution)."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value not representable: {x!r}")
    return float(f"{x:.6f}")


def fmt6(x: float) -> str:
    """Fixed 6-decimal rendering used in canonical record lines."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value not representable: {x!r}")
    return f"{x:.6f}"


def canon_json(obj: object) -> str:
    """Compact JSON with all floats pre-quantized to q6.

    Key order is preserved as constructed, so builders define the canonical
    field order.  The output is byte-stable for equal inputs.
    """
    return json.dumps(_quantized(obj), separators=(",", ":"), ensure_ascii=False)


def _quantized(obj: object) -> object:
    if isinstance(obj, float):
        return q6(obj)
    if isinstance(obj, dict):
        return {k: _quantized(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_quantized(v) for v in obj]
    return obj
