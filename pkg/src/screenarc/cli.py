"""Command-line front door.

Subcommands: replay, gen-task, latin-square, serve, export.
Exit codes: 0 success, 2 config error, 3 trace error, 4 protocol error.
"""

from __future__ import annotations

import argparse
import string
import sys
from pathlib import Path

from .config import load_config, parse_config
from .engine import replay
from .errors import ConfigError, EngineError, ProtocolError, TraceError
from .tasks import (
    balanced_latin_square,
    gen_puzzle_spec,
    gen_transfer_block,
    metrics_to_csv,
    metrics_to_records,
    parse_metrics,
    serialize_puzzle_spec,
    serialize_transfer_block,
)
from .traceio import parse_trace


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="screenarc",
        description="Deterministic engine for tablet-driven virtual screen sessions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    set_help = "override a config key, e.g. --set technique.fine_gain=2.0 (repeatable)"

    p_replay = sub.add_parser("replay", help="replay a trace headlessly")
    p_replay.add_argument("--trace", required=True, help="trace file")
    p_replay.add_argument(
        "--config", help="session config (cross-checked against the trace header)"
    )
    p_replay.add_argument("--set", dest="overrides", action="append", default=[], help=set_help)
    p_replay.add_argument("--out", help="write metrics records here")
    p_replay.add_argument("--snapshot-out", help="write the final snapshot (JSON) here")

    p_gen = sub.add_parser("gen-task", help="generate a task specification")
    gen_sub = p_gen.add_subparsers(dest="task", required=True)
    p_tr = gen_sub.add_parser("transfer", help="content transfer block (32 trials)")
    p_tr.add_argument("--screens", type=int, choices=(4, 15), required=True)
    p_tr.add_argument("--seed", type=int, required=True)
    p_tr.add_argument("--out", help="output file (default stdout)")
    p_pz = gen_sub.add_parser("puzzle", help="layered puzzle specification")
    p_pz.add_argument("--layers", type=int, choices=(4, 10), required=True)
    p_pz.add_argument("--seed", type=int, required=True)
    p_pz.add_argument("--out", help="output file (default stdout)")

    p_ls = sub.add_parser("latin-square", help="balanced condition orderings")
    p_ls.add_argument("--n", type=int, required=True, help="condition count (even)")

    p_serve = sub.add_parser("serve", help="run the live session server")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--set", dest="overrides", action="append", default=[], help=set_help)
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--frontend", help="static frontend directory to serve at /")

    p_export = sub.add_parser("export", help="convert metrics records")
    p_export.add_argument("--metrics", required=True, help="metrics records file")
    p_export.add_argument("--format", choices=("csv", "records"), required=True)
    p_export.add_argument("--out", help="output file (default stdout)")
    return parser


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _overrides(args: argparse.Namespace) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in getattr(args, "overrides", []):
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set {item!r} must look like section.key=value")
        out[key.strip()] = value.strip()
    return out


def _cmd_replay(args: argparse.Namespace) -> int:
    try:
        trace_text = Path(args.trace).read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceError(f"cannot read trace: {exc}") from None
    trace = parse_trace(trace_text)
    overrides = _overrides(args)
    if args.config:
        config = load_config(args.config, overrides)
    elif overrides:
        config = parse_config("", overrides)
    else:
        config = None
    snapshot, metrics, engine = replay(trace, config)
    if args.out:
        _write(args.out, metrics_to_records(metrics))
    if args.snapshot_out:
        _write(args.snapshot_out, engine.snapshot_json() + "\n")
    sys.stdout.write(
        f"replayed {len(trace.events)} events: revision {snapshot['revision']}, "
        f"{len(metrics)} trial(s) scored\n"
    )
    return 0


def _cmd_gen_task(args: argparse.Namespace) -> int:
    if args.task == "transfer":
        block = gen_transfer_block(args.screens, args.seed)
        _write(args.out, serialize_transfer_block(block))
    else:
        spec = gen_puzzle_spec(args.layers, args.seed)
        _write(args.out, serialize_puzzle_spec(spec))
    return 0


def _cmd_latin_square(args: argparse.Namespace) -> int:
    rows = balanced_latin_square(args.n)
    letters = string.ascii_uppercase
    for row in rows:
        if args.n <= len(letters):
            sys.stdout.write(",".join(letters[i] for i in row) + "\n")
        else:
            sys.stdout.write(",".join(str(i) for i in row) + "\n")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    config = load_config(args.config, _overrides(args))
    app = create_app(config, frontend_dir=args.frontend)
    sys.stdout.write(f"serving on ws://{args.host}:{args.port}/ws\n")
    sys.stdout.flush()
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    try:
        text = Path(args.metrics).read_text(encoding="utf-8")
    except OSError as exc:
        raise TraceError(f"cannot read metrics: {exc}") from None
    metrics = parse_metrics(text)
    if args.format == "csv":
        _write(args.out, metrics_to_csv(metrics))
    else:
        _write(args.out, metrics_to_records(metrics))
    return 0


_HANDLERS = {
    "replay": _cmd_replay,
    "gen-task": _cmd_gen_task,
    "latin-square": _cmd_latin_square,
    "serve": _cmd_serve,
    "export": _cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except TraceError as exc:
        sys.stderr.write(f"trace error: {exc}\n")
        return 3
    except ProtocolError as exc:
        sys.stderr.write(f"protocol error: {exc}\n")
        return 4
    except EngineError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
