"""Command-line entry points: replay simulation, live serving, validation."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .grammar import GrammarError, load_grammar
from .scene import SceneError, load_scene
from .session import TraceError, run_replay

VALIDATION_ERRORS = (SceneError, ConfigError, GrammarError, TraceError)


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    report, session = run_replay(config, args.trace)
    with open(args.report, "w", encoding="utf-8") as f:
        json.dump(report, f, indent=2)
        f.write("\n")
    if args.log:
        session.log.write(args.log)
    summary = report["summary"]
    print(
        f"{summary['tasks']} tasks, "
        f"{summary['first_attempt_successes']}/{summary['tasks']} first-attempt, "
        f"sim {report['sim_duration_s']:.1f}s, wall {report['wall_seconds']:.1f}s"
    )
    return 0


def _cmd_serve(args) -> int:
    from .server import serve_forever

    config = load_config(args.config)
    serve_forever(config, host=args.host, port=args.port, log_path=args.log)
    return 0


def _cmd_validate(args) -> int:
    scene = load_scene(args.scene)
    print(f"scene ok: {len(scene.objects)} objects, table height {scene.table_height} m")
    if args.grammar:
        table = load_grammar(args.grammar)
        print(f"grammar ok: {len(table)} productions")
    return 0


def _cmd_make_trace(args) -> int:
    from .authoring import write_bundled_data

    trace_path = write_bundled_data(args.out_dir)
    print(f"wrote {trace_path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="gazereach", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="replay a gaze trace headlessly")
    sim.add_argument("--config", required=True)
    sim.add_argument("--trace", required=True)
    sim.add_argument("--report", required=True)
    sim.add_argument("--log", default=None)
    sim.set_defaults(func=_cmd_simulate)

    srv = sub.add_parser("serve", help="run the live simulation service")
    srv.add_argument("--config", required=True)
    srv.add_argument("--port", type=int, required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--log", default=None)
    srv.set_defaults(func=_cmd_serve)

    val = sub.add_parser("validate", help="validate a scene (and optional grammar) file")
    val.add_argument("--scene", required=True)
    val.add_argument("--grammar", default=None)
    val.set_defaults(func=_cmd_validate)

    mk = sub.add_parser("make-trace", help="regenerate the bundled scene/config/trace")
    mk.add_argument("--out-dir", required=True)
    mk.set_defaults(func=_cmd_make_trace)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"startup error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
