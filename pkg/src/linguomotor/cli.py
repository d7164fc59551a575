"""Command-line entry point: repl | serve | run | replay | report."""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from typing import List, Optional

from .errors import LinguomotorError
from .evalreport import evaluate, render_report
from .gateway import (
    GatewayConfig,
    RemoteConfig,
    format_event,
    load_config,
    read_trace,
    repl,
    replay_trace,
    run_script,
    serve,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linguomotor",
        description="Language-to-robot control gateway over simulated robots",
    )
    parser.add_argument("--config", help="TOML config file path")
    parser.add_argument("--backend", choices=["mock", "remote"])
    parser.add_argument("--base-url", help="remote backend base URL")
    parser.add_argument("--model", help="remote backend model name")
    parser.add_argument("--port", type=int, help="HTTP port for serve")
    parser.add_argument("--tick-hz", type=float, help="simulation tick rate")
    parser.add_argument("--trace-out", help="trace file to append events to")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("repl", help="interactive prompt loop")
    p_serve = sub.add_parser("serve", help="run the HTTP gateway")
    p_serve.add_argument("--static-dir", help="directory of console assets to serve at /")
    p_run = sub.add_parser("run", help="run a prompt script")
    p_run.add_argument("--script", required=True)
    p_replay = sub.add_parser("replay", help="replay recorded tool calls from a trace")
    p_replay.add_argument("--trace", required=True)
    p_report = sub.add_parser("report", help="evaluation report from a trace")
    p_report.add_argument("--trace", required=True)
    p_report.add_argument("--fixture", help="expectations fixture JSON")
    p_report.add_argument("--format", choices=["csv", "md"], default="md")
    return parser


def resolve_config(args: argparse.Namespace) -> GatewayConfig:
    config = load_config(args.config) if args.config else GatewayConfig()
    if args.backend:
        config = replace(config, backend=args.backend)
    if args.base_url or args.model:
        config = replace(config, remote=RemoteConfig(
            base_url=args.base_url or config.remote.base_url,
            model=args.model or config.remote.model,
        ))
    if args.port is not None:
        config = replace(config, http_port=args.port)
    if args.tick_hz is not None:
        config = replace(config, tick_hz=args.tick_hz,
                         sim=replace(config.sim, tick_hz=args.tick_hz))
    if args.trace_out:
        config = replace(config, trace_path=args.trace_out)
    if getattr(args, "static_dir", None):
        config = replace(config, static_dir=args.static_dir)
    # re-validate cross-field constraints after overrides
    return GatewayConfig(**{f: getattr(config, f) for f in config.__dataclass_fields__})


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
        if args.command == "repl":
            repl(config)
            return 0
        if args.command == "serve":
            server = serve(config)
            print(f"gateway listening on http://127.0.0.1:{server._httpd.server_address[1]}")
            try:
                while True:
                    time.sleep(3600)
            except KeyboardInterrupt:
                server.stop()
            return 0
        if args.command == "run":
            status, events = run_script(args.script, config, trace_out=config.trace_path)
            for event in events:
                print(format_event(event))
            return status
        if args.command == "replay":
            final = replay_trace(args.trace, config)
            print(json.dumps(final, indent=2, sort_keys=True))
            return 0
        if args.command == "report":
            events = read_trace(args.trace)
            expectations = None
            if args.fixture:
                with open(args.fixture, encoding="utf-8") as fh:
                    expectations = json.load(fh)
            report = evaluate(events, expectations)
            sys.stdout.write(render_report(report, args.format).decode("utf-8"))
            return 0
    except (LinguomotorError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
