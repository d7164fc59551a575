"""Composition root: configuration, script runner, trace replay, REPL,
and the HTTP service the operator console talks to."""

from __future__ import annotations

import json
import queue
import sys
import threading
import time
import warnings
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple
from urllib.parse import parse_qs, urlparse

try:
    import tomllib
except ImportError:
    import tomli as tomllib

from .backend import Backend
from .errors import BindError, ConfigError, ScriptSyntax, TraceMalformed
from .evalreport import evaluate, render_report
from .mock_backend import MockBackend
from .model import ArmPose, BasePose2D, JointVector, rad_to_deg
from .remote_backend import RemoteBackend
from .safety import SafetyBounds
from .session import Session, SessionEvent, TraceWriter
from .sim import SimConfig, World
from .tools import ToolCall


@dataclass(frozen=True)
class RemoteConfig:
    base_url: str = ""
    model: str = ""


@dataclass(frozen=True)
class GatewayConfig:
    backend: str = "mock"                       # mock | remote
    remote: RemoteConfig = field(default_factory=RemoteConfig)
    robots: Tuple[str, ...] = ("arm", "base")
    tick_hz: float = 100.0
    http_port: int = 8140
    trace_path: str = "trace.jsonl"
    safety: SafetyBounds = field(default_factory=SafetyBounds)
    sim: SimConfig = field(default_factory=SimConfig)
    static_dir: Optional[str] = None

    def __post_init__(self):
        if self.backend not in ("mock", "remote"):
            raise ConfigError(f"backend must be mock or remote, got {self.backend!r}")
        if self.backend == "remote" and not (self.remote.base_url and self.remote.model):
            raise ConfigError("backend = remote requires remote.base_url and remote.model")
        unknown = set(self.robots) - {"arm", "base"}
        if unknown:
            raise ConfigError(f"unknown robots: {sorted(unknown)}")


def load_config(path: str) -> GatewayConfig:
    """Read a TOML config file mirroring GatewayConfig field names."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return config_from_dict(data)


def config_from_dict(data: Dict[str, Any]) -> GatewayConfig:
    known = {"backend", "tick_hz", "http_port", "trace_path", "static_dir",
             "robots", "remote", "safety", "sim"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs: Dict[str, Any] = {}
    for key in ("backend", "tick_hz", "http_port", "trace_path", "static_dir"):
        if key in data:
            kwargs[key] = data[key]
    if "robots" in data:
        kwargs["robots"] = tuple(data["robots"])
    if "remote" in data:
        kwargs["remote"] = RemoteConfig(**data["remote"])
    if "safety" in data:
        kwargs["safety"] = SafetyBounds(**data["safety"])
    if "sim" in data:
        sim = dict(data["sim"])
        kwargs["sim"] = SimConfig(**sim)
    if "tick_hz" in kwargs and "sim" not in data:
        kwargs["sim"] = SimConfig(tick_hz=kwargs["tick_hz"])
    try:
        return GatewayConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def build_backend(config: GatewayConfig) -> Backend:
    if config.backend == "mock":
        return MockBackend()
    return RemoteBackend(base_url=config.remote.base_url, model=config.remote.model)


def build_world(config: GatewayConfig) -> World:
    return World(config=config.sim, robots=config.robots)


# -- script runner -------------------------------------------------------


def parse_script_line(line: str) -> Optional[Tuple[str, Any]]:
    """Returns ("reset", (robot, state)) | ("prompt", text) | None for blanks/comments."""
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return None
    if stripped.startswith("!reset"):
        parts = stripped.split(None, 2)
        if len(parts) != 3 or parts[1] not in ("arm", "base"):
            raise ScriptSyntax(f"malformed !reset line: {line.rstrip()!r}")
        try:
            state = json.loads(parts[2])
        except ValueError as exc:
            raise ScriptSyntax(f"!reset state is not valid JSON: {exc}") from exc
        if not isinstance(state, dict):
            raise ScriptSyntax("!reset state must be a JSON object")
        return ("reset", (parts[1], state))
    if stripped.startswith("!"):
        raise ScriptSyntax(f"unknown directive: {stripped.split()[0]!r}")
    return ("prompt", stripped)


def apply_reset(world: World, robot: str, state: Dict[str, Any]) -> None:
    if robot == "arm":
        joints = JointVector.from_json(state["joints"]) if "joints" in state else None
        pose = ArmPose.from_json(state["pose"]) if "pose" in state else None
        world.arm.reset(joints=joints, pose=pose)
    else:
        world.base.reset(BasePose2D.from_json(state))


def run_script(path: str, config: Optional[GatewayConfig] = None,
               trace_out: Optional[str] = None,
               session: Optional[Session] = None) -> Tuple[int, List[SessionEvent]]:
    """Run a prompt script; exit status 0 iff no error events were emitted."""
    config = config or GatewayConfig()
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()
    if session is None:
        world = build_world(config)
        trace = TraceWriter(trace_out) if trace_out else None
        session = Session("script", world, build_backend(config),
                          bounds=config.safety, trace=trace)
    collected: List[SessionEvent] = []
    session.listeners.append(collected.append)
    try:
        for line in lines:
            parsed = parse_script_line(line)
            if parsed is None:
                continue
            kind, value = parsed
            if kind == "reset":
                robot, state = value
                apply_reset(session.world, robot, state)
                session.emit("state", {"reset": {"robot": robot, "state": state}})
            else:
                session.run_turn(value)
    finally:
        if collected.append in session.listeners:
            session.listeners.remove(collected.append)
    status = 0 if not any(e.kind == "error" for e in collected) else 1
    return status, collected


# -- trace replay ---------------------------------------------------------


def read_trace(path: str) -> List[SessionEvent]:
    """Load a JSONL trace; a truncated final line is skipped with a warning."""
    events: List[SessionEvent] = []
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    for idx, line in enumerate(lines):
        if not line.strip():
            continue
        try:
            events.append(SessionEvent.from_json(json.loads(line)))
        except (ValueError, KeyError) as exc:
            if idx == len(lines) - 1:
                warnings.warn(f"skipping truncated final trace line: {exc}")
                continue
            raise TraceMalformed(f"line {idx + 1}: {exc}") from exc
    return events


def replay_trace(path: str, config: Optional[GatewayConfig] = None) -> Dict[str, Any]:
    """Re-dispatch recorded tool calls against fresh simulators.

    Backends are bypassed entirely; the result is the deterministic
    final state snapshot of the replayed world.
    """
    config = config or GatewayConfig()
    events = read_trace(path)
    return replay_events(events, config)


def replay_events(events: Sequence[SessionEvent], config: Optional[GatewayConfig] = None) -> Dict[str, Any]:
    config = config or GatewayConfig()
    world = build_world(config)
    for event in events:
        if event.kind == "state" and "reset" in event.payload:
            reset = event.payload["reset"]
            apply_reset(world, reset["robot"], reset["state"])
        elif event.kind == "tool_call":
            try:
                call = ToolCall.from_json(event.payload)
            except Exception as exc:
                raise TraceMalformed(f"bad tool_call event: {exc}") from exc
            from .session import dispatch_tool_call

            dispatch_tool_call(world, call)
            world.run_until_idle()
        elif event.kind == "estop":
            if event.payload.get("engaged"):
                world.engage_estop()
            else:
                world.reset_estop()
    return world.state_snapshot()


# -- interactive REPL -------------------------------------------------------


def format_event(event: SessionEvent) -> str:
    """One transcript line per event, in the familiar console style."""
    p = event.payload
    if event.kind == "prompt":
        return f"[prompt {p['prompt_id']}] {p['text']}"
    if event.kind == "granularity":
        quantities = ", ".join(
            f"{q['kind']}={q['value']:g}{q['unit']}" for q in p.get("quantities", [])
        )
        suffix = f" ({quantities})" if quantities else ""
        return f"Granularity: {p['label']}{suffix}"
    if event.kind == "tool_call":
        return f"Calling function {p['tool']} with arguments {json.dumps(p['arguments'], sort_keys=True)}"
    if event.kind == "tool_result":
        return f"Function response: {json.dumps(p['result'], sort_keys=True)}"
    if event.kind == "assistant":
        return f"Response message: {p['text']}"
    if event.kind == "clarification":
        return f"Response message: {p['text']}"
    if event.kind == "estop":
        return f"E-stop {'engaged' if p.get('engaged') else 'reset'}"
    if event.kind == "error":
        return f"Error ({p.get('reason')}): {p.get('message')}"
    return f"[{event.kind}] {json.dumps(p, sort_keys=True)}"


def repl(config: Optional[GatewayConfig] = None,
         stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None,
         wall_clock: bool = True) -> None:
    """Interactive prompt loop; 'quit' or end-of-input exits cleanly."""
    config = config or GatewayConfig()
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    world = build_world(config)
    trace = TraceWriter(config.trace_path) if config.trace_path else None
    ticker = _Ticker(world, config.tick_hz) if wall_clock else None
    waiter = ticker.wait_until_idle if ticker else None
    session = Session("repl", world, build_backend(config),
                      bounds=config.safety, trace=trace, motion_waiter=waiter)
    if ticker:
        ticker.start()
    try:
        while True:
            stdout.write("> Enter prompt: ")
            stdout.flush()
            line = stdin.readline()
            if not line:
                break
            text = line.strip()
            if not text:
                continue
            if text in ("quit", "exit"):
                break
            if text == "estop":
                session.estop()
                stdout.write("E-stop engaged\n")
                continue
            if text == "reset":
                session.reset_estop()
                stdout.write("E-stop reset\n")
                continue
            for event in session.run_turn(text):
                if event.kind != "prompt":
                    stdout.write(format_event(event) + "\n")
            stdout.flush()
    finally:
        if ticker:
            ticker.stop()
        if trace:
            trace.close()


class _Ticker:
    """Wall-clock tick driver for interactive modes."""

    def __init__(self, world: World, tick_hz: float):
        self.world = world
        self.period = 1.0 / tick_hz
        self._stop = threading.Event()
        self._thread = threading.Thread(target=self._run, daemon=True)
        self.on_tick: Optional[Any] = None

    def start(self) -> None:
        self._thread.start()

    def stop(self) -> None:
        self._stop.set()
        self._thread.join(timeout=2.0)

    def _run(self) -> None:
        next_due = time.monotonic()
        while not self._stop.is_set():
            next_due += self.period
            delay = next_due - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_due = time.monotonic()  # fell behind; don't burst
            was_busy = not self.world.idle
            self.world.tick(1)
            if was_busy and self.on_tick is not None:
                self.on_tick()

    def wait_until_idle(self, world: World) -> None:
        while not world.idle and not world.estopped and not self._stop.is_set():
            time.sleep(self.period / 2)


# -- HTTP service -----------------------------------------------------------


class GatewayServer:
    """HTTP front end over one world + session, with an SSE event stream."""

    def __init__(self, config: GatewayConfig):
        self.config = config
        self.world = build_world(config)
        self.trace = TraceWriter(config.trace_path) if config.trace_path else None
        self.ticker = _Ticker(self.world, config.tick_hz)
        self.backend = build_backend(config)
        self.session = Session("default", self.world, self.backend,
                               bounds=config.safety, trace=self.trace,
                               motion_waiter=self.ticker.wait_until_idle)
        self.ticker.on_tick = self._on_motion_tick
        self._streams: List["queue.Queue[SessionEvent]"] = []
        self._streams_lock = threading.Lock()
        self.session.listeners.append(self._fanout)
        self._httpd: Optional[ThreadingHTTPServer] = None

    # every event (including transient per-tick states) goes to streams
    def _fanout(self, event: SessionEvent) -> None:
        with self._streams_lock:
            for q in self._streams:
                q.put(event)

    def _on_motion_tick(self) -> None:
        self.session.emit_state()

    def add_stream(self) -> "queue.Queue[SessionEvent]":
        q: "queue.Queue[SessionEvent]" = queue.Queue()
        with self._streams_lock:
            self._streams.append(q)
        return q

    def remove_stream(self, q) -> None:
        with self._streams_lock:
            if q in self._streams:
                self._streams.remove(q)

    def api_state(self) -> Dict[str, Any]:
        snap = self.world.state_snapshot()
        out: Dict[str, Any] = {"estop": snap["estop"]}
        if "arm" in snap:
            out["arm"] = {"joints": snap["arm"]["joints"], "pose": snap["arm"]["pose"]}
        if "base" in snap:
            out["base"] = {
                "x": snap["base"]["x"],
                "y": snap["base"]["y"],
                "theta_deg": snap["base"]["theta_deg"],
            }
        return out

    def start(self, port: Optional[int] = None) -> int:
        port = port if port is not None else self.config.http_port
        handler = _make_handler(self)
        try:
            self._httpd = ThreadingHTTPServer(("127.0.0.1", port), handler)
        except OSError as exc:
            raise BindError(f"cannot bind port {port}: {exc}") from exc
        self.ticker.start()
        thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        thread.start()
        return self._httpd.server_address[1]

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
        self.ticker.stop()
        if self.trace is not None:
            self.trace.close()


def serve(config: GatewayConfig, port: Optional[int] = None) -> GatewayServer:
    server = GatewayServer(config)
    server.start(port)
    return server


def _make_handler(gw: GatewayServer):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, *args):  # quiet by default
            pass

        def _json(self, status: int, obj: Any) -> None:
            body = json.dumps(obj).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _read_body(self) -> Dict[str, Any]:
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b"{}"
            try:
                obj = json.loads(raw or b"{}")
            except ValueError:
                return {}
            return obj if isinstance(obj, dict) else {}

        def do_POST(self):
            path = urlparse(self.path).path
            if path == "/api/v1/prompt":
                body = self._read_body()
                text = body.get("text", "")
                if not text.strip():
                    self._json(400, {"error": "text required"})
                    return
                events = gw.session.run_turn(text)
                self._json(200, [e.to_json() for e in events])
            elif path == "/api/v1/estop":
                event = gw.session.estop()
                self._json(200, event.to_json())
            elif path == "/api/v1/reset":
                event = gw.session.reset_estop()
                self._json(200, event.to_json())
            else:
                self._json(404, {"error": f"unknown path {path}"})

        def do_GET(self):
            parsed = urlparse(self.path)
            path = parsed.path
            if path == "/api/v1/state":
                self._json(200, gw.api_state())
            elif path == "/api/v1/events":
                self._serve_stream()
            elif path == "/api/v1/report":
                params = parse_qs(parsed.query)
                fmt = params.get("format", ["csv"])[0]
                try:
                    trace_events = read_trace(gw.config.trace_path)
                    report = evaluate(trace_events)
                    body = render_report(report, fmt)
                except FileNotFoundError:
                    self._json(404, {"error": "no trace recorded yet"})
                    return
                except Exception as exc:
                    self._json(400, {"error": str(exc)})
                    return
                ctype = "text/csv" if fmt == "csv" else "text/markdown"
                self.send_response(200)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)
            elif gw.config.static_dir and (path == "/" or not path.startswith("/api/")):
                self._serve_static(path)
            else:
                self._json(404, {"error": f"unknown path {path}"})

        def _write_chunk(self, data: bytes) -> None:
            # chunked framing lets HTTP/1.1 clients see each frame as it
            # arrives instead of blocking on a fixed-size body read
            self.wfile.write(f"{len(data):X}\r\n".encode("ascii") + data + b"\r\n")
            self.wfile.flush()

        def _serve_stream(self):
            q = gw.add_stream()
            try:
                self.send_response(200)
                self.send_header("Content-Type", "text/event-stream")
                self.send_header("Cache-Control", "no-cache")
                self.send_header("Transfer-Encoding", "chunked")
                self.send_header("Access-Control-Allow-Origin", "*")
                self.end_headers()
                # current state first so late joiners hydrate immediately
                hello = {"ts_ms": 0, "session": gw.session.name, "kind": "state",
                         "payload": gw.world.state_snapshot()}
                self._write_chunk(f"data: {json.dumps(hello)}\n\n".encode("utf-8"))
                while True:
                    try:
                        event = q.get(timeout=15.0)
                    except queue.Empty:
                        self._write_chunk(b": keepalive\n\n")
                        continue
                    self._write_chunk(f"data: {json.dumps(event.to_json())}\n\n".encode("utf-8"))
            except (BrokenPipeError, ConnectionResetError, OSError):
                pass
            finally:
                gw.remove_stream(q)

        def _serve_static(self, path: str):
            import os

            rel = "index.html" if path == "/" else path.lstrip("/")
            base = os.path.abspath(gw.config.static_dir)
            full = os.path.normpath(os.path.join(base, rel))
            if not full.startswith(base):
                self._json(404, {"error": "not found"})
                return
            if not os.path.isfile(full):
                self._json(404, {"error": "not found"})
                return
            ctype = {
                ".html": "text/html",
                ".js": "application/javascript",
                ".css": "text/css",
                ".map": "application/json",
            }.get(os.path.splitext(full)[1], "application/octet-stream")
            with open(full, "rb") as fh:
                body = fh.read()
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

    return Handler
