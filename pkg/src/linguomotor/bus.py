"""Minimal ROS-like latched publish/subscribe bus over named topics.

In-process by default; an optional TCP bridge streams frames (4-byte
big-endian length prefix + UTF-8 JSON {topic, seq, payload}) to remote
consumers and accepts inbound frames as publishes.
"""

from __future__ import annotations

import json
import queue
import re
import socket
import socketserver
import struct
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterator, Optional

import jsonschema

from .errors import (
    FrameMalformed,
    FrameTruncated,
    PayloadInvalid,
    SchemaConflict,
    UnknownTopic,
)

TOPIC_RE = re.compile(r"^/[a-z0-9_]+(/[a-z0-9_]+)*$")

# topics used by the gateway, advertised by the simulators
GATEWAY_TOPICS = (
    "/arm/joint_command",
    "/arm/joint_states",
    "/arm/pose_command",
    "/arm/pose",
    "/base/cmd_vel",
    "/base/odom",
    "/safety/estop",
)

DEFAULT_QUEUE_SIZE = 1024

# schemas already validated against their meta-schema, by object identity
_CHECKED_SCHEMAS: set = set()


def validate_topic_name(path: str) -> str:
    if not TOPIC_RE.match(path):
        raise UnknownTopic(f"invalid topic name: {path!r}")
    return path


@dataclass(frozen=True)
class BusMessage:
    topic: str
    seq: int
    payload: Any


def encode_frame(msg: BusMessage) -> bytes:
    body = json.dumps(
        {"topic": msg.topic, "seq": msg.seq, "payload": msg.payload},
        separators=(",", ":"),
    ).encode("utf-8")
    return struct.pack(">I", len(body)) + body


def decode_frame(data: bytes) -> BusMessage:
    if len(data) < 4:
        raise FrameTruncated(f"frame header needs 4 bytes, got {len(data)}")
    (length,) = struct.unpack(">I", data[:4])
    body = data[4 : 4 + length]
    if len(body) < length:
        raise FrameTruncated(f"frame declares {length} bytes, got {len(body)}")
    try:
        obj = json.loads(body.decode("utf-8"))
        return BusMessage(topic=obj["topic"], seq=obj["seq"], payload=obj["payload"])
    except (ValueError, KeyError, TypeError, UnicodeDecodeError) as exc:
        raise FrameMalformed(str(exc)) from exc


class Subscription:
    """Handle yielding messages for one topic in publish order.

    Backed by a bounded queue; if the subscriber falls more than
    `maxsize` messages behind it is dropped from the bus and the next
    get() raises PayloadInvalid-free QueueOverflow via StopIteration.
    """

    def __init__(self, topic: str, maxsize: int = DEFAULT_QUEUE_SIZE):
        self.topic = topic
        self._queue: "queue.Queue[Optional[BusMessage]]" = queue.Queue(maxsize=maxsize)
        self.dropped = False

    def _offer(self, msg: BusMessage) -> bool:
        try:
            self._queue.put_nowait(msg)
            return True
        except queue.Full:
            self.dropped = True
            return False

    def get(self, timeout: Optional[float] = None) -> BusMessage:
        msg = self._queue.get(timeout=timeout)
        if msg is None:
            raise queue.Empty("subscription closed")
        return msg

    def get_nowait(self) -> BusMessage:
        msg = self._queue.get_nowait()
        if msg is None:
            raise queue.Empty("subscription closed")
        return msg

    def __iter__(self) -> Iterator[BusMessage]:
        while True:
            msg = self._queue.get()
            if msg is None:
                return
            yield msg


@dataclass
class _Topic:
    schema: dict
    validator: jsonschema.protocols.Validator
    seq: int = 0
    latched: Optional[BusMessage] = None
    subscriptions: list = field(default_factory=list)
    callbacks: list = field(default_factory=list)


class Bus:
    """Thread-safe latched pub/sub. Ordering is guaranteed per topic only."""

    def __init__(self):
        self._lock = threading.RLock()
        self._topics: Dict[str, _Topic] = {}
        self._bridge: Optional["TcpBridge"] = None

    def advertise(self, topic: str, schema: dict) -> None:
        validate_topic_name(topic)
        with self._lock:
            existing = self._topics.get(topic)
            if existing is not None:
                if existing.schema != schema:
                    raise SchemaConflict(f"{topic} already advertised with a different schema")
                return
            validator_cls = jsonschema.validators.validator_for(schema)
            # meta-schema validation is expensive; do it once per distinct
            # schema object (topic schemas are module-level constants)
            if id(schema) not in _CHECKED_SCHEMAS:
                validator_cls.check_schema(schema)
                _CHECKED_SCHEMAS.add(id(schema))
            self._topics[topic] = _Topic(schema=schema, validator=validator_cls(schema))

    def topics(self) -> Dict[str, dict]:
        with self._lock:
            return {name: t.schema for name, t in self._topics.items()}

    def publish(self, topic: str, payload: Any) -> int:
        with self._lock:
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(topic)
            error = next(iter(t.validator.iter_errors(payload)), None)
            if error is not None:
                raise PayloadInvalid(f"{topic}: {error.message}")
            t.seq += 1
            msg = BusMessage(topic=topic, seq=t.seq, payload=payload)
            t.latched = msg
            # snapshot receivers so callbacks never run under the bus lock
            subs = list(t.subscriptions)
            callbacks = list(t.callbacks)
            for sub in subs:
                if not sub._offer(msg):
                    t.subscriptions.remove(sub)
            bridge = self._bridge
        for cb in callbacks:
            cb(msg)
        if bridge is not None:
            bridge._broadcast(msg)
        return msg.seq

    def subscribe(self, topic: str, callback: Optional[Callable[[BusMessage], None]] = None,
                  maxsize: int = DEFAULT_QUEUE_SIZE) -> Optional[Subscription]:
        """Register a consumer; delivers the latched value first, if any.

        With a callback, delivery is synchronous at publish time and no
        handle is returned. Without one, returns a queue-backed handle.
        """
        with self._lock:
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(topic)
            latched = t.latched
            if callback is not None:
                t.callbacks.append(callback)
                sub = None
            else:
                sub = Subscription(topic, maxsize=maxsize)
                if latched is not None:
                    sub._offer(latched)
                t.subscriptions.append(sub)
        if callback is not None and latched is not None:
            callback(latched)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            t = self._topics.get(sub.topic)
            if t is not None and sub in t.subscriptions:
                t.subscriptions.remove(sub)

    def latest(self, topic: str) -> Optional[Any]:
        with self._lock:
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(topic)
            return t.latched.payload if t.latched is not None else None

    # TCP bridge ------------------------------------------------------

    def start_bridge(self, host: str = "127.0.0.1", port: int = 0) -> "TcpBridge":
        with self._lock:
            if self._bridge is None:
                self._bridge = TcpBridge(self, host, port)
            return self._bridge

    def stop_bridge(self) -> None:
        with self._lock:
            bridge, self._bridge = self._bridge, None
        if bridge is not None:
            bridge.close()


def read_frame(sock: socket.socket) -> Optional[BusMessage]:
    """Read one length-prefixed frame from a socket; None on clean EOF."""
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    body = _read_exact(sock, length)
    if body is None:
        raise FrameTruncated(f"frame declares {length} bytes, connection closed early")
    return decode_frame(header + body)


def _read_exact(sock: socket.socket, n: int) -> Optional[bytes]:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            if not buf:
                return None
            raise FrameTruncated(f"connection closed after {len(buf)}/{n} bytes")
        buf += chunk
    return buf


class TcpBridge:
    """Streams every published message to connected clients as frames.

    Handshake: one frame with topic "/" carrying the topic->schema map.
    Inbound frames from clients are published onto the bus.
    """

    def __init__(self, bus: Bus, host: str, port: int):
        self._bus = bus
        self._clients: list = []
        self._lock = threading.Lock()

        bridge = self

        class Handler(socketserver.BaseRequestHandler):
            def handle(self):
                sock = self.request
                handshake = BusMessage(topic="/", seq=0, payload=bridge._bus.topics())
                # registration is atomic with the handshake send so a
                # publish right after the client sees the handshake is
                # guaranteed to reach it
                with bridge._lock:
                    try:
                        sock.sendall(encode_frame(handshake))
                    except OSError:
                        return
                    bridge._clients.append(sock)
                try:
                    while True:
                        msg = read_frame(sock)
                        if msg is None:
                            return
                        bridge._bus.publish(msg.topic, msg.payload)
                except (OSError, FrameTruncated, FrameMalformed):
                    return
                finally:
                    with bridge._lock:
                        if sock in bridge._clients:
                            bridge._clients.remove(sock)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self.address = self._server.server_address
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()

    def _broadcast(self, msg: BusMessage) -> None:
        frame = encode_frame(msg)
        with self._lock:
            for sock in list(self._clients):
                try:
                    sock.sendall(frame)
                except OSError:
                    self._clients.remove(sock)

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()
