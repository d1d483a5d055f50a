"""Framed wire protocol for networked sessions.

Frame layout (all integers little-endian):

    length:  u32  = 1 + len(payload)   (covers type byte + payload)
    type:    u8
    payload: type-specific bytes

Message types and payloads:

    0  PREPARE  angle: f64 radians            Alice -> referee
    1  MEASURE  angle: f64 radians            Bob   -> referee
    2  DETECT   outcome: u8 in {0, 1}         referee -> Bob
    3  LOST     (empty)                       referee -> either; Bob -> referee
                                              (referee: no photon for that
                                              measurement / restart notice;
                                              Bob: declares the pulse lost,
                                              truthfully or not)
    4  B_BIT    b: u8 in {0, 1}               Bob -> Alice (relayed)
    5  REVEAL   x: u8, a: u8                  Alice -> Bob (relayed)
    6  VERDICT  code: u8 (0=Accept c=0,       Bob -> Alice (relayed)
                1=Accept c=1, 2=Mismatch)
    7  HELLO    version: u8, role: u8         client -> referee
                (0=Alice, 1=Bob), canonical
                config text: utf-8
    8  ERROR    reason: utf-8                 either direction

Angles travel as IEEE-754 doubles, radians; non-finite values are rejected
at decode.  Frames carry no checksums: the transport is assumed reliable
and ordered.
"""
from __future__ import annotations

import math
import socket
import struct
from dataclasses import dataclass
from typing import Union

PROTOCOL_VERSION = 0x01
DEFAULT_PORT = 7707
ROLE_ALICE = 0x00
ROLE_BOB = 0x01

TYPE_PREPARE = 0
TYPE_MEASURE = 1
TYPE_DETECT = 2
TYPE_LOST = 3
TYPE_B_BIT = 4
TYPE_REVEAL = 5
TYPE_VERDICT = 6
TYPE_HELLO = 7
TYPE_ERROR = 8

VERDICT_ACCEPT_0 = 0
VERDICT_ACCEPT_1 = 1
VERDICT_MISMATCH_CODE = 2

MAX_FRAME = 1 << 20  # sanity cap; HELLO config text is the only variable part


class WireError(Exception):
    """Malformed frame or protocol violation; the message names the defect."""


@dataclass(frozen=True)
class Prepare:
    angle: float


@dataclass(frozen=True)
class Measure:
    angle: float


@dataclass(frozen=True)
class Detect:
    outcome: int


@dataclass(frozen=True)
class Lost:
    pass


@dataclass(frozen=True)
class BBit:
    b: int


@dataclass(frozen=True)
class RevealMsg:
    x: int
    a: int


@dataclass(frozen=True)
class VerdictMsg:
    code: int


@dataclass(frozen=True)
class Hello:
    version: int
    role: int
    config_text: str


@dataclass(frozen=True)
class ErrorMsg:
    reason: str


Message = Union[Prepare, Measure, Detect, Lost, BBit, RevealMsg, VerdictMsg, Hello, ErrorMsg]


def _angle_payload(angle: float) -> bytes:
    if not math.isfinite(angle):
        raise WireError(f"non-finite angle {angle!r}")
    return struct.pack("<d", angle)


def _check_bit(value: int, what: str) -> int:
    if value not in (0, 1):
        raise WireError(f"{what} must be 0 or 1, got {value!r}")
    return value


def encode_frame(msg: Message) -> bytes:
    """Serialize one message to its complete frame bytes."""
    if isinstance(msg, Prepare):
        t, payload = TYPE_PREPARE, _angle_payload(msg.angle)
    elif isinstance(msg, Measure):
        t, payload = TYPE_MEASURE, _angle_payload(msg.angle)
    elif isinstance(msg, Detect):
        t, payload = TYPE_DETECT, bytes([_check_bit(msg.outcome, "outcome")])
    elif isinstance(msg, Lost):
        t, payload = TYPE_LOST, b""
    elif isinstance(msg, BBit):
        t, payload = TYPE_B_BIT, bytes([_check_bit(msg.b, "b")])
    elif isinstance(msg, RevealMsg):
        t, payload = TYPE_REVEAL, bytes([_check_bit(msg.x, "x"), _check_bit(msg.a, "a")])
    elif isinstance(msg, VerdictMsg):
        if msg.code not in (VERDICT_ACCEPT_0, VERDICT_ACCEPT_1, VERDICT_MISMATCH_CODE):
            raise WireError(f"verdict code must be 0, 1 or 2, got {msg.code!r}")
        t, payload = TYPE_VERDICT, bytes([msg.code])
    elif isinstance(msg, Hello):
        if not 0 <= msg.version <= 255:
            raise WireError(f"version must fit a byte, got {msg.version!r}")
        if msg.role not in (ROLE_ALICE, ROLE_BOB):
            raise WireError(f"role must be 0 (Alice) or 1 (Bob), got {msg.role!r}")
        t, payload = TYPE_HELLO, bytes([msg.version, msg.role]) + msg.config_text.encode()
    elif isinstance(msg, ErrorMsg):
        t, payload = TYPE_ERROR, msg.reason.encode()
    else:
        raise WireError(f"unknown message {msg!r}")
    return struct.pack("<I", 1 + len(payload)) + bytes([t]) + payload


def _expect_len(payload: bytes, n: int, what: str) -> None:
    if len(payload) != n:
        raise WireError(f"length mismatch: {what} payload must be {n} bytes, got {len(payload)}")


def _decode_angle(payload: bytes, what: str) -> float:
    _expect_len(payload, 8, what)
    angle = struct.unpack("<d", payload)[0]
    if not math.isfinite(angle):
        raise WireError(f"non-finite angle in {what}")
    return angle


def decode_frame(data: bytes) -> Message:
    """Parse one complete frame; raises WireError naming any defect."""
    if len(data) < 5:
        raise WireError(f"truncated frame: {len(data)} bytes, need at least 5")
    (length,) = struct.unpack("<I", data[:4])
    if length < 1:
        raise WireError("length mismatch: frame length field must be >= 1")
    if len(data) != 4 + length:
        raise WireError(f"length mismatch: field says {length}, frame carries {len(data) - 4}")
    t = data[4]
    payload = data[5:]
    if t == TYPE_PREPARE:
        return Prepare(_decode_angle(payload, "PREPARE"))
    if t == TYPE_MEASURE:
        return Measure(_decode_angle(payload, "MEASURE"))
    if t == TYPE_DETECT:
        _expect_len(payload, 1, "DETECT")
        return Detect(_check_bit(payload[0], "outcome"))
    if t == TYPE_LOST:
        _expect_len(payload, 0, "LOST")
        return Lost()
    if t == TYPE_B_BIT:
        _expect_len(payload, 1, "B_BIT")
        return BBit(_check_bit(payload[0], "b"))
    if t == TYPE_REVEAL:
        _expect_len(payload, 2, "REVEAL")
        return RevealMsg(_check_bit(payload[0], "x"), _check_bit(payload[1], "a"))
    if t == TYPE_VERDICT:
        _expect_len(payload, 1, "VERDICT")
        if payload[0] not in (VERDICT_ACCEPT_0, VERDICT_ACCEPT_1, VERDICT_MISMATCH_CODE):
            raise WireError(f"verdict code must be 0, 1 or 2, got {payload[0]}")
        return VerdictMsg(payload[0])
    if t == TYPE_HELLO:
        if len(payload) < 2:
            raise WireError("length mismatch: HELLO payload must be >= 2 bytes")
        if payload[1] not in (ROLE_ALICE, ROLE_BOB):
            raise WireError(f"role must be 0 (Alice) or 1 (Bob), got {payload[1]}")
        try:
            text = payload[2:].decode()
        except UnicodeDecodeError:
            raise WireError("HELLO config text is not valid utf-8") from None
        return Hello(payload[0], payload[1], text)
    if t == TYPE_ERROR:
        try:
            return ErrorMsg(payload.decode())
        except UnicodeDecodeError:
            raise WireError("ERROR reason is not valid utf-8") from None
    raise WireError(f"unknown type 0x{t:02x}")


class Conn:
    """A framed, reliable, ordered byte-stream connection."""

    def __init__(self, sock: socket.socket, timeout: float = 30.0):
        sock.settimeout(timeout)
        self._sock = sock

    def send(self, msg: Message) -> None:
        self._sock.sendall(encode_frame(msg))

    def recv(self) -> Message:
        header = self._recv_exact(4)
        (length,) = struct.unpack("<I", header)
        if not 1 <= length <= MAX_FRAME:
            raise WireError(f"length mismatch: frame length {length} out of bounds")
        body = self._recv_exact(length)
        return decode_frame(header + body)

    def _recv_exact(self, n: int) -> bytes:
        chunks = []
        remaining = n
        while remaining:
            chunk = self._sock.recv(remaining)
            if not chunk:
                raise ConnectionError("connection closed")
            chunks.append(chunk)
            remaining -= len(chunk)
        return b"".join(chunks)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass
