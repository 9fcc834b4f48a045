"""Canonical little-endian wire encodings.

Encoding table (all integers and floats little-endian):

  envelope   = u32 body_len | body
  body       = u16 topic_len | topic utf-8 | u64 seq | f64 send_time | payload
  Twist      = f64 v | f64 omega
  Pose2D     = f64 x | f64 y | f64 theta
  ForceVector= f64 fx | f64 fy | f64 stamp
  LaserScan  = f64 stamp | f64 angle_min | f64 angle_increment | f64 range_max
             | u32 count | count * f32 range | count * u8 no_return

These byte layouts are the interoperability contract: an implementation in
any language that packs the same fields the same way is wire-compatible.
"""

from __future__ import annotations

import struct
from typing import NamedTuple

from .feedback import ForceVector
from .geometry import LaserScan, Pose2D, Twist

_TWIST = struct.Struct("<2d")
_POSE = struct.Struct("<3d")
_FORCE = struct.Struct("<3d")
_SCAN_HEADER = struct.Struct("<4dI")


def encode_twist(t: Twist) -> bytes:
    return _TWIST.pack(t.v, t.omega)


def decode_twist(b: bytes) -> Twist:
    v, omega = _TWIST.unpack(b)
    return Twist(v, omega)


def encode_pose(p: Pose2D) -> bytes:
    return _POSE.pack(p.x, p.y, p.theta)


def decode_pose(b: bytes) -> Pose2D:
    x, y, theta = _POSE.unpack(b)
    return Pose2D(x, y, theta)


def encode_force(f: ForceVector) -> bytes:
    return _FORCE.pack(f.fx, f.fy, f.stamp)


def decode_force(b: bytes) -> ForceVector:
    fx, fy, stamp = _FORCE.unpack(b)
    return ForceVector(fx, fy, stamp)


def encode_scan(s: LaserScan) -> bytes:
    n = len(s.ranges)
    head = _SCAN_HEADER.pack(s.stamp, s.angle_min, s.angle_increment, s.range_max, n)
    body = struct.pack(f"<{n}f", *s.ranges) + bytes(1 if f else 0 for f in s.no_return)
    return head + body


def decode_scan(b: bytes) -> LaserScan:
    stamp, angle_min, angle_inc, range_max, n = _SCAN_HEADER.unpack_from(b, 0)
    off = _SCAN_HEADER.size
    ranges = struct.unpack_from(f"<{n}f", b, off)
    off += 4 * n
    flags = tuple(bool(v) for v in b[off:off + n])
    return LaserScan(stamp, angle_min, angle_inc, range_max,
                     tuple(float(r) for r in ranges), flags)


class Envelope(NamedTuple):
    topic: str
    seq: int
    send_time: float
    payload: bytes


def encode_envelope(topic: str, seq: int, send_time: float, payload: bytes) -> bytes:
    name = topic.encode("utf-8")
    body = struct.pack("<H", len(name)) + name + struct.pack("<Qd", seq, send_time) + payload
    return struct.pack("<I", len(body)) + body


def decode_envelope(data: bytes) -> Envelope:
    (body_len,) = struct.unpack_from("<I", data, 0)
    body = data[4:4 + body_len]
    (name_len,) = struct.unpack_from("<H", body, 0)
    topic = body[2:2 + name_len].decode("utf-8")
    seq, send_time = struct.unpack_from("<Qd", body, 2 + name_len)
    payload = body[2 + name_len + 16:]
    return Envelope(topic, seq, send_time, bytes(payload))
