"""Live bridge endpoint: JSON text frames over a WebSocket.

Frame types (schema version 1): "hello", "state", "command", "ack", "error".
State frames broadcast at a capped rate; the occupancy grid goes out as a
full base64 snapshot on connect (and periodically), then as changed-cell
deltas. Only the first client of a live MT session may inject commands.
"""

from __future__ import annotations

import base64
import json
import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from websockets.sync.server import serve

from .harness import RunHooks
from .mapping import PGM_FREE_THRESH, PGM_OCCUPIED_THRESH

SCHEMA_VERSION = 1
_OCC, _FREE, _UNKNOWN = 0, 254, 205


def grid_to_bytes(grid) -> tuple[bytes, dict]:
    """Trinary occupancy bytes (same convention as the PGM export)."""
    p = 1.0 - 1.0 / (1.0 + np.exp(grid.logodds))
    img = np.full(p.shape, _UNKNOWN, dtype=np.uint8)
    img[p >= PGM_OCCUPIED_THRESH] = _OCC
    img[p <= PGM_FREE_THRESH] = _FREE
    geom = {"width": grid.width, "height": grid.height,
            "resolution": grid.resolution, "origin": [grid.origin.x, grid.origin.y]}
    return img.tobytes(), geom


@dataclass
class _Client:
    conn: object
    send_lock: threading.Lock = field(default_factory=threading.Lock)
    authorized: bool = False
    last_grid: bytes | None = None
    last_full_at: float = 0.0

    def send_json(self, obj: dict) -> None:
        with self.send_lock:
            self.conn.send(json.dumps(obj))


class BridgeServer:
    """Threaded WebSocket endpoint attached to one run."""

    def __init__(self, case_id: str, command_enabled: bool,
                 v_max: float, omega_max: float,
                 host: str = "127.0.0.1", port: int = 8700,
                 frame_hz: float = 15.0, full_grid_interval: float = 5.0):
        self.case_id = case_id
        self.command_enabled = command_enabled
        self.v_max = v_max
        self.omega_max = omega_max
        self.host = host
        self.port = port
        self.frame_hz = frame_hz
        self.full_grid_interval = full_grid_interval

        self.trace_rows: list[tuple[float, float, float]] = []
        self._lock = threading.Lock()
        self._clients: list[_Client] = []
        self._commands: list[tuple[float, float]] = []
        self._latest: dict | None = None
        self._latest_grid: tuple[bytes, dict] | None = None
        self._stop = threading.Event()
        self._server = None
        self._threads: list[threading.Thread] = []

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self._server = serve(self._handler, self.host, self.port)
        t_srv = threading.Thread(target=self._server.serve_forever, daemon=True)
        t_cast = threading.Thread(target=self._broadcast_loop, daemon=True)
        t_srv.start()
        t_cast.start()
        self._threads = [t_srv, t_cast]

    def stop(self) -> None:
        self._stop.set()
        with self._lock:
            clients = list(self._clients)
        for c in clients:
            try:
                c.conn.close()
            except Exception:
                pass
        if self._server is not None:
            self._server.shutdown()
        for t in self._threads:
            t.join(timeout=2.0)

    # -- harness side ------------------------------------------------------

    def publish_state(self, state: dict) -> None:
        grid = state.pop("_grid", None)
        with self._lock:
            self._latest = state
            if grid is not None:
                self._latest_grid = grid_to_bytes(grid)

    def drain_commands(self, now: float) -> list[tuple[float, float]]:
        with self._lock:
            cmds = self._commands
            self._commands = []
        for v, w in cmds:
            self.trace_rows.append((now, v, w))
        return cmds

    # -- client side -------------------------------------------------------

    def _hello(self, client: _Client) -> dict:
        return {
            "type": "hello",
            "version": SCHEMA_VERSION,
            "case_id": self.case_id,
            "command_authority": client.authorized,
            "v_max": self.v_max,
            "omega_max": self.omega_max,
        }

    def _handler(self, conn) -> None:
        client = _Client(conn)
        with self._lock:
            if self.command_enabled and not any(c.authorized for c in self._clients):
                client.authorized = True
            self._clients.append(client)
        try:
            client.send_json(self._hello(client))
            for raw in conn:
                self._on_frame(client, raw)
        except Exception:
            pass
        finally:
            with self._lock:
                if client in self._clients:
                    self._clients.remove(client)

    def _on_frame(self, client: _Client, raw) -> None:
        try:
            frame = json.loads(raw)
            ftype = frame.get("type")
        except (json.JSONDecodeError, AttributeError):
            client.send_json({"type": "error", "reason": "malformed frame: not JSON"})
            return
        if ftype != "command":
            client.send_json({"type": "error", "reason": f"unsupported frame type {ftype!r}"})
            return
        if not client.authorized:
            client.send_json({"type": "error", "reason": "read-only session"})
            return
        try:
            v = float(frame["v"])
            omega = float(frame["omega"])
            if not (math.isfinite(v) and math.isfinite(omega)):
                raise ValueError
        except (KeyError, TypeError, ValueError):
            client.send_json({"type": "error", "reason": "command needs finite v and omega"})
            return
        v = max(-self.v_max, min(self.v_max, v))
        omega = max(-self.omega_max, min(self.omega_max, omega))
        with self._lock:
            self._commands.append((v, omega))
        client.send_json({"type": "ack", "v": v, "omega": omega})

    # -- broadcast ---------------------------------------------------------

    def _broadcast_loop(self) -> None:
        period = 1.0 / self.frame_hz
        while not self._stop.wait(period):
            with self._lock:
                state = self._latest
                grid = self._latest_grid
                clients = list(self._clients)
            if state is None:
                continue
            wall = time.monotonic()
            for client in clients:
                frame = dict(state)
                frame["type"] = "state"
                tp, pp = frame.get("twin_pose"), frame.get("physical_pose")
                frame["tracking_error"] = (
                    math.hypot(tp[0] - pp[0], tp[1] - pp[1]) if tp and pp else None)
                if grid is not None:
                    frame["grid"] = self._grid_frame(client, grid, wall)
                try:
                    client.send_json(frame)
                except Exception:
                    pass

    def _grid_frame(self, client: _Client, grid: tuple[bytes, dict], wall: float) -> dict:
        data, geom = grid
        need_full = (client.last_grid is None
                     or len(client.last_grid) != len(data)
                     or wall - client.last_full_at >= self.full_grid_interval)
        if need_full:
            client.last_grid = data
            client.last_full_at = wall
            return {"full": True, **geom,
                    "data": base64.b64encode(data).decode("ascii")}
        old = np.frombuffer(client.last_grid, dtype=np.uint8)
        new = np.frombuffer(data, dtype=np.uint8)
        idx = np.nonzero(old != new)[0]
        client.last_grid = data
        width = geom["width"]
        changes = [[int(i % width), int(i // width), int(new[i])] for i in idx]
        return {"full": False, "changes": changes}


class BridgeHooks(RunHooks):
    """Glue between the tick loop and the bridge server."""

    def __init__(self, server: BridgeServer, realtime: bool = True, speed: float = 1.0):
        self.server = server
        self.realtime = realtime
        self.speed = speed
        self._t0: float | None = None
        self._sim_t = 0.0

    def on_tick(self, state: dict) -> None:
        self.server.publish_state(state)

    def drain_commands(self, now: float) -> list[tuple[float, float]]:
        return self.server.drain_commands(now)

    def pace(self, tick_dt: float) -> None:
        if not self.realtime:
            return
        if self._t0 is None:
            self._t0 = time.monotonic()
        self._sim_t += tick_dt
        target = self._t0 + self._sim_t / self.speed
        delay = target - time.monotonic()
        if delay > 0:
            time.sleep(delay)


FRAME_SCHEMAS = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "twinsim bridge frames",
    "version": SCHEMA_VERSION,
    "oneOf": [
        {"$ref": "#/definitions/hello"},
        {"$ref": "#/definitions/state"},
        {"$ref": "#/definitions/command"},
        {"$ref": "#/definitions/ack"},
        {"$ref": "#/definitions/error"},
    ],
    "definitions": {
        "hello": {
            "type": "object",
            "required": ["type", "version", "case_id", "command_authority",
                         "v_max", "omega_max"],
            "properties": {
                "type": {"const": "hello"},
                "version": {"type": "integer"},
                "case_id": {"enum": ["RO", "MT", "DT", "ST"]},
                "command_authority": {"type": "boolean"},
                "v_max": {"type": "number"},
                "omega_max": {"type": "number"},
            },
        },
        "state": {
            "type": "object",
            "required": ["type", "t", "case_id", "physical_pose", "active_channel",
                         "mission", "goals"],
            "properties": {
                "type": {"const": "state"},
                "t": {"type": "number"},
                "tick": {"type": "integer"},
                "case_id": {"enum": ["RO", "MT", "DT", "ST"]},
                "twin_pose": {"type": ["array", "null"],
                              "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "physical_pose": {"type": "array",
                                  "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                "active_channel": {
                    "type": "object",
                    "properties": {"twin": {"type": ["string", "null"]},
                                   "physical": {"type": ["string", "null"]}},
                },
                "mission": {"type": "string"},
                "goals": {"type": "array",
                          "items": {"type": "array", "items": {"type": "number"}}},
                "tracking_error": {"type": ["number", "null"]},
                "scan": {
                    "type": "object",
                    "properties": {
                        "angle_min": {"type": "number"},
                        "angle_increment": {"type": "number"},
                        "range_max": {"type": "number"},
                        "ranges": {"type": "array", "items": {"type": "number"}},
                    },
                },
                "grid": {
                    "type": "object",
                    "oneOf": [
                        {"required": ["full", "width", "height", "resolution",
                                      "origin", "data"],
                         "properties": {"full": {"const": True},
                                        "width": {"type": "integer"},
                                        "height": {"type": "integer"},
                                        "resolution": {"type": "number"},
                                        "origin": {"type": "array"},
                                        "data": {"type": "string",
                                                 "contentEncoding": "base64"}}},
                        {"required": ["full", "changes"],
                         "properties": {"full": {"const": False},
                                        "changes": {"type": "array", "items": {
                                            "type": "array",
                                            "items": {"type": "integer"},
                                            "minItems": 3, "maxItems": 3}}}},
                    ],
                },
            },
        },
        "command": {
            "type": "object",
            "required": ["type", "v", "omega"],
            "properties": {
                "type": {"const": "command"},
                "t_client": {"type": "number"},
                "v": {"type": "number"},
                "omega": {"type": "number"},
            },
        },
        "ack": {
            "type": "object",
            "required": ["type", "v", "omega"],
            "properties": {
                "type": {"const": "ack"},
                "v": {"type": "number"},
                "omega": {"type": "number"},
            },
        },
        "error": {
            "type": "object",
            "required": ["type", "reason"],
            "properties": {
                "type": {"const": "error"},
                "reason": {"type": "string"},
            },
        },
    },
}


def emit_schema(path: str) -> None:
    from pathlib import Path

    Path(path).write_text(json.dumps(FRAME_SCHEMAS, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


if __name__ == "__main__":
    import argparse

    ap = argparse.ArgumentParser(description="bridge utilities")
    ap.add_argument("--emit-schema", metavar="PATH", required=True)
    ns = ap.parse_args()
    emit_schema(ns.emit_schema)
