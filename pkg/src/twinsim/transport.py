"""Simulated inter-site network: topics with delay, jitter, loss, bandwidth,
and the probes behind the latency/throughput metrics."""

from __future__ import annotations

import hashlib
import heapq
import math
from dataclasses import dataclass, field
from random import Random

from .encoding import decode_envelope, encode_envelope


class TransportConfigError(ValueError):
    pass


class UnknownTopicError(KeyError):
    pass


@dataclass(frozen=True)
class ChannelConfig:
    base_delay: float = 0.0
    jitter: float = 0.0          # uniform half-width
    loss_prob: float = 0.0
    bandwidth: float = 0.0       # bytes/second, 0 = unlimited
    seed: int = 0

    def __post_init__(self):
        if not (self.base_delay >= self.jitter >= 0.0):
            raise TransportConfigError("require base_delay >= jitter >= 0")
        if not (0.0 <= self.loss_prob <= 1.0):
            raise TransportConfigError("loss_prob must be in [0, 1]")
        if self.bandwidth < 0:
            raise TransportConfigError("bandwidth must be >= 0 (0 = unlimited)")


CHANNEL_PRESETS: dict[str, dict] = {
    # presets, not measured lab data
    "ideal": {"base_delay": 0.0, "jitter": 0.0, "loss_prob": 0.0, "bandwidth": 0},
    "wifi_good": {"base_delay": 0.005, "jitter": 0.002, "loss_prob": 0.001, "bandwidth": 0},
    "wifi_poor": {"base_delay": 0.100, "jitter": 0.040, "loss_prob": 0.05, "bandwidth": 0},
}


@dataclass
class TopicMetrics:
    sent_count: int = 0
    sent_bytes: int = 0
    recv_count: int = 0
    recv_bytes: int = 0
    dropped_count: int = 0
    latency_samples: list[float] = field(default_factory=list)


@dataclass
class Delivery:
    payload: bytes
    send_time: float
    recv_time: float
    seq: int


class _Topic:
    def __init__(self, name: str, direction: str, config: ChannelConfig, seed: int):
        self.name = name
        self.direction = direction
        self.config = config
        self.metrics = TopicMetrics()
        self.open_time = 0.0
        self._seq = 0
        self._link_busy_until = 0.0
        self._inflight: list[tuple[float, int, bytes]] = []  # (delivery_time, seq, envelope)
        # per-topic impairment stream, stable under topic set changes
        digest = hashlib.sha256(f"{seed}:{direction}:{name}".encode()).digest()
        self._rng = Random(int.from_bytes(digest[:8], "little"))


class Network:
    """All topics between the cyber and physical sites for one run."""

    def __init__(self, seed: int = 0):
        self._seed = seed
        self._topics: dict[tuple[str, str], _Topic] = {}

    def open_topic(self, name: str, config: ChannelConfig, direction: str,
                   now: float = 0.0) -> None:
        key = (name, direction)
        if key in self._topics:
            raise TransportConfigError(f"topic {name!r} already open for {direction}")
        topic = _Topic(name, direction, config, self._seed)
        topic.open_time = now
        self._topics[key] = topic

    def _get(self, name: str, direction: str) -> _Topic:
        topic = self._topics.get((name, direction))
        if topic is None:
            raise UnknownTopicError(f"{name} ({direction})")
        return topic

    def publish(self, name: str, direction: str, payload: bytes, now: float) -> None:
        t = self._get(name, direction)
        cfg = t.config
        t._seq += 1
        seq = t._seq
        t.metrics.sent_count += 1
        t.metrics.sent_bytes += len(payload)
        # loss first: a dropped message consumes no bandwidth
        if cfg.loss_prob > 0.0 and t._rng.random() < cfg.loss_prob:
            t.metrics.dropped_count += 1
            return
        jitter = t._rng.uniform(-cfg.jitter, cfg.jitter) if cfg.jitter > 0.0 else 0.0
        if cfg.bandwidth > 0:
            start_tx = max(now, t._link_busy_until)
            finish_tx = start_tx + len(payload) / cfg.bandwidth
            t._link_busy_until = finish_tx
        else:
            finish_tx = now
        delivery = finish_tx + cfg.base_delay + jitter
        envelope = encode_envelope(name, seq, now, payload)
        heapq.heappush(t._inflight, (delivery, seq, envelope))

    def poll(self, name: str, direction: str, now: float) -> list[Delivery]:
        t = self._get(name, direction)
        out: list[Delivery] = []
        while t._inflight and t._inflight[0][0] <= now:
            delivery_time, _, envelope = heapq.heappop(t._inflight)
            env = decode_envelope(envelope)
            t.metrics.recv_count += 1
            t.metrics.recv_bytes += len(env.payload)
            t.metrics.latency_samples.append(delivery_time - env.send_time)
            out.append(Delivery(env.payload, env.send_time, delivery_time, env.seq))
        return out

    def topic_names(self) -> list[tuple[str, str]]:
        return sorted(self._topics.keys())

    def metrics_snapshot(self, now: float, name: str | None = None,
                         direction: str | None = None) -> dict:
        """Per-topic summary plus totals: latency stats, throughputs, loss."""
        picked = {
            key: t for key, t in self._topics.items()
            if (name is None or key[0] == name) and (direction is None or key[1] == direction)
        }
        topics = {}
        for (tname, tdir), t in sorted(picked.items()):
            m = t.metrics
            elapsed = now - t.open_time
            lat = sorted(m.latency_samples)
            n = len(lat)
            summary = {
                "direction": tdir,
                "sent_count": m.sent_count,
                "sent_bytes": m.sent_bytes,
                "recv_count": m.recv_count,
                "recv_bytes": m.recv_bytes,
                "dropped_count": m.dropped_count,
                "latency_mean": sum(lat) / n if n else 0.0,
                "latency_median": _percentile(lat, 0.5),
                "latency_p95": _percentile(lat, 0.95),
                "send_throughput": m.sent_bytes / elapsed if elapsed > 0 else 0.0,
                "recv_throughput": m.recv_bytes / elapsed if elapsed > 0 else 0.0,
            }
            summary["throughput_loss"] = summary["send_throughput"] - summary["recv_throughput"]
            topics[f"{tname}:{tdir}"] = summary
        total_sent = sum(s["sent_bytes"] for s in topics.values())
        total_recv = sum(s["recv_bytes"] for s in topics.values())
        return {
            "topics": topics,
            "total_sent_bytes": total_sent,
            "total_recv_bytes": total_recv,
        }


def _percentile(sorted_vals: list[float], q: float) -> float:
    if not sorted_vals:
        return 0.0
    if len(sorted_vals) == 1:
        return sorted_vals[0]
    pos = q * (len(sorted_vals) - 1)
    lo = math.floor(pos)
    hi = math.ceil(pos)
    if lo == hi:
        return sorted_vals[lo]
    frac = pos - lo
    return sorted_vals[lo] * (1.0 - frac) + sorted_vals[hi] * frac
