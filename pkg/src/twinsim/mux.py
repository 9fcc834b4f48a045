"""Priority velocity multiplexer: one command source wins per arbitration."""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Twist


class MuxConfigError(ValueError):
    pass


class UnknownChannelError(KeyError):
    pass


@dataclass(frozen=True)
class MuxChannel:
    name: str
    priority: int      # higher wins
    timeout: float     # seconds a message stays fresh

    def __post_init__(self):
        if self.timeout <= 0:
            raise MuxConfigError(f"channel {self.name}: timeout must be positive")


@dataclass
class _ChannelState:
    channel: MuxChannel
    last_cmd: Twist | None = None
    last_time: float = -1.0


@dataclass
class VelocityMux:
    """Latest-wins, depth-1 arbitration across prioritized channels.

    ``arbitrate`` picks the highest-priority channel whose newest message is
    within its timeout; with nothing fresh the caller must command zero.
    """

    _channels: dict[str, _ChannelState] = field(default_factory=dict)
    active_channel: str | None = None

    def register_channel(self, channel: MuxChannel) -> None:
        if channel.name in self._channels:
            raise MuxConfigError(f"duplicate channel name {channel.name!r}")
        if any(s.channel.priority == channel.priority for s in self._channels.values()):
            raise MuxConfigError(f"duplicate priority {channel.priority}")
        self._channels[channel.name] = _ChannelState(channel)

    def offer(self, channel_name: str, cmd: Twist, now: float) -> None:
        state = self._channels.get(channel_name)
        if state is None:
            raise UnknownChannelError(channel_name)
        state.last_cmd = cmd
        state.last_time = now

    def latest(self, channel_name: str, now: float) -> Twist | None:
        """The channel's newest command if still fresh, else None."""
        state = self._channels.get(channel_name)
        if state is None or state.last_cmd is None:
            return None
        if now - state.last_time > state.channel.timeout:
            return None
        return state.last_cmd

    def arbitrate(self, now: float) -> Twist | None:
        best: _ChannelState | None = None
        for state in self._channels.values():
            if state.last_cmd is None:
                continue
            if now - state.last_time > state.channel.timeout:
                continue
            if best is None or state.channel.priority > best.channel.priority:
                best = state
        if best is None:
            self.active_channel = None
            return None
        self.active_channel = best.channel.name
        return best.last_cmd

    @property
    def channels(self) -> list[MuxChannel]:
        return [s.channel for s in self._channels.values()]
