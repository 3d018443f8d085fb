"""Exception types raised across the simulator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class TopologyError(SimError):
    """A topology invariant was violated (self-loop, duplicate link, dangling node)."""


class TopologyParseError(TopologyError):
    """Malformed topology document; carries the offending line number."""

    def __init__(self, message, line_no):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NoSuchNodeError(SimError):
    """A route endpoint does not exist in the topology."""


class LinkDownError(SimError):
    """Operation requires an up link but the link is failed."""


class ChannelBusyError(SimError):
    """Attempt to occupy a wavelength channel that already has an owner."""


class ChannelFreeError(SimError):
    """Attempt to release a wavelength channel that is already free."""


class NotOwnerError(SimError):
    """Release attempted by a lightpath that does not own the channel."""


class UnknownSequenceError(SimError):
    """Probe feedback referenced a sequence number never emitted."""


class DuplicateFeedbackError(SimError):
    """Probe feedback arrived twice for the same sequence number."""


class ConfigError(SimError):
    """Scenario configuration is malformed or out of range."""
