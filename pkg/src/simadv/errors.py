"""Exception hierarchy.

Every failure the library raises derives from SimadvError so callers (and the
CLI) can map any library error to a single exit path while still being able
to tell protocol failures, oracle faults and config problems apart.
"""


class SimadvError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SimadvError):
    """A vector's length does not match the domain/policy dimensionality."""


class DomainError(SimadvError):
    """Invalid parameter-domain construction (bad bounds, names, ...)."""


class LandscapeError(SimadvError):
    """Invalid built-in landscape parameters."""


class OracleFault(SimadvError):
    """The system under test produced an unusable result (e.g. a non-finite
    score, or an explicit error response). Carries the offending parameter
    vector when known."""

    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = None if params is None else list(map(float, params))


class ProtocolError(SimadvError):
    """Base class for external-SUT wire protocol failures."""


class SpawnError(ProtocolError):
    """The external SUT process could not be launched."""


class HandshakeError(ProtocolError):
    """No valid hello within the handshake timeout, or a malformed hello."""


class HelloDimsMismatch(ProtocolError):
    """The external SUT declared a dimensionality we did not expect."""


class EvalTimeout(ProtocolError):
    """No response to an eval request within the eval timeout."""


class MalformedMessage(ProtocolError):
    """A line from the external SUT was not a valid protocol message."""


class IdMismatch(ProtocolError):
    """A response carried an id different from the outstanding request."""


class SessionClosed(ProtocolError):
    """The session was closed while a request was outstanding, or used
    after close."""


class NonAdversarialSeed(SimadvError):
    """Region discovery was seeded at a point whose loss is not above the
    threshold."""


class ConfigError(SimadvError):
    """Run configuration is invalid; the message names the offending field."""


class SearchAborted(SimadvError):
    """An oracle fault interrupted a search run. The partial state gathered
    so far is attached."""

    def __init__(self, message, state):
        super().__init__(message)
        self.state = state


class RegionAborted(SimadvError):
    """An oracle fault interrupted region discovery. The partial region
    (marked truncated) is attached."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial
