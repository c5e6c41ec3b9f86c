"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from DprandError so callers can catch
domain failures without swallowing programming errors.
"""


class DprandError(Exception):
    """Base class for all toolkit-level failures."""


# --- entropy acquisition ---

class SourceUnavailable(DprandError):
    """The requested entropy source does not exist on this platform."""


class RetryExhausted(DprandError):
    """A source stayed not-ready for the full retry budget.

    Persistent not-ready signals indicate degraded hardware; callers decide
    the fallback policy, never this library.
    """

    def __init__(self, source: str, attempts: int):
        super().__init__(f"source {source!r} not ready after {attempts} attempts")
        self.source = source
        self.attempts = attempts


class EmptyInput(DprandError):
    """The mixer was asked to condition zero blocks of entropy."""


class RemoteTimeout(DprandError):
    """The remote entropy service did not answer in time."""


class BadResponse(DprandError):
    """The remote entropy service answered with the wrong status or length."""


class InsecureUseRefused(DprandError):
    """A deterministic or known-weak path was used without the explicit override."""


# --- deterministic random-bit generator ---

class BadSeedLength(DprandError):
    """Seed material is not the exact full-entropy length the DRBG requires."""


class ReseedRequired(DprandError):
    """The generate budget since the last reseed is spent; supply fresh entropy."""


class RequestTooLarge(DprandError):
    """A single generate request exceeded the configured byte limit."""


# --- stream management ---

class DuplicateSeed(DprandError):
    """Two spawned streams derived identical seed material (clone hazard)."""


# --- attack demonstration ---

class ChannelNotInvertible(DprandError):
    """The observation channel cannot map values back to unique generator words."""

    def __init__(self, message: str, coverage=None):
        super().__init__(message)
        self.coverage = coverage


# --- budget / quality ---

class InvalidSpec(DprandError):
    """A workload description contained zero, negative, or missing entries."""


class SampleTooSmall(DprandError):
    """Not enough bytes for the statistical tests to be meaningful."""
