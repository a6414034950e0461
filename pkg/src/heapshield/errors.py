"""Exception hierarchy for heapshield.

Every error raised by the package derives from HeapshieldError so callers
(and the CLI) can map domain failures to a single exit path.
"""


class HeapshieldError(Exception):
    """Base class for all heapshield errors."""


class InvalidArgumentError(HeapshieldError, ValueError):
    """An argument violates a documented precondition."""


class BadReductionError(HeapshieldError):
    """A prime divides the curve discriminant; use reduction_type instead."""

    def __init__(self, prime: int, delta: int):
        self.prime = prime
        self.delta = delta
        super().__init__(
            f"prime {prime} divides the discriminant {delta}; "
            f"the curve has bad reduction there"
        )


class OutOfDomainError(HeapshieldError, ValueError):
    """A real parameter lies outside the region where the result converges."""


class ParamsError(HeapshieldError, ValueError):
    """Hash parameters are inconsistent (e.g. an empty selection window)."""


class DerivationFailureError(HeapshieldError):
    """The discriminant-window scan exceeded its step budget."""


class UnknownParamsError(HeapshieldError, ValueError):
    """A params_id does not match any registered parameter profile."""


class EnvelopeFormatError(HeapshieldError, ValueError):
    """A ciphertext envelope is malformed."""


class HeapError(HeapshieldError):
    """Base class for heap-simulator errors."""


class OutOfMemoryError(HeapError):
    """No free region is large enough for the requested allocation."""


class InvalidHandleError(HeapError):
    """The handle does not name a live allocation."""


class ScenarioFormatError(HeapshieldError):
    """A scenario file is missing or malformed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)
