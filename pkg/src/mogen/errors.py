"""Exception types shared across the package."""

from __future__ import annotations


class MogenError(Exception):
    """Base class for all errors raised by this package."""


class NgramParseError(MogenError):
    """A line of an ngram file could not be parsed."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class UnknownNodeError(MogenError):
    """A node label or id is not part of the vocabulary."""


class UnseenTransitionError(MogenError):
    """A path requires a transition that the fitted model does not contain.

    ``structural`` distinguishes transitions that are impossible under the
    training topology from transitions that are possible but unobserved.
    """

    def __init__(self, source, target, structural: bool):
        kind = "structurally impossible" if structural else "unobserved"
        super().__init__(f"{kind} transition {source!r} -> {target!r}")
        self.source = source
        self.target = target
        self.structural = structural


class MissingStateError(MogenError):
    """A prediction was requested for a state the model does not contain
    and no fallback policy was supplied."""


class DegreesOfFreedomOverflowError(MogenError):
    """Walk counts exceeded the 64-bit integer range while computing
    degrees of freedom."""
