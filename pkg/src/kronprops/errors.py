"""Exception hierarchy.

Everything raised on bad input derives from :class:`KroneckerError`, which is
itself a :class:`ValueError` so callers that only care about "bad argument"
can keep catching that.
"""


class KroneckerError(ValueError):
    """Base class for all validation errors raised by kronprops."""


class RangeViolation(KroneckerError):
    """An initiator entry lies outside [0, 1]."""


class OrderingViolation(KroneckerError):
    """The initiator entries break gamma <= beta <= alpha."""


class NonFiniteParameter(KroneckerError):
    """An initiator entry is NaN or infinite."""


class InvalidPower(KroneckerError):
    """The Kronecker power k is not an integer in the supported range."""


class LengthMismatch(KroneckerError):
    """Two vertex labels, or a label and the model, disagree on k."""


class InvalidSignature(KroneckerError):
    """A pair signature whose counts do not add up to k."""


class WeightOutOfRange(KroneckerError):
    """A vertex weight outside [0, k]."""


class OracleTooLarge(KroneckerError):
    """A brute-force computation was requested for too large a k."""


class TooLarge(KroneckerError):
    """k exceeds the cap of the requested sampler."""


class ClassOverflow(KroneckerError):
    """A signature class is too large to index."""


class EdgeListFormatError(KroneckerError):
    """An edge-list file does not follow the documented layout."""
