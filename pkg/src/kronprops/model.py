"""Model parameters, vertex labels and the edge-probability kernel.

A vertex of the order-``k`` graph is the integer ``x`` in ``[0, 2**k)``.  Its
label is the big-endian binary expansion of ``x``: bit ``u_1`` is the most
significant one.  The weight of a vertex is its popcount.

The probability of the edge ``(u, v)`` is the product over bit positions of
``theta[u_b, v_b]`` with ``theta[1, 1] = alpha``, ``theta[0, 1] = theta[1, 0]
= beta`` and ``theta[0, 0] = gamma``.  Only three things about a pair matter
for that product: how many positions are (1, 1), how many are mixed and how
many are (0, 0).  :class:`PairSignature` carries those three counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import (
    InvalidPower,
    InvalidSignature,
    LengthMismatch,
    NonFiniteParameter,
    OrderingViolation,
    RangeViolation,
)

#: Largest Kronecker power accepted by :class:`ModelParams`; labels fit a
#: signed 64-bit word.
MAX_K = 63

# Below this parameter value, or above this k, probabilities are formed in
# log space before being exponentiated.
_LOG_SPACE_PARAM = 1e-3
_LOG_SPACE_K = 40


@dataclass(frozen=True)
class InitiatorMatrix:
    """Symmetric 2x2 initiator ``[[gamma, beta], [beta, alpha]]``.

    Construction validates ``0 <= gamma <= beta <= alpha <= 1``.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise NonFiniteParameter(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise NonFiniteParameter(f"{name} must be finite, got {value!r}")
            if not 0.0 <= value <= 1.0:
                raise RangeViolation(f"{name} must lie in [0, 1], got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.gamma > self.beta:
            raise OrderingViolation(
                f"gamma <= beta violated: gamma={self.gamma!r} > beta={self.beta!r}"
            )
        if self.beta > self.alpha:
            raise OrderingViolation(
                f"beta <= alpha violated: beta={self.beta!r} > alpha={self.alpha!r}"
            )

    def entry(self, x: int, y: int) -> float:
        """``theta[x, y]`` for bits ``x, y``."""
        if x and y:
            return self.alpha
        if x or y:
            return self.beta
        return self.gamma

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


def validate_initiator(alpha: float, beta: float, gamma: float) -> InitiatorMatrix:
    """Build an :class:`InitiatorMatrix`, raising on any constraint violation.

    Raises
    ------
    NonFiniteParameter
        If a value is NaN, infinite or not a real number.
    RangeViolation
        If a value lies outside ``[0, 1]``.
    OrderingViolation
        If ``gamma <= beta <= alpha`` does not hold.
    """
    return InitiatorMatrix(alpha, beta, gamma)


@dataclass(frozen=True)
class ModelParams:
    """An initiator together with the Kronecker power ``k`` (``n = 2**k``)."""

    initiator: InitiatorMatrix
    k: int

    def __post_init__(self) -> None:
        if isinstance(self.k, bool) or not isinstance(self.k, int):
            raise InvalidPower(f"k must be an integer, got {self.k!r}")
        if not 1 <= self.k <= MAX_K:
            raise InvalidPower(f"k must lie in [1, {MAX_K}], got {self.k}")

    @classmethod
    def of(cls, alpha: float, beta: float, gamma: float, k: int) -> "ModelParams":
        return cls(validate_initiator(alpha, beta, gamma), k)

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def alpha(self) -> float:
        return self.initiator.alpha

    @property
    def beta(self) -> float:
        return self.initiator.beta

    @property
    def gamma(self) -> float:
        return self.initiator.gamma


@dataclass(frozen=True)
class VertexLabel:
    """A k-bit vertex label stored as its integer id."""

    index: int
    k: int

    def __post_init__(self) -> None:
        if not 1 <= self.k <= MAX_K:
            raise InvalidPower(f"k must lie in [1, {MAX_K}], got {self.k}")
        if not 0 <= self.index < (1 << self.k):
            raise LengthMismatch(f"vertex {self.index} does not fit in {self.k} bits")

    @classmethod
    def from_bits(cls, bits) -> "VertexLabel":
        """Label from the sequence ``(u_1, ..., u_k)``, most significant first."""
        bits = tuple(int(b) for b in bits)
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"bits must be 0 or 1, got {bits}")
        index = 0
        for b in bits:
            index = (index << 1) | b
        return cls(index, len(bits))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.index >> (self.k - 1 - b)) & 1 for b in range(self.k))

    @property
    def weight(self) -> int:
        return self.index.bit_count()


LabelLike = Union[VertexLabel, int]


@dataclass(frozen=True)
class PairSignature:
    """Agreement profile ``(a, s, d)`` of an ordered vertex pair.

    ``a`` positions where both labels are 1, ``s`` positions where they
    differ, ``d`` positions where both are 0.
    """

    a: int
    s: int
    d: int

    def __post_init__(self) -> None:
        if min(self.a, self.s, self.d) < 0:
            raise InvalidSignature(f"negative count in {self}")

    @property
    def k(self) -> int:
        return self.a + self.s + self.d

    @property
    def is_diagonal(self) -> bool:
        return self.s == 0


def _as_index(label: LabelLike, k: int) -> int:
    if isinstance(label, VertexLabel):
        if label.k != k:
            raise LengthMismatch(f"label has {label.k} bits, expected {k}")
        return label.index
    if isinstance(label, bool) or not isinstance(label, int):
        raise TypeError(f"expected VertexLabel or int, got {type(label).__name__}")
    if not 0 <= label < (1 << k):
        raise LengthMismatch(f"vertex {label} does not fit in {k} bits")
    return label


def _common_k(u: LabelLike, v: LabelLike) -> int:
    if isinstance(u, VertexLabel) and isinstance(v, VertexLabel):
        if u.k != v.k:
            raise LengthMismatch(f"labels have {u.k} and {v.k} bits")
        return u.k
    if isinstance(u, VertexLabel):
        return u.k
    if isinstance(v, VertexLabel):
        return v.k
    raise TypeError("pair_signature needs at least one VertexLabel to know k")


def pair_signature(u: LabelLike, v: LabelLike, k: int | None = None) -> PairSignature:
    """Signature of the ordered pair ``(u, v)``.

    Plain integer ids are accepted when ``k`` is given (or when the other
    argument is a :class:`VertexLabel`).
    """
    if k is None:
        k = _common_k(u, v)
    x, y = _as_index(u, k), _as_index(v, k)
    a = (x & y).bit_count()
    s = (x ^ y).bit_count()
    return PairSignature(a, s, k - a - s)


def edge_probability(u: LabelLike, v: LabelLike, params: ModelParams) -> float:
    """``prod_b theta[u_b, v_b]`` evaluated position by position."""
    k = params.k
    x, y = _as_index(u, k), _as_index(v, k)
    theta = params.initiator
    p = 1.0
    for b in range(k):
        p *= theta.entry((x >> b) & 1, (y >> b) & 1)
    return p


def _pow(base: float, exp: int) -> float:
    # 0**0 == 1 by the empty-product convention; Python already agrees.
    return base**exp


def log_signature_probability(sig: PairSignature, theta: InitiatorMatrix) -> float:
    """``a log(alpha) + s log(beta) + d log(gamma)``; ``-inf`` for a zero factor."""
    total = 0.0
    for base, exp in ((theta.alpha, sig.a), (theta.beta, sig.s), (theta.gamma, sig.d)):
        if exp == 0:
            continue
        if base == 0.0:
            return -math.inf
        total += exp * math.log(base)
    return total


def signature_probability(sig: PairSignature, theta: InitiatorMatrix) -> float:
    """Edge probability ``alpha**a * beta**s * gamma**d`` shared by a signature class."""
    used = [base for base, exp in zip(theta.as_tuple(), (sig.a, sig.s, sig.d)) if exp]
    if 0.0 in used:
        return 0.0
    if sig.k > _LOG_SPACE_K or any(base < _LOG_SPACE_PARAM for base in used):
        return math.exp(log_signature_probability(sig, theta))
    return _pow(theta.alpha, sig.a) * _pow(theta.beta, sig.s) * _pow(theta.gamma, sig.d)


def signature_count(sig: PairSignature, k: int) -> int:
    """Number of ordered pairs with this signature, ``k!/(a! s! d!) * 2**s``.

    Returned as a Python ``int`` and therefore exact for every supported k.
    """
    if sig.k != k:
        raise InvalidSignature(f"{sig} does not sum to k={k}")
    return math.comb(k, sig.a) * math.comb(k - sig.a, sig.s) << sig.s


def iter_signatures(k: int) -> Iterator[PairSignature]:
    """All signatures with ``a + s + d = k``, ordered by ``a`` then ``s``."""
    for a in range(k + 1):
        for s in range(k - a + 1):
            yield PairSignature(a, s, k - a - s)
