"""Closed-form expectations, bounds and exact zero-count probabilities.

Every quantity here is computed from the signature-class structure: all
pairs with the same ``(a, s, d)`` share one edge probability, so sums and
products over ``4**k`` pairs collapse to ``O(k**2)`` (or ``O(k**3)``) terms.

Products of many ``(1 - p)`` factors are accumulated as sums of
``count * log1p(-p)`` and only exponentiated at the end.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import OracleTooLarge, WeightOutOfRange
from .model import (
    InitiatorMatrix,
    ModelParams,
    PairSignature,
    iter_signatures,
    signature_count,
    signature_probability,
)

#: Default largest k for which the O(8**k) triangle oracle may run.
K_MAX_TRIANGLE_ORACLE = 7

# exp() of anything below this is zero in double precision.
_LOG_UNDERFLOW = -745.0


class Feature(str, enum.Enum):
    ISOLATED_VERTICES = "IsolatedVertices"
    EDGES = "Edges"
    SELF_LOOPS = "SelfLoops"
    TWO_WALKS = "TwoWalks"
    TRIANGLES = "Triangles"


class Kind(str, enum.Enum):
    EXACT = "Exact"
    UPPER_BOUND = "UpperBound"
    PAPER_FORMULA = "PaperFormula"


class IsolatedBoundForm(str, enum.Enum):
    """Which isolated-vertex bound to evaluate.

    ``DERIVATION`` is ``2**k * exp(-(beta+gamma)**k)``, the value the
    per-vertex argument actually reaches.  ``STATED`` is
    ``(2 / e**(beta+gamma))**k``, the usual closed form and the one behind
    the ``beta + gamma > ln 2`` criterion.  They agree at ``k = 1`` and in
    general not beyond; only ``DERIVATION`` is guaranteed to bound the exact
    value.
    """

    DERIVATION = "Derivation"
    STATED = "Stated"


@dataclass(frozen=True)
class FeaturePrediction:
    feature: Feature
    kind: Kind
    value: float
    formula_id: str
    underflow: bool = False

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value >= 0.0):
            raise ValueError(f"prediction value must be finite and >= 0, got {self.value}")

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.value,
            "kind": self.kind.value,
            "value": self.value,
            "formula_id": self.formula_id,
            "underflow": self.underflow,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeaturePrediction":
        return cls(
            Feature(d["feature"]),
            Kind(d["kind"]),
            float(d["value"]),
            d["formula_id"],
            bool(d.get("underflow", False)),
        )


@dataclass(frozen=True)
class RegimeReport:
    no_isolated_whp: bool
    no_edges_whp: bool
    no_loops_whp: bool
    edge_threshold_margin: float
    loop_threshold_margin: float

    def to_dict(self) -> dict:
        return {
            "no_isolated_whp": self.no_isolated_whp,
            "no_edges_whp": self.no_edges_whp,
            "no_loops_whp": self.no_loops_whp,
            "edge_threshold_margin": self.edge_threshold_margin,
            "loop_threshold_margin": self.loop_threshold_margin,
        }


# --------------------------------------------------------------------------
# log-space helpers


def _log_sum_exp(logs: Iterable[float]) -> float:
    logs = [x for x in logs if x != -math.inf]
    if not logs:
        return -math.inf
    top = max(logs)
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


def _log_survival(p: float, count: float) -> float:
    """``log((1 - p) ** count)``; ``-inf`` when a certain event is present."""
    if count == 0 or p == 0.0:
        return 0.0
    if p >= 1.0:
        return -math.inf
    return count * math.log1p(-p)


def _exp_checked(log_value: float) -> tuple[float, bool]:
    if log_value == -math.inf:
        return 0.0, False
    if log_value < _LOG_UNDERFLOW:
        return 0.0, True
    return math.exp(log_value), False


def _check_weight(l: int, k: int) -> None:
    if not 0 <= l <= k:
        raise WeightOutOfRange(f"weight {l} outside [0, {k}]")


# --------------------------------------------------------------------------
# degrees and edges


def expected_degree(l: int, params: ModelParams) -> float:
    """Expected degree ``(alpha+beta)**l * (beta+gamma)**(k-l)`` of a weight-``l`` vertex.

    The self pair is included once, so this is the expected row sum of the
    edge-probability matrix.
    """
    _check_weight(l, params.k)
    a, b, g = params.initiator.as_tuple()
    return (a + b) ** l * (b + g) ** (params.k - l)


def expected_total_degree(params: ModelParams) -> float:
    """``(alpha + 2 beta + gamma)**k``: the sum of all ``4**k`` ordered-pair probabilities."""
    a, b, g = params.initiator.as_tuple()
    return (a + 2 * b + g) ** params.k


def expected_edges_paper(params: ModelParams) -> FeaturePrediction:
    return FeaturePrediction(
        Feature.EDGES,
        Kind.PAPER_FORMULA,
        0.5 * expected_total_degree(params),
        "(alpha+2*beta+gamma)**k/2",
    )


def _off_diagonal_mass(params: ModelParams) -> float:
    # sum of ordered-pair probabilities over pairs u != v, class by class
    theta = params.initiator
    return math.fsum(
        signature_count(sig, params.k) * signature_probability(sig, theta)
        for sig in iter_signatures(params.k)
        if sig.s > 0
    )


def expected_edges_exact(params: ModelParams) -> FeaturePrediction:
    """Expected number of non-loop edges, ``((alpha+2beta+gamma)**k - (alpha+gamma)**k) / 2``."""
    a, b, g = params.initiator.as_tuple()
    total = (a + 2 * b + g) ** params.k
    diagonal = (a + g) ** params.k
    if diagonal > 0.5 * total:
        # the difference would cancel badly; add up the off-diagonal classes instead
        value = 0.5 * _off_diagonal_mass(params)
    else:
        value = 0.5 * (total - diagonal)
    return FeaturePrediction(
        Feature.EDGES,
        Kind.EXACT,
        max(value, 0.0),
        "((alpha+2*beta+gamma)**k-(alpha+gamma)**k)/2",
    )


def expected_self_loops(params: ModelParams) -> FeaturePrediction:
    a, _, g = params.initiator.as_tuple()
    return FeaturePrediction(Feature.SELF_LOOPS, Kind.EXACT, (a + g) ** params.k, "(alpha+gamma)**k")


# --------------------------------------------------------------------------
# isolated vertices


def isolated_upper_bound(
    params: ModelParams, form: IsolatedBoundForm | str = IsolatedBoundForm.DERIVATION
) -> FeaturePrediction:
    form = IsolatedBoundForm(form)
    k = params.k
    bg = params.beta + params.gamma
    if form is IsolatedBoundForm.DERIVATION:
        log_value = k * math.log(2.0) - bg**k
        formula = "2**k*exp(-(beta+gamma)**k)"
    else:
        log_value = k * (math.log(2.0) - bg)
        formula = "(2/exp(beta+gamma))**k"
    value, underflow = _exp_checked(log_value)
    return FeaturePrediction(Feature.ISOLATED_VERTICES, Kind.UPPER_BOUND, value, formula, underflow)


def log_prob_isolated(l: int, params: ModelParams) -> float:
    """Log-probability that a fixed weight-``l`` vertex has no edge and no loop.

    Partners are grouped by ``i`` (ones shared with the vertex) and ``j``
    (ones the partner has where the vertex has zeros); the ``(i=l, j=0)``
    group is the vertex itself, i.e. its loop.
    """
    k = params.k
    _check_weight(l, k)
    theta = params.initiator
    total = 0.0
    for i in range(l + 1):
        for j in range(k - l + 1):
            p = signature_probability(PairSignature(i, (l - i) + j, k - l - j), theta)
            total += _log_survival(p, math.comb(l, i) * math.comb(k - l, j))
            if total == -math.inf:
                return total
    return total


def expected_isolated_exact(params: ModelParams) -> FeaturePrediction:
    """Exact expected number of isolated vertices (no incident edge, no loop)."""
    k = params.k
    log_probs = [log_prob_isolated(l, params) for l in range(k + 1)]
    log_total = _log_sum_exp(math.log(math.comb(k, l)) + lp for l, lp in enumerate(log_probs))
    value, underflow = _exp_checked(log_total)
    if value > 0.0:
        # sum directly so that exact cases (e.g. the empty graph) stay exact
        value = math.fsum(math.comb(k, l) * math.exp(lp) for l, lp in enumerate(log_probs))
    return FeaturePrediction(
        Feature.ISOLATED_VERTICES,
        Kind.EXACT,
        value,
        "sum_l C(k,l) prod_ij (1-alpha**i*beta**(l-i+j)*gamma**(k-l-j))**(C(l,i)*C(k-l,j))",
        underflow,
    )


# --------------------------------------------------------------------------
# two-walks and triangles


def expected_two_walks_from(l1: int, params: ModelParams) -> float:
    """Expected number of ordered 2-walks ``(v1, v2, v3)`` out of a weight-``l1`` vertex.

    Repeated vertices are allowed, so this is the row sum of ``P @ P``.
    The factor ``(beta+gamma)**k`` is multiplied through each position, so
    no division by ``beta + gamma`` occurs and the ``beta + gamma -> 0``
    limit comes out finite.
    """
    k = params.k
    _check_weight(l1, k)
    a, b, g = params.initiator.as_tuple()
    bg = b + g
    return (a * (a + b) + b * bg) ** l1 * (b * (a + b) + g * bg) ** (k - l1)


def two_walk_total(params: ModelParams) -> float:
    """Expected number of ordered 2-walks over all start vertices.

    Equal to ``((alpha+beta)**2 + (beta+gamma)**2)**k``.
    """
    a, b, g = params.initiator.as_tuple()
    bg = b + g
    return (a * (a + b) + b * bg + b * (a + b) + g * bg) ** params.k


def triangle_upper_bound(params: ModelParams) -> FeaturePrediction:
    """Two-walk total times ``alpha**k``, the largest possible closing-edge probability.

    Degenerate walks and both orientations of each triangle are kept in, as
    in the usual statement of the bound.
    """
    value = two_walk_total(params) * params.alpha**params.k
    return FeaturePrediction(
        Feature.TRIANGLES,
        Kind.UPPER_BOUND,
        value,
        "(beta+gamma)**k*alpha**k*(alpha*(alpha+beta)/(beta+gamma)+beta+beta*(alpha+beta)/(beta+gamma)+gamma)**k",
    )


def probability_matrix(params: ModelParams) -> np.ndarray:
    """Dense ``n x n`` matrix of edge probabilities (``k``-fold Kronecker power of theta)."""
    a, b, g = params.initiator.as_tuple()
    base = np.array([[g, b], [b, a]])
    out = base
    for _ in range(params.k - 1):
        out = np.kron(out, base)
    return out


def expected_triangles_exact(
    params: ModelParams, k_max_oracle: int = K_MAX_TRIANGLE_ORACLE
) -> FeaturePrediction:
    """Sum over unordered distinct triples of the product of their three edge probabilities.

    Brute force (``O(8**k)``); refuses ``k > k_max_oracle``.
    """
    if params.k > k_max_oracle:
        raise OracleTooLarge(f"triangle oracle limited to k <= {k_max_oracle}, got k={params.k}")
    p = probability_matrix(params)
    np.fill_diagonal(p, 0.0)
    # trace(P^3) counts each distinct triple 6 times (3 starts x 2 directions)
    value = float(np.sum((p @ p) * p)) / 6.0
    return FeaturePrediction(
        Feature.TRIANGLES, Kind.EXACT, max(value, 0.0), "sum_{u<v<w} P[u,v]*P[v,w]*P[u,w]"
    )


# --------------------------------------------------------------------------
# zero-count probabilities


def log_prob_no_loops(params: ModelParams) -> float:
    k = params.k
    theta = params.initiator
    return math.fsum(
        _log_survival(signature_probability(PairSignature(a, 0, k - a), theta), math.comb(k, a))
        for a in range(k + 1)
    )


def log_prob_no_edges(params: ModelParams, include_loops: bool = False) -> float:
    theta = params.initiator
    k = params.k
    total = 0.0
    for sig in iter_signatures(k):
        if sig.s == 0:
            continue
        # ordered count is even for s >= 1; halve for unordered pairs
        total += _log_survival(signature_probability(sig, theta), signature_count(sig, k) // 2)
        if total == -math.inf:
            return total
    if include_loops:
        total += log_prob_no_loops(params)
    return total


def prob_no_edges_exact(params: ModelParams, include_loops: bool = False) -> float:
    """Exact probability that a realization has no non-loop edge (and no loop, if asked)."""
    return math.exp(log_prob_no_edges(params, include_loops))


def prob_no_loops_exact(params: ModelParams) -> float:
    """Exact probability that no vertex carries a self loop."""
    return math.exp(log_prob_no_loops(params))


# --------------------------------------------------------------------------
# regimes


def regime_report(theta: InitiatorMatrix) -> RegimeReport:
    a, b, g = theta.as_tuple()
    edge_margin = a + 2 * b + g - 1.0
    loop_margin = a + g - 1.0
    return RegimeReport(
        no_isolated_whp=b + g > math.log(2.0),
        no_edges_whp=edge_margin < 0.0,
        no_loops_whp=loop_margin < 0.0,
        edge_threshold_margin=edge_margin,
        loop_threshold_margin=loop_margin,
    )


def all_predictions(params: ModelParams) -> dict[str, FeaturePrediction]:
    """Every prediction available for ``params``, keyed by a stable name.

    The triangle oracle is included only when ``k`` is within its default limit.
    """
    out = {
        "isolated_exact": expected_isolated_exact(params),
        "isolated_bound_derivation": isolated_upper_bound(params, IsolatedBoundForm.DERIVATION),
        "isolated_bound_stated": isolated_upper_bound(params, IsolatedBoundForm.STATED),
        "edges_paper": expected_edges_paper(params),
        "edges_exact": expected_edges_exact(params),
        "self_loops": expected_self_loops(params),
        "two_walks": FeaturePrediction(
            Feature.TWO_WALKS, Kind.EXACT, two_walk_total(params), "((alpha+beta)**2+(beta+gamma)**2)**k"
        ),
        "triangle_bound": triangle_upper_bound(params),
    }
    if params.k <= K_MAX_TRIANGLE_ORACLE:
        out["triangles_exact"] = expected_triangles_exact(params)
    return out
