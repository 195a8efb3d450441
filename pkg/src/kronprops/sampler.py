"""Exact samplers for the stochastic Kronecker graph and feature counting.

Two samplers draw from the same distribution: every unordered pair ``{u, v}``
with ``u != v`` is an edge independently with probability
``alpha**a * beta**s * gamma**d``, and every vertex independently carries a
loop with probability ``alpha**w * gamma**(k-w)``.

``sample_dense`` runs one Bernoulli trial per pair and is limited to small k.
``sample_stratified`` groups pairs into signature classes, draws a binomial
count per class and places that many distinct pairs uniformly inside the
class by unranking, so its cost scales with the number of edges drawn.

Random streams
--------------
Replicate ``r`` of seed ``s`` uses ``PCG64(SeedSequence(s, spawn_key=(r,)))``.
Streams for distinct replicate indices are independent, and a replicate's
sample does not depend on which other replicates were drawn or in what order.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ClassOverflow, TooLarge
from .model import InitiatorMatrix, ModelParams, PairSignature, signature_probability

#: Default largest k accepted by :func:`sample_dense`; ``KRON_MAX_DENSE_K`` overrides.
DEFAULT_MAX_DENSE_K = 14
#: Largest k accepted by :func:`sample_stratified` (vertex ids fit int64 comfortably).
MAX_STRATIFIED_K = 40
#: ``sampler="auto"`` picks the dense sampler up to this k.
AUTO_DENSE_MAX_K = 10
#: Largest class cardinality the unranking sampler will index.
MAX_CLASS_SIZE = 1 << 96

_BLOCK_ENTRIES = 1 << 22
_CACHE_MAX_K = 10
_BINOMIAL_CHUNK = 1 << 62
_INVERSION_MEAN = 30.0


def max_dense_k() -> int:
    value = os.environ.get("KRON_MAX_DENSE_K")
    return DEFAULT_MAX_DENSE_K if value is None else int(value)


def replicate_rng(seed: int, replicate: int = 0) -> np.random.Generator:
    """Generator for replicate ``replicate`` of ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replicate,))))


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One realization: sorted ``(m, 2)`` edge array with ``u < v`` and sorted loop ids."""

    params: ModelParams
    edges: np.ndarray
    loops: np.ndarray
    seed: int = 0
    replicate: int = 0

    def __post_init__(self) -> None:
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        loops = np.asarray(self.loops, dtype=np.int64).reshape(-1)
        n = self.params.n
        if edges.size:
            if np.any(edges[:, 0] >= edges[:, 1]):
                raise ValueError("edges must satisfy u < v (loops belong in `loops`)")
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError(f"edge endpoint outside [0, {n})")
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges = edges[order]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise ValueError("duplicate edge")
        if loops.size:
            loops = np.sort(loops)
            if loops[0] < 0 or loops[-1] >= n:
                raise ValueError(f"loop vertex outside [0, {n})")
            if np.any(loops[1:] == loops[:-1]):
                raise ValueError("duplicate loop")
        edges.flags.writeable = False
        loops.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "loops", loops)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphSample):
            return NotImplemented
        return (
            self.params == other.params
            and self.seed == other.seed
            and self.replicate == other.replicate
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.loops, other.loops)
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_loops(self) -> int:
        return len(self.loops)


@dataclass(frozen=True)
class FeatureCounts:
    isolated: int
    edges: int
    loops: int
    triangles: int
    degree_histogram: dict[int, int] = field(default_factory=dict)


# --------------------------------------------------------------------------
# dense sampler


def _probability_table(theta: InitiatorMatrix, k: int) -> np.ndarray:
    """``table[a, s]`` = class probability for ``d = k - a - s`` (zero where a + s > k)."""
    table = np.zeros((k + 1, k + 1))
    for a in range(k + 1):
        for s in range(k - a + 1):
            table[a, s] = signature_probability(PairSignature(a, s, k - a - s), theta)
    return table


def _loop_probabilities(theta: InitiatorMatrix, k: int) -> np.ndarray:
    table = _probability_table(theta, k)
    weights = np.bitwise_count(np.arange(1 << k, dtype=np.int64))
    return table[weights, 0]


def _triangle_block(table: np.ndarray, n: int, start: int, stop: int):
    """Pairs ``u < v`` with ``start <= u < stop`` in row-major order, with probabilities."""
    rows = np.arange(start, stop, dtype=np.int64)[:, None]
    cols = np.arange(n, dtype=np.int64)[None, :]
    mask = cols > rows
    u = np.broadcast_to(rows, mask.shape)[mask]
    v = np.broadcast_to(cols, mask.shape)[mask]
    p = table[np.bitwise_count(u & v), np.bitwise_count(u ^ v)]
    return u, v, p


@lru_cache(maxsize=8)
def _cached_triangle(theta: InitiatorMatrix, k: int):
    n = 1 << k
    u, v, p = _triangle_block(_probability_table(theta, k), n, 0, n)
    for arr in (u, v, p):
        arr.flags.writeable = False
    return u, v, p


def _dense_blocks(theta: InitiatorMatrix, k: int):
    if k <= _CACHE_MAX_K:
        yield _cached_triangle(theta, k)
        return
    n = 1 << k
    table = _probability_table(theta, k)
    step = max(1, _BLOCK_ENTRIES // n)
    for start in range(0, n, step):
        yield _triangle_block(table, n, start, min(n, start + step))


def sample_dense(params: ModelParams, seed: int = 0, replicate: int = 0) -> GraphSample:
    """One Bernoulli trial per vertex (loop) and per unordered pair (edge).

    The stream is consumed as ``n`` loop uniforms followed by the upper
    triangle in row-major order, so the result does not depend on blocking.
    """
    k = params.k
    cap = max_dense_k()
    if k > cap:
        raise TooLarge(f"dense sampler limited to k <= {cap}, got k={k}")
    rng = replicate_rng(seed, replicate)
    theta = params.initiator
    loop_hit = rng.random(params.n) < _loop_probabilities(theta, k)
    loops = np.flatnonzero(loop_hit)
    us, vs = [], []
    for u, v, p in _dense_blocks(theta, k):
        hit = rng.random(len(p)) < p
        us.append(u[hit])
        vs.append(v[hit])
    edges = np.column_stack([np.concatenate(us), np.concatenate(vs)])
    return GraphSample(params, edges, loops, seed, replicate)


# --------------------------------------------------------------------------
# stratified sampler


def unrank_combination(rank: int, n: int, r: int) -> tuple[int, ...]:
    """The ``rank``-th ``r``-subset of ``range(n)`` in lexicographic order."""
    if not 0 <= rank < math.comb(n, r):
        raise ValueError(f"rank {rank} outside [0, C({n},{r}))")
    out = []
    x = 0
    for i in range(r, 0, -1):
        while True:
            block = math.comb(n - x - 1, i - 1)
            if rank < block:
                break
            rank -= block
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def rank_combination(subset, n: int) -> int:
    """Inverse of :func:`unrank_combination`."""
    subset = sorted(subset)
    r = len(subset)
    rank = 0
    prev = -1
    for i, x in enumerate(subset):
        for y in range(prev + 1, x):
            rank += math.comb(n - y - 1, r - i - 1)
        prev = x
    return rank


def class_size(sig: PairSignature) -> int:
    """Number of unordered pairs ``{u, v}`` in the class (``u != v`` when ``s >= 1``).

    For ``s == 0`` this is the number of vertices of weight ``a``.
    """
    k = sig.k
    if sig.s == 0:
        return math.comb(k, sig.a)
    return math.comb(k, sig.a) * math.comb(k - sig.a, sig.d) << (sig.s - 1)


def unrank_pair(index: int, sig: PairSignature) -> tuple[int, int]:
    """The ``index``-th unordered pair of the class, as ``(u, v)`` with ``u <= v``.

    Pairs are ordered by (positions of shared ones, positions of shared
    zeros among the rest, orientation word).  The first mixed position
    always gives its 1 to ``v``, which makes ``u < v``; the orientation word
    assigns the remaining ``s - 1`` mixed positions, a 1 bit meaning ``u``
    gets the one.  Position 0 is the most significant label bit.
    """
    k, a, s, d = sig.k, sig.a, sig.s, sig.d
    if s == 0:
        positions = unrank_combination(index, k, a)
        x = sum(1 << (k - 1 - p) for p in positions)
        return x, x
    n_orient = 1 << (s - 1)
    n_zero = math.comb(k - a, d)
    index, orient = divmod(index, n_orient)
    ones_rank, zeros_rank = divmod(index, n_zero)
    ones = unrank_combination(ones_rank, k, a)
    one_set = set(ones)
    rest = [p for p in range(k) if p not in one_set]
    zeros = {rest[i] for i in unrank_combination(zeros_rank, k - a, d)}
    mixed = [p for p in rest if p not in zeros]
    u = v = sum(1 << (k - 1 - p) for p in ones)
    v |= 1 << (k - 1 - mixed[0])
    for t, p in enumerate(mixed[1:]):
        bit = 1 << (k - 1 - p)
        if (orient >> (s - 2 - t)) & 1:
            u |= bit
        else:
            v |= bit
    return u, v


def _randbelow(rng: np.random.Generator, bound: int) -> int:
    """Uniform integer in ``[0, bound)`` for arbitrarily large ``bound``."""
    if bound <= np.iinfo(np.int64).max:
        return int(rng.integers(bound))
    bits = bound.bit_length()
    words = (bits + 63) // 64
    excess = words * 64 - bits
    while True:
        value = 0
        for w in rng.integers(0, 1 << 64, size=words, dtype=np.uint64, endpoint=False):
            value = (value << 64) | int(w)
        value >>= excess
        if value < bound:
            return value


def _binomial_inversion(rng: np.random.Generator, trials: int, p: float) -> int:
    # numpy's small-mean path forms 1 - p, which is exactly 1.0 for p < 1e-16
    # and always returns 0 then; keep p intact and work from log1p instead.
    first = math.exp(trials * math.log1p(-p))
    ratio = p / (1.0 - p)
    while True:
        u = rng.random()
        pmf, x = first, 0
        while u > pmf and x < trials and pmf > 0.0:
            u -= pmf
            pmf *= (trials - x) / (x + 1) * ratio
            x += 1
        if u <= pmf:
            return x
        # rounding left u beyond the accumulated mass; redraw


def _binomial_small(rng: np.random.Generator, trials: int, p: float) -> int:
    if trials * p < _INVERSION_MEAN:
        return _binomial_inversion(rng, trials, p)
    return int(rng.binomial(trials, p))


def _binomial(rng: np.random.Generator, trials: int, p: float) -> int:
    """Exact Binomial(trials, p) draw for arbitrarily large ``trials``."""
    if trials < _BINOMIAL_CHUNK or trials * p < _INVERSION_MEAN:
        return _binomial_small(rng, trials, p)
    # a sum of independent binomials over pieces that numpy (or inversion) can take
    full, rest = divmod(trials, _BINOMIAL_CHUNK - 1)
    total = sum(_binomial_small(rng, _BINOMIAL_CHUNK - 1, p) for _ in range(full))
    return total + (_binomial_small(rng, rest, p) if rest else 0)


def floyd_sample(rng: np.random.Generator, population: int, m: int) -> list[int]:
    """``m`` distinct integers drawn uniformly from ``range(population)`` (Floyd)."""
    if not 0 <= m <= population:
        raise ValueError(f"cannot draw {m} distinct values from {population}")
    chosen: set[int] = set()
    for j in range(population - m, population):
        t = _randbelow(rng, j + 1)
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def _class_members(rng: np.random.Generator, sig: PairSignature, theta: InitiatorMatrix):
    size = class_size(sig)
    if size > MAX_CLASS_SIZE:
        raise ClassOverflow(f"class {sig} has {size} members, above {MAX_CLASS_SIZE}")
    p = signature_probability(sig, theta)
    if p == 0.0:
        return []
    if p == 1.0:
        return [unrank_pair(i, sig) for i in range(size)]
    m = _binomial(rng, size, p)
    return [unrank_pair(i, sig) for i in floyd_sample(rng, size, m)]


def sample_stratified(params: ModelParams, seed: int = 0, replicate: int = 0) -> GraphSample:
    """Per-class binomial counts, then uniform distinct pairs within each class.

    Classes are visited loops first (by weight), then edge classes ordered
    by ``(a, s)``.
    """
    k = params.k
    if k > MAX_STRATIFIED_K:
        raise TooLarge(f"stratified sampler limited to k <= {MAX_STRATIFIED_K}, got k={k}")
    rng = replicate_rng(seed, replicate)
    theta = params.initiator
    loops = []
    for a in range(k + 1):
        loops.extend(u for u, _ in _class_members(rng, PairSignature(a, 0, k - a), theta))
    edges = []
    for a in range(k + 1):
        for s in range(1, k - a + 1):
            edges.extend(_class_members(rng, PairSignature(a, s, k - a - s), theta))
    return GraphSample(params, np.array(edges, dtype=np.int64).reshape(-1, 2), loops, seed, replicate)


SAMPLERS = {"dense": sample_dense, "stratified": sample_stratified}


def sample(params: ModelParams, seed: int = 0, replicate: int = 0, sampler: str = "auto") -> GraphSample:
    """Dispatch to a sampler by name; ``auto`` uses dense for ``k <= 10``."""
    if sampler == "auto":
        sampler = "dense" if params.k <= AUTO_DENSE_MAX_K else "stratified"
    try:
        fn = SAMPLERS[sampler]
    except KeyError:
        raise ValueError(f"unknown sampler {sampler!r}") from None
    return fn(params, seed, replicate)


# --------------------------------------------------------------------------
# counting


def count_triangles(g: GraphSample) -> int:
    """Triangles on distinct vertices, counted once each.

    Every edge is oriented from its lower to its higher endpoint under the
    (degree, id) order; a triangle is then found exactly once, as the common
    out-neighbour of the endpoints of its lowest edge.
    """
    if len(g.edges) < 3:
        return 0
    pairs = g.edges.tolist()
    degree: dict[int, int] = defaultdict(int)
    for u, v in pairs:
        degree[u] += 1
        degree[v] += 1
    out: dict[int, set[int]] = defaultdict(set)
    for u, v in pairs:
        if (degree[u], u) < (degree[v], v):
            out[u].add(v)
        else:
            out[v].add(u)
    total = 0
    for u, nbrs in out.items():
        for v in nbrs:
            w = out.get(v)
            if w:
                total += len(nbrs & w)
    return total


def count_features(g: GraphSample) -> FeatureCounts:
    """Empirical feature counts.  A vertex with a loop is not isolated."""
    n = g.params.n
    touched, degrees = np.unique(g.edges.ravel(), return_counts=True)
    non_isolated = np.union1d(touched, g.loops)
    hist_deg, hist_count = np.unique(degrees, return_counts=True)
    histogram = {}
    if n - len(touched):
        histogram[0] = n - len(touched)
    histogram.update({int(d): int(c) for d, c in zip(hist_deg, hist_count)})
    return FeatureCounts(
        isolated=n - len(non_isolated),
        edges=len(g.edges),
        loops=len(g.loops),
        triangles=count_triangles(g),
        degree_histogram=histogram,
    )
