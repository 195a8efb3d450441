import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from kronprops.analytic import expected_edges_exact, expected_self_loops
from kronprops.errors import ClassOverflow, TooLarge
from kronprops.model import ModelParams, PairSignature, edge_probability, iter_signatures, pair_signature
from kronprops.sampler import (
    GraphSample,
    _binomial,
    class_size,
    count_features,
    count_triangles,
    floyd_sample,
    rank_combination,
    replicate_rng,
    sample,
    sample_dense,
    sample_stratified,
    unrank_combination,
    unrank_pair,
)

THETA = (0.8, 0.6, 0.4)
SAMPLERS = [sample_dense, sample_stratified]


def P(k, theta=THETA):
    return ModelParams.of(*theta, k)


def graph(k, edges, loops=()):
    return GraphSample(P(k), np.array(edges, dtype=np.int64).reshape(-1, 2), np.array(loops, dtype=np.int64))


class TestTrivialGraphs:
    @pytest.mark.parametrize("fn", SAMPLERS)
    @pytest.mark.parametrize("k", [1, 3, 5])
    def test_complete(self, fn, k):
        g = fn(P(k, (1, 1, 1)), seed=3)
        n = 1 << k
        assert g.n_loops == n
        assert g.n_edges == n * (n - 1) // 2
        assert count_features(g).isolated == 0

    @pytest.mark.parametrize("fn", SAMPLERS)
    def test_empty(self, fn):
        g = fn(P(6, (0, 0, 0)), seed=3)
        assert g.n_edges == 0 and g.n_loops == 0
        c = count_features(g)
        assert c.isolated == 64 and c.triangles == 0 and c.degree_histogram == {0: 64}

    @pytest.mark.parametrize("fn", SAMPLERS)
    def test_only_all_ones_block(self, fn):
        # beta = gamma = 0 keeps only the pair (ones, ones): a single loop
        g = fn(P(5, (0.999999, 0, 0)), seed=1)
        assert g.n_edges == 0
        assert set(g.loops.tolist()) <= {31}


class TestDeterminism:
    @pytest.mark.parametrize("fn", SAMPLERS)
    def test_same_seed_same_graph(self, fn):
        assert fn(P(6), seed=42, replicate=3) == fn(P(6), seed=42, replicate=3)

    @pytest.mark.parametrize("fn", SAMPLERS)
    def test_streams_differ(self, fn):
        a = fn(P(6), seed=42, replicate=0)
        assert a != fn(P(6), seed=42, replicate=1)
        assert a != fn(P(6), seed=43, replicate=0)

    def test_replicate_streams_independent_of_order(self):
        x = replicate_rng(7, 5).random(4)
        replicate_rng(7, 4).random(100)
        assert np.array_equal(x, replicate_rng(7, 5).random(4))

    def test_auto_dispatch(self):
        assert sample(P(6), seed=1) == sample_dense(P(6), seed=1)
        assert sample(P(11), seed=1) == sample_stratified(P(11), seed=1)
        with pytest.raises(ValueError):
            sample(P(3), sampler="magic")


def _pair_frequencies(fn, k, reps, seed):
    n = 1 << k
    hits = np.zeros((n, n))
    for r in range(reps):
        g = fn(P(k), seed=seed, replicate=r)
        for u, v in g.edges:
            hits[u, v] += 1
        for u in g.loops:
            hits[u, u] += 1
    return hits / reps


@pytest.mark.parametrize("fn,reps", [(sample_dense, 20000), (sample_stratified, 5000)])
def test_pair_frequencies_match_kernel(fn, reps):
    k = 3
    freq = _pair_frequencies(fn, k, reps, seed=11)
    params = P(k)
    for u in range(1 << k):
        for v in range(u, 1 << k):
            p = edge_probability(u, v, params)
            sigma = math.sqrt(p * (1 - p) / reps)
            assert abs(freq[u, v] - p) <= 4 * sigma + 1e-12, (u, v, freq[u, v], p)
        for v in range(u):
            assert freq[u, v] == 0.0


class TestRanking:
    @pytest.mark.parametrize("n,r", [(5, 0), (5, 2), (6, 3), (7, 7)])
    def test_combination_roundtrip(self, n, r):
        combos = list(itertools.combinations(range(n), r))
        assert [unrank_combination(i, n, r) for i in range(len(combos))] == combos
        assert [rank_combination(c, n) for c in combos] == list(range(len(combos)))

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_unrank_pair_covers_each_pair_once(self, k):
        seen = {}
        for sig in iter_signatures(k):
            for i in range(class_size(sig)):
                u, v = unrank_pair(i, sig)
                assert u <= v and (u == v) == (sig.s == 0)
                assert pair_signature(u, v, k) == sig
                assert (u, v) not in seen
                seen[(u, v)] = sig
        n = 1 << k
        assert len(seen) == n * (n + 1) // 2

    def test_class_sizes_sum(self):
        k = 30
        n = 1 << k
        total = sum(class_size(s) for s in iter_signatures(k))
        assert total == n * (n + 1) // 2

    def test_unrank_large_class(self):
        sig = PairSignature(13, 14, 13)
        last = unrank_pair(class_size(sig) - 1, sig)
        assert pair_signature(*last, 40) == sig


class TestRandomPrimitives:
    def test_floyd_distinct_sorted(self):
        rng = np.random.default_rng(0)
        xs = floyd_sample(rng, 1 << 80, 50)
        assert xs == sorted(set(xs)) and len(xs) == 50 and xs[-1] < 1 << 80
        assert floyd_sample(rng, 7, 7) == list(range(7))
        with pytest.raises(ValueError):
            floyd_sample(rng, 3, 4)

    def test_floyd_uniform(self):
        rng = np.random.default_rng(1)
        counts = np.zeros(10)
        reps = 20000
        for _ in range(reps):
            counts[floyd_sample(rng, 10, 3)] += 1
        p = 0.3
        assert np.all(np.abs(counts / reps - p) <= 4 * math.sqrt(p * (1 - p) / reps))

    @pytest.mark.parametrize("trials,p", [(1 << 70, 2.0**-66), (1 << 40, 1e-11), (1000, 0.3), (1 << 63, 1e-17)])
    def test_binomial_mean(self, trials, p):
        rng = np.random.default_rng(5)
        reps = 400
        draws = np.array([_binomial(rng, trials, p) for _ in range(reps)], dtype=float)
        mean = trials * p
        assert abs(draws.mean() - mean) <= 4 * math.sqrt(mean * (1 - p) / reps)

    def test_binomial_extremes(self):
        rng = np.random.default_rng(0)
        assert _binomial(rng, 10, 0.0) == 0
        assert _binomial(rng, 0, 0.5) == 0


def test_stratified_large_k_edge_count():
    # sparse regime at k = 40: counts must track the expectation
    params = P(40, (0.5, 0.3, 0.1))
    mean = expected_edges_exact(params).value
    counts = [sample_stratified(params, seed=9, replicate=r).n_edges for r in range(20)]
    assert abs(np.mean(counts) - mean) <= 4 * math.sqrt(mean / 20)
    loops = expected_self_loops(params).value
    assert loops < 1e-6


def test_class_overflow_is_reported(monkeypatch):
    import kronprops.sampler as s

    monkeypatch.setattr(s, "MAX_CLASS_SIZE", 10)
    with pytest.raises(ClassOverflow):
        sample_stratified(P(6), seed=0)


class TestLimits:
    def test_dense_cap(self):
        with pytest.raises(TooLarge):
            sample_dense(P(15))

    def test_dense_cap_env(self, monkeypatch):
        monkeypatch.setenv("KRON_MAX_DENSE_K", "4")
        with pytest.raises(TooLarge):
            sample_dense(P(5))
        sample_dense(P(4))

    def test_stratified_cap(self):
        with pytest.raises(TooLarge):
            sample_stratified(P(41))


class TestGraphSample:
    def test_sorted_and_readonly(self):
        g = graph(3, [(2, 5), (0, 7), (0, 3)], [6, 1])
        assert g.edges.tolist() == [[0, 3], [0, 7], [2, 5]]
        assert g.loops.tolist() == [1, 6]
        with pytest.raises(ValueError):
            g.edges[0, 0] = 1

    @pytest.mark.parametrize(
        "edges,loops",
        [([(3, 3)], []), ([(4, 2)], []), ([(0, 8)], []), ([(0, 1), (0, 1)], []), ([], [2, 2]), ([], [8])],
    )
    def test_invalid(self, edges, loops):
        with pytest.raises(ValueError):
            graph(3, edges, loops)


class TestCounting:
    def test_path_graph(self):
        g = graph(3, [(0, 1), (1, 2), (2, 3)], [5])
        c = count_features(g)
        assert (c.edges, c.loops, c.triangles) == (3, 1, 0)
        # vertices 4, 6, 7 are isolated; 5 carries a loop
        assert c.isolated == 3
        assert c.degree_histogram == {0: 4, 1: 2, 2: 2}

    def test_k4_clique(self):
        g = graph(3, list(itertools.combinations(range(4), 2)))
        assert count_triangles(g) == 4

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_triangles_match_brute_force(self, k):
        for r in range(50):
            g = sample_dense(P(k, (0.9, 0.7, 0.5)), seed=123, replicate=r)
            adj = {tuple(e) for e in g.edges.tolist()}
            brute = sum(
                1
                for u, v, w in itertools.combinations(range(1 << k), 3)
                if (u, v) in adj and (v, w) in adj and (u, w) in adj
            )
            assert count_triangles(g) == brute

    @settings(max_examples=50, deadline=None)
    @given(st.sets(st.tuples(st.integers(0, 15), st.integers(0, 15)).filter(lambda e: e[0] < e[1]), max_size=60))
    def test_histogram_consistent(self, edges):
        g = graph(4, sorted(edges))
        c = count_features(g)
        assert sum(c.degree_histogram.values()) == 16
        assert sum(d * m for d, m in c.degree_histogram.items()) == 2 * len(edges)
        assert c.degree_histogram.get(0, 0) == c.isolated


def test_empirical_means_match_oracle_k3():
    # sample mean of edges and loops against brute-force expectations
    k, reps = 3, 4000
    edges = np.array([sample_dense(P(k), seed=5, replicate=r).n_edges for r in range(reps)], dtype=float)
    want = oracles.edges_exact(THETA, k)
    assert abs(edges.mean() - want) <= 4 * edges.std(ddof=1) / math.sqrt(reps)
