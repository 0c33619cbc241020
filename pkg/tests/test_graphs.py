import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from planted_bisection import (
    GraphFileError,
    ModelParams,
    PlantedAssignment,
    class_degrees,
    load_graph,
    planted_cut_width,
    sample_planted_graph,
    store_graph,
)
from planted_bisection.graphs import _sample_pair_indices, _unrank_triangular
from planted_bisection.rng import derive_rng

from conftest import build_graph, path_graph


class TestGraphStructure:
    def test_directed_index_is_bijection(self):
        g = build_graph(4, [(0, 1), (0, 2), (1, 2), (2, 3)])
        seen = set()
        for u, v in g.edge_pairs():
            seen.add(g.directed_index(u, v))
            seen.add(g.directed_index(v, u))
        assert seen == set(range(2 * g.num_edges))

    def test_rev_is_involution(self):
        g = build_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)])
        assert np.array_equal(g.rev[g.rev], np.arange(g.num_directed))
        assert np.array_equal(g.tails[g.rev], g.heads)
        assert np.array_equal(g.heads[g.rev], g.tails)

    def test_adjacency_consistent_with_edges(self):
        g = build_graph(6, [(0, 3), (1, 4), (2, 3), (4, 5)])
        for u, v in g.edge_pairs():
            assert v in g.neighbors(u)
            assert u in g.neighbors(v)
        total_degree = sum(g.degree(v) for v in range(g.n))
        assert total_degree == 2 * g.num_edges

    def test_rejects_self_loop(self):
        with pytest.raises(GraphFileError, match="self-loop"):
            build_graph(4, [(3, 3)])

    def test_rejects_duplicate_edge(self):
        with pytest.raises(GraphFileError, match="duplicate"):
            build_graph(4, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(GraphFileError, match="out of range"):
            build_graph(3, [(0, 5)])


class TestModelParams:
    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            ModelParams(n=1, d_plus=0.1, d_minus=0.0)

    def test_rejects_p_plus_above_one(self):
        with pytest.raises(ValueError):
            ModelParams(n=10, d_plus=6.0, d_minus=0.0)

    def test_rejects_inverted_degrees(self):
        with pytest.raises(ValueError):
            ModelParams(n=100, d_plus=1.0, d_minus=2.0)


class TestSampling:
    def test_zero_degrees_give_empty_graph(self):
        g, _ = sample_planted_graph(ModelParams(n=10, d_plus=0.0, d_minus=0.0, seed=3))
        assert g.num_edges == 0

    def test_two_vertices_forced_cross_edge(self):
        # n=2 forces one vertex per class; p_minus = 1 forces the edge
        for seed in range(20):
            g, a = sample_planted_graph(ModelParams(n=2, d_plus=1.0, d_minus=1.0, seed=seed))
            assert list(g.edge_pairs()) == [(0, 1)]
            assert a(0) == -a(1)

    def test_mean_edge_count_matches_pair_probabilities(self):
        # exact expectation: 2*C(500,2)*p_plus + 500^2*p_minus = 5990
        params = [ModelParams(n=1000, d_plus=10.0, d_minus=2.0, seed=s) for s in range(200)]
        counts = [sample_planted_graph(p)[0].num_edges for p in params]
        pairs_same = 2 * math.comb(500, 2)
        pairs_cross = 500 * 500
        expected = pairs_same * 0.02 + pairs_cross * 0.004
        var = pairs_same * 0.02 * 0.98 + pairs_cross * 0.004 * 0.996
        sd_mean = math.sqrt(var / 200)
        assert abs(np.mean(counts) - expected) < 3 * sd_mean

    def test_planted_cut_mean(self):
        # cross-pair count 500^2 times p_minus = 1000
        widths = [
            planted_cut_width(*sample_planted_graph(ModelParams(1000, 10.0, 2.0, seed=s)))
            for s in range(200)
        ]
        expected = 500 * 500 * 0.004
        sd_mean = math.sqrt(expected * 0.996 / 200)
        assert abs(np.mean(widths) - expected) < 3 * sd_mean

    def test_bit_reproducible(self):
        p = ModelParams(n=500, d_plus=7.0, d_minus=1.5, seed=11)
        g1, a1 = sample_planted_graph(p)
        g2, a2 = sample_planted_graph(p)
        assert g1 == g2 and a1 == a2

    @given(st.integers(min_value=2, max_value=60), st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_assignment_balanced_for_all_seeds(self, n, seed):
        _, a = sample_planted_graph(ModelParams(n=n, d_plus=min(1.0, n / 4), d_minus=0.5, seed=seed))
        n_plus = int(np.sum(a.sigma == 1))
        assert abs(n_plus - (a.n - n_plus)) <= 1

    def test_per_vertex_class_degree_means(self):
        n = 20_000
        g, a = sample_planted_graph(ModelParams(n=n, d_plus=8.0, d_minus=2.0, seed=5))
        same = np.zeros(n)
        cross = np.zeros(n)
        for v in range(n):
            s, c = class_degrees(g, a, v)
            same[v], cross[v] = s, c
        assert abs(same.mean() - 8.0) < 3 * math.sqrt(8.0 / n)
        assert abs(cross.mean() - 2.0) < 3 * math.sqrt(2.0 / n)


class TestClassDegrees:
    def test_isolated_vertex(self):
        g = build_graph(3, [(0, 1)])
        a = PlantedAssignment(np.array([1, -1, 1], dtype=np.int8))
        assert class_degrees(g, a, 2) == (0, 0)

    def test_monochromatic_triangle(self):
        g = build_graph(6, [(0, 1), (1, 2), (0, 2)])
        a = PlantedAssignment(np.array([1, 1, 1, -1, -1, -1], dtype=np.int8))
        for v in range(3):
            assert class_degrees(g, a, v) == (2, 0)

    def test_alternating_path(self):
        g = path_graph(3)
        a = PlantedAssignment(np.array([1, -1, 1], dtype=np.int8))
        assert class_degrees(g, a, 1) == (0, 2)

    def test_unknown_vertex(self):
        g = path_graph(3)
        a = PlantedAssignment(np.array([1, -1, 1], dtype=np.int8))
        with pytest.raises(ValueError, match="unknown vertex"):
            class_degrees(g, a, 7)


class TestPlantedCut:
    def test_empty_graph(self):
        g = build_graph(4, [])
        a = PlantedAssignment(np.array([1, 1, -1, -1], dtype=np.int8))
        assert planted_cut_width(g, a) == 0

    def test_single_cross_edge(self):
        g = build_graph(2, [(0, 1)])
        a = PlantedAssignment(np.array([1, -1], dtype=np.int8))
        assert planted_cut_width(g, a) == 1


class TestIO:
    def test_round_trip(self, tmp_path):
        g, a = sample_planted_graph(ModelParams(n=60, d_plus=4.0, d_minus=1.0, seed=2))
        path = tmp_path / "g.edges"
        store_graph(g, a, str(path))
        g2, a2 = load_graph(str(path))
        assert g == g2 and a == a2
        # a second store produces byte-identical files
        path2 = tmp_path / "g2.edges"
        store_graph(g2, a2, str(path2))
        assert path.read_bytes() == path2.read_bytes()

    def test_self_loop_diagnostic(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("4 1\n3 3\n")
        (tmp_path / "bad.edges.sigma").write_text("")
        with pytest.raises(GraphFileError, match="self-loop"):
            load_graph(str(path))

    def test_header_mismatch_diagnostic(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("4 3\n0 1\n1 2\n")
        with pytest.raises(GraphFileError, match="announces"):
            load_graph(str(path))

    def test_duplicate_edge_diagnostic(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("4 2\n0 1\n1 0\n")
        (tmp_path / "bad.edges.sigma").write_text("0 1\n1 -1\n2 1\n3 -1\n")
        with pytest.raises(GraphFileError, match="duplicate"):
            load_graph(str(path))

    def test_out_of_range_diagnostic(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("3 1\n0 9\n")
        with pytest.raises(GraphFileError, match="out of range"):
            load_graph(str(path))

    def test_malformed_line_diagnostic(self, tmp_path):
        path = tmp_path / "bad.edges"
        path.write_text("3 1\n0 1 junk\n")
        with pytest.raises(GraphFileError, match="malformed"):
            load_graph(str(path))


class TestSamplingInternals:
    def test_unrank_triangular_exhaustive(self):
        for k in (2, 3, 7, 12):
            idx = np.arange(k * (k - 1) // 2, dtype=np.int64)
            i, j = _unrank_triangular(idx, k)
            pairs = list(zip(i.tolist(), j.tolist()))
            expected = [(a, b) for a in range(k) for b in range(a + 1, k)]
            assert pairs == expected

    def test_unrank_triangular_large_k(self):
        k = 50_000
        total = k * (k - 1) // 2
        idx = np.array([0, 1, k - 2, k - 1, total - 1, total // 2, total // 3], dtype=np.int64)
        i, j = _unrank_triangular(idx, k)
        assert np.all(i < j) and np.all(j < k)
        ranks = i * (2 * k - i - 1) // 2 + (j - i - 1)
        assert np.array_equal(ranks, idx)

    def test_pair_index_sampler_rate(self):
        rng = derive_rng(9, "test-pairs")
        n, p = 2_000_000, 0.01
        idx = _sample_pair_indices(rng, n, p)
        assert idx.size and np.all(np.diff(idx) > 0) and idx[-1] < n
        assert abs(idx.size - n * p) < 4 * math.sqrt(n * p)

    def test_pair_index_sampler_edge_probs(self):
        rng = derive_rng(9, "test-pairs-2")
        assert _sample_pair_indices(rng, 100, 0.0).size == 0
        assert np.array_equal(_sample_pair_indices(rng, 5, 1.0), np.arange(5))
