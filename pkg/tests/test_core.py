import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mplxlink.core import (
    LayerGraph,
    MultiplexNetwork,
    build_network,
    degree_property_matrix,
    edge_property_matrix,
    index_to_pair,
    pair_count,
    pair_to_index,
)


class TestBuildNetwork:
    def test_figure1_shape(self, fig1):
        assert (fig1.k, fig1.n) == (3, 9)
        assert fig1.edge_counts == (10, 8, 8)

    def test_empty(self):
        net = build_network([], n=5, k=2)
        assert net.edge_counts == (0, 0)
        assert degree_property_matrix(net).rows.sum() == 0

    def test_duplicates_collapse(self):
        net = build_network([(0, 1, 2), (0, 2, 1), (0, 1, 2)], n=3, k=1)
        assert net.edge_counts == (1,)

    @pytest.mark.parametrize(
        "edges, n, k",
        [([(0, 1, 1)], 3, 1), ([(1, 0, 1)], 3, 1), ([(0, 0, 5)], 3, 1), ([(0, -1, 2)], 3, 1)],
    )
    def test_rejects_bad_input(self, edges, n, k):
        with pytest.raises(ValueError):
            build_network(edges, n, k)

    def test_adjacency_symmetric_and_immutable(self, fig1):
        for g in fig1.layers:
            assert np.array_equal(g.adjacency, g.adjacency.T)
            assert not np.any(np.diag(g.adjacency))
            with pytest.raises(ValueError):
                g.adjacency[0, 1] = True

    def test_layer_count_mismatch(self):
        with pytest.raises(ValueError):
            MultiplexNetwork((LayerGraph.from_edges(3, []), LayerGraph.from_edges(4, [])))

    def test_edge_count_is_half_degree_sum(self, fig1):
        for g in fig1.layers:
            assert g.edge_count * 2 == g.degrees.sum()
            assert g.edge_count == sum(len(g.neighbors(v)) for v in range(g.n)) // 2


class TestPairIndex:
    def test_round_trip_n9(self):
        for j in range(36):
            assert pair_to_index(*index_to_pair(j, 9), 9) == j

    def test_distinct_n9(self):
        seen = {pair_to_index(u, v, 9) for u in range(9) for v in range(u + 1, 9)}
        assert seen == set(range(36))

    def test_symmetric(self):
        assert pair_to_index(0, 1, 9) == pair_to_index(1, 0, 9)

    def test_matches_triu_order(self):
        rows, cols = np.triu_indices(12, 1)
        assert [pair_to_index(u, v, 12) for u, v in zip(rows, cols)] == list(range(66))

    def test_self_pair_rejected(self):
        with pytest.raises(ValueError):
            pair_to_index(3, 3, 9)
        with pytest.raises(ValueError):
            index_to_pair(36, 9)

    @given(st.integers(2, 400), st.data())
    @settings(max_examples=200)
    def test_round_trip_property(self, n, data):
        j = data.draw(st.integers(0, pair_count(n) - 1))
        u, v = index_to_pair(j, n)
        assert 0 <= u < v < n
        assert pair_to_index(v, u, n) == j


class TestPropertyMatrices:
    def test_edge_matrix_figure1_columns(self, fig1, node):
        P = edge_property_matrix(fig1).rows
        cols = [pair_to_index(node["X"], node[b], 9) for b in ("Y", "U", "V")]
        assert P[:, cols].tolist() == [[1, 1, 1], [1, 1, 0], [1, 0, 0]]

    def test_edge_matrix_row_sums(self, fig1):
        P = edge_property_matrix(fig1)
        assert P.kind == "edge"
        assert P.rows.shape == (3, 36)
        assert P.rows.sum(axis=1).tolist() == [10, 8, 8]

    def test_empty_edge_matrix(self):
        assert not edge_property_matrix(build_network([], 4, 2)).rows.any()

    def test_degree_matrix(self, fig1, node):
        D = degree_property_matrix(fig1)
        assert D.rows.shape == (3, 9)
        assert D.rows[1, node["U"]] == 3
        assert (D.rows.sum(axis=1) == 2 * np.array(fig1.edge_counts)).all()

    def test_isolated_node_zero_degree(self):
        net = build_network([(0, 0, 1), (1, 1, 2)], n=4, k=2)
        assert degree_property_matrix(net).rows[:, 3].tolist() == [0, 0]

    def test_consistent_with_adjacency(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 15))
            edges = [(int(l), int(u), int(v)) for l in range(3)
                     for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3]
            net = build_network(edges, n, 3)
            P = edge_property_matrix(net).rows
            for l, g in enumerate(net.layers):
                for u in range(n):
                    for v in range(u + 1, n):
                        assert P[l, pair_to_index(u, v, n)] == g.has_edge(u, v) == g.has_edge(v, u)
