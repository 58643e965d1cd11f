import itertools

import numpy as np
import pytest

from bayes_heuristics.errors import DomainError, ValidationError
from bayes_heuristics.network import (
    DiGraph,
    in_neighborhood,
    is_balanced_regular,
    is_strongly_connected,
    out_neighborhood,
)


def reachability_oracle(g):
    m = g.closed_adjacency.astype(np.int64)
    return bool(np.all(np.linalg.matrix_power(m, g.n) > 0))


class TestNeighborhoods:
    def test_single_node(self):
        g = DiGraph(1)
        assert in_neighborhood(g, 0) == {0}
        assert out_neighborhood(g, 0) == {0}

    def test_cycle(self):
        g = DiGraph.cycle(3)
        assert in_neighborhood(g, 1) == {0, 1}
        assert out_neighborhood(g, 0) == {0, 1}

    def test_complete(self):
        g = DiGraph.complete(3)
        assert all(in_neighborhood(g, i) == {0, 1, 2} for i in range(3))

    def test_undirected_edge_symmetry(self):
        g = DiGraph.undirected(2, [(0, 1)])
        assert out_neighborhood(g, 0) == in_neighborhood(g, 0)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            in_neighborhood(DiGraph(2), 2)
        with pytest.raises(DomainError):
            out_neighborhood(DiGraph(2), -1)

    def test_self_loops_and_counts(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 8))
            mask = rng.random((n, n)) < 0.4
            g = DiGraph(n, [(j, i) for i in range(n) for j in range(n) if mask[i, j]])
            assert all(i in in_neighborhood(g, i) and i in out_neighborhood(g, i) for i in range(n))
            total = int(g.closed_adjacency.sum())
            assert sum(len(in_neighborhood(g, i)) for i in range(n)) == total
            assert sum(len(out_neighborhood(g, j)) for j in range(n)) == total
            assert np.all(np.diag(g.adjacency) == 0)
            assert np.array_equal(g.adjacency + np.eye(n, dtype=int), g.closed_adjacency)

    def test_adjacency_matches_edges(self):
        g = DiGraph(3, [(0, 2), (2, 1)])
        assert g.closed_adjacency[2, 0] == 1 and g.closed_adjacency[1, 2] == 1
        assert g.edges == {(0, 0), (1, 1), (2, 2), (0, 2), (2, 1)}

    def test_immutable(self):
        g = DiGraph.cycle(3)
        with pytest.raises(ValueError):
            g.closed_adjacency[0, 2] = 1


class TestConnectivity:
    def test_examples(self):
        assert is_strongly_connected(DiGraph.cycle(3))
        assert not is_strongly_connected(DiGraph(2, [(0, 1)]))
        assert is_strongly_connected(DiGraph.star(4))

    def test_exhaustive_small_graphs(self):
        for n in range(1, 4):
            pairs = [(j, i) for i in range(n) for j in range(n) if i != j]
            for bits in itertools.product([0, 1], repeat=len(pairs)):
                g = DiGraph(n, [p for p, b in zip(pairs, bits) if b])
                assert is_strongly_connected(g) == reachability_oracle(g)

    def test_random_graphs_up_to_five(self, rng):
        for _ in range(500):
            n = int(rng.integers(4, 6))
            mask = rng.random((n, n)) < rng.uniform(0.1, 0.6)
            g = DiGraph(n, [(j, i) for i in range(n) for j in range(n) if mask[i, j]])
            assert is_strongly_connected(g) == reachability_oracle(g)


class TestRegularity:
    def test_cycle(self):
        assert is_balanced_regular(DiGraph.cycle(5)) == 2

    def test_complete(self):
        assert is_balanced_regular(DiGraph.complete(4)) == 4

    def test_star(self):
        assert is_balanced_regular(DiGraph.star(4)) is None

    @pytest.mark.parametrize("n, d", [(5, 1), (6, 3), (8, 4), (4, 4)])
    def test_regular_generator(self, n, d):
        assert is_balanced_regular(DiGraph.regular(n, d)) == d


class TestEdgeList:
    def test_round_trip(self, tmp_path):
        g = DiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 3)])
        path = tmp_path / "g.edges"
        g.write_edge_list(path)
        assert DiGraph.read_edge_list(path) == g

    def test_comments_and_self_loops(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("# header\n0 1\n\n1 1   # explicit loop\n1 0\n")
        g = DiGraph.read_edge_list(path, n=3)
        assert g.n == 3 and in_neighborhood(g, 0) == {0, 1}

    def test_bad_line(self, tmp_path):
        path = tmp_path / "g.edges"
        path.write_text("0 1\n0 x\n")
        with pytest.raises(ValidationError, match=":2"):
            DiGraph.read_edge_list(path)
