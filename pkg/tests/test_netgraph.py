import itertools
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from qfnet.metrics import DistanceMatrix, MetricSpec
from qfnet.netgraph import (
    export_graph,
    from_json,
    mst,
    round_half_up,
    to_graphml,
    to_json,
    top_percent_network,
)


def dissim(values, ids=None):
    values = np.asarray(values, dtype=float)
    ids = ids or [f"n{i}" for i in range(values.shape[0])]
    return DistanceMatrix(MetricSpec("euclidean"), ids, values)


def sim(values, ids=None):
    values = np.asarray(values, dtype=float)
    np.fill_diagonal(values, np.nan)
    ids = ids or [f"n{i}" for i in range(values.shape[0])]
    return DistanceMatrix(MetricSpec("classical_fidelity"), ids, values)


def random_symmetric(rng, n):
    m = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    m[iu] = rng.uniform(0, 1, size=len(iu[0]))
    return m + m.T


def prufer_trees(n):
    """Edge lists of all n^(n-2) labeled trees, decoded from Prufer sequences."""
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for v in seq:
            degree[v] += 1
        edges = []
        seq_list = list(seq)
        leaves = sorted(i for i in range(n) if degree[i] == 1)
        for v in seq_list:
            leaf = leaves.pop(0)
            edges.append((min(leaf, v), max(leaf, v)))
            degree[v] -= 1
            if degree[v] == 1:
                # insert keeping leaves sorted
                import bisect

                bisect.insort(leaves, v)
        edges.append((leaves[0], leaves[1]))
        yield edges


class TestMst:
    def test_triangle(self):
        m = dissim([[0, 1, 3], [1, 0, 2], [3, 2, 0]], ids=["A", "B", "C"])
        net = mst(m)
        assert {(e.i, e.j) for e in net.edges} == {(0, 1), (1, 2)}

    def test_two_nodes(self):
        net = mst(dissim([[0, 5], [5, 0]]))
        assert len(net.edges) == 1

    def test_spanning_and_acyclic(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(3, 12))
            net = mst(dissim(random_symmetric(rng, n)))
            assert len(net.edges) == n - 1
            parent = list(range(n))

            def find(v):
                while parent[v] != v:
                    v = parent[v]
                return v

            for e in net.edges:
                assert e.i < e.j
                ri, rj = find(e.i), find(e.j)
                assert ri != rj  # acyclic
                parent[ri] = rj
            assert len({find(v) for v in range(n)}) == 1  # connected

    def test_matches_brute_force_enumeration(self):
        # exhaustive minimum over all 7^5 = 16807 labeled trees on 7 nodes
        rng = np.random.default_rng(1)
        trees = list(prufer_trees(7))
        assert len(trees) == 16807
        for _ in range(20):
            m = random_symmetric(rng, 7)
            best = min(sum(m[i, j] for i, j in t) for t in trees)
            net = mst(dissim(m))
            total = sum(e.distance for e in net.edges)
            assert total == pytest.approx(best, abs=1e-12)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            m = random_symmetric(rng, 8)
            e1 = {(e.i, e.j) for e in mst(dissim(m)).edges}
            e2 = {(e.i, e.j) for e in mst(dissim(m**2)).edges}
            assert e1 == e2

    def test_similarity_gives_maximum_weight_tree(self):
        # negated-weight Kruskal oracle on the raw similarities
        rng = np.random.default_rng(3)
        for _ in range(10):
            s = random_symmetric(rng, 7)
            net = mst(sim(s.copy()))
            oracle = mst(dissim(-s))
            assert {(e.i, e.j) for e in net.edges} == {
                (e.i, e.j) for e in oracle.edges
            }

    def test_weight_keeps_original_metric_value(self):
        s = np.array([[np.nan, 0.9, 0.2], [0.9, np.nan, 0.5], [0.2, 0.5, np.nan]])
        net = mst(sim(s))
        edge = next(e for e in net.edges if (e.i, e.j) == (0, 1))
        assert edge.weight == 0.9
        assert edge.distance == pytest.approx(1 - 0.9)

    def test_non_finite_rejected(self):
        m = random_symmetric(np.random.default_rng(4), 5)
        m[1, 2] = m[2, 1] = np.inf
        with pytest.raises(ValueError):
            mst(dissim(m))


class TestTopPercent:
    def test_full_percent_is_complete_graph(self):
        rng = np.random.default_rng(5)
        net = top_percent_network(dissim(random_symmetric(rng, 6)), 100.0)
        assert len(net.edges) == 15

    def test_edge_counts_n76(self):
        rng = np.random.default_rng(6)
        m = dissim(random_symmetric(rng, 76))
        assert len(top_percent_network(m, 5.0).edges) == 143
        assert len(top_percent_network(m, 10.0).edges) == 285

    def test_nestedness(self):
        rng = np.random.default_rng(7)
        m = dissim(random_symmetric(rng, 10))
        e5 = {(e.i, e.j) for e in top_percent_network(m, 5).edges}
        e20 = {(e.i, e.j) for e in top_percent_network(m, 20).edges}
        e60 = {(e.i, e.j) for e in top_percent_network(m, 60).edges}
        assert e5 <= e20 <= e60

    def test_strongest_edges_selected(self):
        s = np.array(
            [
                [np.nan, 0.9, 0.1, 0.2],
                [0.9, np.nan, 0.8, 0.3],
                [0.1, 0.8, np.nan, 0.4],
                [0.2, 0.3, 0.4, np.nan],
            ]
        )
        net = top_percent_network(sim(s), 34.0)  # 2 of 6 edges
        assert {(e.i, e.j) for e in net.edges} == {(0, 1), (1, 2)}

    def test_percent_out_of_range(self):
        m = dissim(random_symmetric(np.random.default_rng(8), 5))
        for bad in (0.0, -1.0, 101.0):
            with pytest.raises(ValueError):
                top_percent_network(m, bad)


def test_round_half_up():
    assert round_half_up(142.5) == 143
    assert round_half_up(142.4) == 142
    assert round_half_up(285.0) == 285
    assert round_half_up(0.5) == 1


class TestExport:
    @staticmethod
    def _net():
        rng = np.random.default_rng(9)
        m = dissim(random_symmetric(rng, 4))
        positions = [(float(i), float(2 * i), float(3 * i)) for i in range(4)]
        return mst(m, positions)

    def test_graphml_two_node(self):
        net = mst(dissim([[0, 5], [5, 0]]))
        root = ET.fromstring(to_graphml(net))
        ns = "{http://graphml.graphdrawing.org/xmlns}"
        graph = root.find(f"{ns}graph")
        assert len(graph.findall(f"{ns}node")) == 2
        assert len(graph.findall(f"{ns}edge")) == 1

    def test_graphml_attributes(self):
        net = self._net()
        root = ET.fromstring(to_graphml(net))
        ns = "{http://graphml.graphdrawing.org/xmlns}"
        node = root.find(f"{ns}graph").find(f"{ns}node")
        keys = {d.get("key") for d in node.findall(f"{ns}data")}
        assert keys == {"x", "y", "z"}

    def test_json_round_trip(self):
        net = self._net()
        back = from_json(to_json(net), net.source_metric)
        assert back == net

    def test_zero_edge_network_is_valid(self):
        rng = np.random.default_rng(10)
        m = dissim(random_symmetric(rng, 5))
        net = top_percent_network(m, 0.001)  # rounds to 0 edges
        assert len(net.edges) == 0
        ET.fromstring(to_graphml(net))  # parses
        assert from_json(to_json(net), net.source_metric) == net

    def test_byte_stability(self):
        net = self._net()
        assert export_graph(net, "graphml") == export_graph(net, "graphml")
        assert export_graph(net, "json") == export_graph(net, "json")
        with pytest.raises(ValueError):
            export_graph(net, "gexf")
