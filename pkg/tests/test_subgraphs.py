import random

import networkx as nx
import pytest

from graphdrift.graph import DynamicGraph
from graphdrift.subgraphs import (
    SubgraphStrategy,
    hybrid_tc,
    identify,
    k_hop,
    strong_neighbors,
)

from helpers import random_graph

# seed node 1 with neighbors {2,3,6}; nodes 4,5,7 one hop further out
SPUR_EDGES = [(1, 2, 1.0), (1, 3, 1.0), (1, 6, 1.0), (2, 4, 1.0), (3, 5, 1.0), (6, 7, 1.0)]

# triangle {1,2,3} with pendants 4 (on 2), 5 (on 3) and a weak neighbor 6 of the seed
TRIANGLE_FRINGE_EDGES = [
    (1, 2, 1.0),
    (1, 3, 1.0),
    (2, 3, 1.0),
    (2, 4, 1.0),
    (3, 5, 1.0),
    (1, 6, 1.0),
]


def spur_graph():
    return DynamicGraph.from_initial_edges(SPUR_EDGES)


def triangle_fringe_graph():
    return DynamicGraph.from_initial_edges(TRIANGLE_FRINGE_EDGES)


class TestKHop:
    def test_one_hop_fixture(self):
        assert k_hop(spur_graph(), 1, 1).nodes == {1, 2, 3, 6}

    def test_two_hop_fixture(self):
        assert k_hop(spur_graph(), 1, 2).nodes == {1, 2, 3, 4, 5, 6, 7}

    def test_isolated_seed(self):
        g = DynamicGraph(num_nodes=3)
        assert k_hop(g, 2, 1).nodes == {2}

    def test_k_validation(self):
        with pytest.raises(ValueError):
            k_hop(spur_graph(), 1, 0)


class TestStrongNeighbors:
    def test_triangle_all_strong(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
        assert strong_neighbors(g, 0) == {1, 2}

    def test_path_center_has_none(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0), (1, 2, 1.0)])
        assert strong_neighbors(g, 1) == set()
        assert strong_neighbors(g, 0) == set()

    def test_triangle_fringe_core(self):
        assert strong_neighbors(triangle_fringe_graph(), 1) | {1} == {1, 2, 3}


class TestHybridTc:
    def test_triangle_fringe_with_boundaries(self):
        sg = hybrid_tc(triangle_fringe_graph(), 1)
        assert sg.nodes == {1, 2, 3, 4, 5, 6}
        assert sg.strong == {2, 3}
        assert sg.boundary == {4, 5, 6}

    def test_bare_triangle_has_no_boundary(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
        sg = hybrid_tc(g, 0)
        assert sg.nodes == {0, 1, 2}
        assert sg.boundary == set()

    def test_star_center_without_strong_neighbors(self):
        # no triangles at all: the set collapses to the seed plus its frontier
        g = DynamicGraph.from_initial_edges(
            [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)]
        )
        sg = hybrid_tc(g, 0)
        assert sg.strong == set()
        assert sg.nodes == {0, 1, 2, 3, 4}

    def test_strong_only_boundary_mode(self):
        sg = hybrid_tc(triangle_fringe_graph(), 1, boundary_of="strong-only")
        # node 6 neighbors only the seed, so the stricter frontier drops it
        assert sg.nodes == {1, 2, 3, 4, 5}
        assert sg.boundary == {4, 5}

    def test_invariants_hold(self):
        sg = hybrid_tc(triangle_fringe_graph(), 1)
        assert sg.seed in sg.nodes
        assert sg.strong <= sg.nodes
        assert not sg.boundary & (sg.strong | {sg.seed})


class TestIdentify:
    def test_dispatch_khop(self):
        sg = identify(spur_graph(), 1, SubgraphStrategy.parse("1hop"))
        assert sg.nodes == {1, 2, 3, 6}

    def test_dispatch_tc_isolated_seed(self):
        g = DynamicGraph(num_nodes=2)
        sg = identify(g, 1, SubgraphStrategy.parse("tc"))
        assert sg.nodes == {1}

    def test_parse_rejects_unknown(self):
        with pytest.raises(ValueError):
            SubgraphStrategy.parse("4ever")

    def test_parse_accepts_all_cli_names(self):
        for name in ("1hop", "2hop", "3hop", "tc", "hybrid-tc"):
            identify(spur_graph(), 1, SubgraphStrategy.parse(name))


# ----------------------------------------------------------------------
# independent oracles
# ----------------------------------------------------------------------


def to_networkx(g: DynamicGraph) -> nx.Graph:
    gx = nx.Graph()
    gx.add_nodes_from(range(g.node_count))
    for u in range(g.node_count):
        for v in g.neighbor_ids(u):
            gx.add_edge(u, v)
    return gx


def brute_strong_neighbors(g: DynamicGraph, v: int) -> set[int]:
    """Triple-loop triangle enumeration over the undirected pattern."""
    nodes = range(g.node_count)
    out = set()
    for u in g.neighbor_ids(v):
        for w in nodes:
            if w in (u, v):
                continue
            if w in g.neighbor_ids(v) and w in g.neighbor_ids(u):
                out.add(u)
                break
    return out


def brute_hybrid(g: DynamicGraph, v: int) -> set[int]:
    strong = brute_strong_neighbors(g, v)
    core = strong | {v}
    boundary = set()
    for c in core:
        boundary |= g.neighbor_ids(c)
    return core | (boundary - core)


class TestOracleEquivalence:
    def test_small_random_graphs(self):
        rng = random.Random(31)
        for _ in range(60):
            n = rng.randint(3, 40)
            g = random_graph(rng, n, avg_degree=rng.uniform(1.0, 5.0))
            gx = to_networkx(g)
            seeds = rng.sample(range(n), min(n, 6))
            for v in seeds:
                assert strong_neighbors(g, v) == brute_strong_neighbors(g, v)
                assert hybrid_tc(g, v).nodes == brute_hybrid(g, v)
                for k in (1, 2, 3):
                    ref = {
                        u
                        for u, dist in nx.single_source_shortest_path_length(
                            gx, v, cutoff=k
                        ).items()
                    }
                    assert k_hop(g, v, k).nodes == ref

    def test_nesting_chain(self):
        rng = random.Random(32)
        for _ in range(40):
            n = rng.randint(4, 60)
            g = random_graph(rng, n, avg_degree=3.0)
            for v in rng.sample(range(n), min(n, 5)):
                tc = strong_neighbors(g, v) | {v}
                hybrid = hybrid_tc(g, v).nodes
                hop1 = k_hop(g, v, 1).nodes
                hop2 = k_hop(g, v, 2).nodes
                hop3 = k_hop(g, v, 3).nodes
                assert tc <= hybrid <= hop2
                assert hop1 <= hop2 <= hop3

    def test_binarization_invariance(self):
        rng = random.Random(33)
        g = random_graph(rng, 30, avg_degree=3.0)
        for scale in (0.001, 7.3, 4000.0):
            scaled = DynamicGraph(num_nodes=30)
            for u in range(30):
                for v, w in g.out_items(u):
                    if u < v:
                        scaled._add_weight(u, v, w * scale)
            for v in range(30):
                assert strong_neighbors(g, v) == strong_neighbors(scaled, v)
                assert hybrid_tc(g, v).nodes == hybrid_tc(scaled, v).nodes
                assert k_hop(g, v, 2).nodes == k_hop(scaled, v, 2).nodes

    def test_directed_uses_neighbor_union(self):
        g = DynamicGraph.from_initial_edges(
            [(0, 1, 1.0), (2, 1, 1.0), (2, 0, 1.0)], directed=True
        )
        # ignoring direction this is the triangle {0,1,2}
        assert strong_neighbors(g, 1) == {0, 2}
        assert k_hop(g, 1, 1).nodes == {0, 1, 2}
