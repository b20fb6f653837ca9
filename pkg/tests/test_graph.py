import random

import pytest

from graphdrift.errors import InvalidEventError
from graphdrift.graph import DynamicGraph, EdgeEvent, EventKind

from helpers import random_event_stream, random_graph


def ev(src, dst, dw, time=0.0, **kw):
    return EdgeEvent(time=time, src=src, dst=dst, delta_weight=dw, **kw)


class TestConstruction:
    def test_single_undirected_edge(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0)])
        assert g.degree_sum(0) == 1.0
        assert g.degree_sum(1) == 1.0
        assert g.node_count == 2
        assert g.edge_count == 1

    def test_empty(self):
        g = DynamicGraph.from_initial_edges([])
        assert g.node_count == 0
        assert g.edge_count == 0

    def test_directed_degree_sums(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 2.0), (0, 2, 3.0)], directed=True)
        assert g.degree_sum(0) == 5.0
        assert g.degree_sum(1) == 0.0
        assert g.degree_sum(2) == 0.0

    def test_rejects_non_positive_weight(self):
        with pytest.raises(InvalidEventError):
            DynamicGraph.from_initial_edges([(0, 1, 0.0)])
        with pytest.raises(InvalidEventError):
            DynamicGraph.from_initial_edges([(0, 1, -2.0)])

    def test_rejects_self_loop(self):
        with pytest.raises(InvalidEventError):
            DynamicGraph.from_initial_edges([(3, 3, 1.0)])

    def test_duplicate_edges_accumulate(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0), (0, 1, 0.5)])
        assert g.weight(0, 1) == 1.5


class TestApplyEvent:
    def test_insert_into_empty(self):
        g = DynamicGraph(num_nodes=2)
        g.apply_event(ev(0, 1, 1.0))
        assert g.weight(0, 1) == 1.0
        assert g.degree_sum(0) == 1.0

    def test_exact_cancellation_removes_edge(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0)])
        g.apply_event(ev(0, 1, -1.0))
        assert g.weight(0, 1) == 0.0
        assert g.degree_sum(0) == 0.0
        assert list(g.neighbors(0)) == []
        assert g.edge_count == 0

    def test_weight_increase(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 2.0)])
        g.apply_event(ev(0, 1, 0.5))
        assert g.weight(0, 1) == 2.5

    def test_negative_result_rejected_with_index(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0)])
        with pytest.raises(InvalidEventError, match="event 7"):
            g.apply_event(ev(0, 1, -2.0), index=7)

    def test_deletion_kind_must_cancel(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 2.0)])
        with pytest.raises(InvalidEventError):
            g.apply_event(ev(0, 1, -1.0, kind=EventKind.DELETION))
        with pytest.raises(InvalidEventError):
            g.apply_event(ev(1, 2, -1.0, kind=EventKind.DELETION))

    def test_update_kind_requires_edge(self):
        g = DynamicGraph(num_nodes=3)
        with pytest.raises(InvalidEventError):
            g.apply_event(ev(0, 1, 1.0, kind=EventKind.WEIGHT_UPDATE))

    def test_insertion_on_existing_edge_is_weight_update(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0)])
        g.apply_event(ev(0, 1, 1.0, kind=EventKind.INSERTION))
        assert g.weight(0, 1) == 2.0

    def test_self_loop_event_rejected(self):
        g = DynamicGraph(num_nodes=2)
        with pytest.raises(InvalidEventError):
            g.apply_event(ev(1, 1, 1.0))


class TestNeighbors:
    def test_star_sorted(self):
        g = DynamicGraph.from_initial_edges([(0, 3, 1.0), (0, 1, 1.0), (0, 2, 1.0)])
        assert list(g.neighbors(0)) == [(1, 1.0), (2, 1.0), (3, 1.0)]

    def test_isolated(self):
        g = DynamicGraph(num_nodes=3)
        assert list(g.neighbors(1)) == []

    def test_unknown_node_empty(self):
        g = DynamicGraph(num_nodes=1)
        assert list(g.neighbors(99)) == []

    def test_after_delete(self):
        g = DynamicGraph.from_initial_edges(
            [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]
        )
        g.apply_event(ev(0, 2, -1.0))
        assert list(g.neighbors(0)) == [(1, 1.0), (3, 1.0)]


class TestInvariants:
    def test_degree_audit_over_long_random_stream(self):
        rng = random.Random(99)
        g = random_graph(rng, 40, avg_degree=4.0)
        events = random_event_stream(g, rng, 10_000)
        for i, e in enumerate(events):
            g.apply_event(e, index=i)
        assert g.audit_degree_sums(tol=1e-9) <= 1e-9

    def test_replay_determinism_bit_exact(self):
        rng = random.Random(5)
        g0 = random_graph(rng, 25, avg_degree=3.0)
        events = random_event_stream(g0, rng, 500)
        g1, g2 = g0.copy(), g0.copy()
        for e in events:
            g1.apply_event(e)
        for e in events:
            g2.apply_event(e)
        for u in range(g1.node_count):
            assert dict(g1.out_items(u)) == dict(g2.out_items(u))
            assert g1.degree_sum(u) == g2.degree_sum(u)

    def test_undirected_symmetry_after_every_event(self):
        rng = random.Random(13)
        g = random_graph(rng, 20, avg_degree=3.0)
        events = random_event_stream(g, rng, 300)
        for e in events:
            g.apply_event(e)
            for u in range(g.node_count):
                for v, w in g.out_items(u):
                    assert g.weight(v, u) == w

    def test_directed_mode_keeps_reverse_adjacency(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0), (2, 1, 2.0)], directed=True)
        assert g.neighbor_ids(1) == {0, 2}
        g.apply_event(ev(2, 1, -2.0))
        assert g.neighbor_ids(1) == {0}

    def test_existing_nodes_monotone(self):
        g = DynamicGraph.from_initial_edges([(0, 1, 1.0)])
        g.apply_event(ev(0, 1, -1.0))
        assert g.existing_nodes == {0, 1}
