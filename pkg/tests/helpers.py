"""Seeded random graphs, valid random event streams, and the
linear-invariance audit shared by the push tests."""

from __future__ import annotations

import random

import numpy as np

from graphdrift.graph import DynamicGraph, EdgeEvent
from graphdrift.ppr import PushState, exact_ppr_matrix


def random_graph(
    rng: random.Random,
    n: int,
    avg_degree: float = 3.0,
    directed: bool = False,
    w_low: float = 0.2,
    w_high: float = 3.0,
) -> DynamicGraph:
    """Random weighted graph; may contain isolated nodes."""
    g = DynamicGraph(num_nodes=n, directed=directed)
    target_edges = max(1, int(n * avg_degree / 2))
    for _ in range(target_edges):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        if g.weight(u, v) > 0.0:
            continue
        g._add_weight(u, v, rng.uniform(w_low, w_high))
    return g


def random_event_stream(
    g: DynamicGraph,
    rng: random.Random,
    n_events: int,
    allow_delete: bool = True,
    start_time: float = 1.0,
) -> list[EdgeEvent]:
    """Valid event stream against a shadow copy of ``g``.

    Deletions never remove a node's last edge, so no node transitions
    into the dangling state while carrying estimate mass.
    """
    shadow = g.copy()
    events = []
    t = start_time
    for _ in range(n_events):
        op = rng.random()
        edges = [
            (u, v, w)
            for u in range(shadow.node_count)
            for v, w in shadow.out_items(u)
            if shadow.directed or u < v
        ]
        if op < 0.5 or not edges:
            # insert a new edge between distinct, currently non-adjacent nodes
            for _attempt in range(50):
                u = rng.randrange(shadow.node_count)
                v = rng.randrange(shadow.node_count)
                if u != v and shadow.weight(u, v) == 0.0:
                    break
            else:
                continue
            dw = rng.uniform(0.2, 2.0)
        elif op < 0.8 or not allow_delete:
            # reweight an existing edge, keeping it comfortably positive
            u, v, w = rng.choice(edges)
            if rng.random() < 0.5:
                dw = rng.uniform(0.1, 1.5)
            else:
                dw = -rng.uniform(0.0, 0.9) * (w - 0.05)
                if w + dw <= 0.05:
                    continue
        else:
            # delete, but never a node's last edge
            candidates = [
                (u, v, w)
                for (u, v, w) in edges
                if shadow.out_degree_count(u) >= 2
                and (shadow.directed or shadow.out_degree_count(v) >= 2)
            ]
            if not candidates:
                continue
            u, v, w = rng.choice(candidates)
            dw = -w
        e = EdgeEvent(time=t, src=u, dst=v, delta_weight=dw)
        shadow.apply_event(e)
        events.append(e)
        t += 1.0
    return events


def invariance_error(state: PushState, g: DynamicGraph) -> float:
    """Max-norm defect of: exact_ppr(seed) == estimate + sum residual[u]*exact_ppr(u)."""
    pi = exact_ppr_matrix(g, state.alpha)
    n = g.node_count
    vec = np.zeros(n)
    for u, x in state.estimate.items():
        vec[u] += x
    for u, r in state.residual.items():
        vec += r * pi[:, u]
    return float(np.max(np.abs(pi[:, state.seed] - vec)))
