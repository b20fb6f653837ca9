"""Event-sourced dynamic weighted graph.

The graph is a mutable adjacency structure driven by a stream of edge
events (insertions, deletions, weight changes encoded as signed weight
deltas). Weighted out-degree sums are cached per node and kept in sync
with every mutation so that push-style random-walk algorithms can read
them in O(1).

Node ids are dense non-negative integers. In undirected mode every edge
is stored symmetrically with equal weight in both directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InternalInconsistencyError, InvalidEventError

# An edge whose weight falls to zero within this tolerance is removed.
WEIGHT_REMOVE_TOL = 1e-12


class EventKind(enum.Enum):
    INSERTION = "insertion"
    DELETION = "deletion"
    WEIGHT_UPDATE = "weight_update"


@dataclass
class EdgeEvent:
    """One timestamped weight mutation of a single edge.

    ``delta_weight`` is the signed change applied to the current weight:
    positive for insertions and weight increases, negative for decreases
    and deletions (a deletion's delta equals minus the current weight).
    ``anomalous`` is a ground-truth label used only by evaluation; the
    scorer never sees it. ``kind`` may be left ``None`` and is then
    inferred from the sign of the delta and the current graph state.
    ``line`` carries the source line number for error messages.
    """

    time: float
    src: int
    dst: int
    delta_weight: float
    anomalous: bool = False
    kind: EventKind | None = None
    line: int | None = None


class DynamicGraph:
    """Weighted adjacency with cached degree sums, mutated by events.

    Single-writer: callers must not mutate concurrently with reads.
    """

    __slots__ = ("directed", "_adj", "_radj", "_deg", "_seen", "edge_count")

    def __init__(self, num_nodes: int = 0, directed: bool = False):
        self.directed = directed
        self._adj: list[dict[int, float]] = [dict() for _ in range(num_nodes)]
        # reverse adjacency is only tracked for directed graphs
        self._radj: list[dict[int, float]] | None = (
            [dict() for _ in range(num_nodes)] if directed else None
        )
        self._deg: list[float] = [0.0] * num_nodes
        self._seen: set[int] = set()
        self.edge_count = 0

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def from_initial_edges(cls, edges, directed: bool = False) -> "DynamicGraph":
        """Build a graph from (src, dst, weight) triples.

        Duplicate pairs accumulate weight. Non-positive weights are
        rejected. In undirected mode each edge is mirrored.
        """
        g = cls(directed=directed)
        for idx, (u, v, w) in enumerate(edges):
            if w <= 0:
                raise InvalidEventError(
                    f"initial edge {idx} ({u},{v}) has non-positive weight {w}"
                )
            if u == v:
                raise InvalidEventError(f"initial edge {idx} is a self-loop at {u}")
            g._add_weight(u, v, w)
        return g

    def copy(self) -> "DynamicGraph":
        g = DynamicGraph(0, directed=self.directed)
        g._adj = [dict(d) for d in self._adj]
        g._radj = [dict(d) for d in self._radj] if self._radj is not None else None
        g._deg = list(self._deg)
        g._seen = set(self._seen)
        g.edge_count = self.edge_count
        return g

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._adj)

    def weight(self, u: int, v: int) -> float:
        """Current weight of edge (u, v), or 0.0 when absent."""
        if 0 <= u < len(self._adj):
            return self._adj[u].get(v, 0.0)
        return 0.0

    def degree_sum(self, u: int) -> float:
        """Cached weighted out-degree of u (0.0 for unknown nodes)."""
        if 0 <= u < len(self._deg):
            return self._deg[u]
        return 0.0

    def effective_degree(self, u: int) -> float:
        """Degree used by degree-normalized quantities.

        Dangling nodes carry an implicit unit self-loop, so their
        effective degree is 1.
        """
        d = self.degree_sum(u)
        return d if d > 0.0 else 1.0

    def neighbors(self, u: int):
        """Out-neighbors of u as (node, weight) pairs, ascending by id."""
        if 0 <= u < len(self._adj):
            return iter(sorted(self._adj[u].items()))
        return iter(())

    def out_items(self, u: int):
        """Raw out-neighbor view in storage order (fast path for push)."""
        return self._adj[u].items()

    def out_degree_count(self, u: int) -> int:
        if 0 <= u < len(self._adj):
            return len(self._adj[u])
        return 0

    def neighbor_ids(self, u: int) -> set[int]:
        """Structural neighbor set; for directed graphs the union of
        in- and out-neighbors (closure and hop predicates treat edges
        as connections regardless of direction)."""
        if not (0 <= u < len(self._adj)):
            return set()
        ids = set(self._adj[u])
        if self._radj is not None:
            ids.update(self._radj[u])
        return ids

    @property
    def existing_nodes(self) -> set[int]:
        """Nodes that have appeared in at least one edge so far. Ids are
        stable: a node stays 'existing' even if all its edges are later
        deleted."""
        return self._seen

    # ------------------------------------------------------------------
    # mutation
    # ------------------------------------------------------------------

    def ensure_node(self, u: int) -> None:
        if u < 0:
            raise InvalidEventError(f"negative node id {u}")
        while len(self._adj) <= u:
            self._adj.append(dict())
            self._deg.append(0.0)
            if self._radj is not None:
                self._radj.append(dict())

    def _add_weight(self, u: int, v: int, dw: float) -> None:
        """Apply a delta to edge (u, v), mirroring in undirected mode."""
        self.ensure_node(u)
        self.ensure_node(v)
        self._apply_one(u, v, dw)
        if self.directed:
            new_w = self._radj[v].get(u, 0.0) + dw
            if abs(new_w) <= WEIGHT_REMOVE_TOL:
                self._radj[v].pop(u, None)
            else:
                self._radj[v][u] = new_w
        else:
            self._apply_one(v, u, dw)
        self._seen.add(u)
        self._seen.add(v)

    def _apply_one(self, u: int, v: int, dw: float) -> None:
        row = self._adj[u]
        old = row.get(v, 0.0)
        new = old + dw
        if abs(new) <= WEIGHT_REMOVE_TOL:
            if v in row:
                del row[v]
                if u <= v or self.directed:
                    self.edge_count -= 1
            new = 0.0
        else:
            if v not in row and (u <= v or self.directed):
                self.edge_count += 1
            row[v] = new
        self._deg[u] += dw
        if abs(self._deg[u]) <= WEIGHT_REMOVE_TOL:
            self._deg[u] = 0.0

    def apply_event(self, e: EdgeEvent, index: int | None = None) -> None:
        """Apply one edge event, updating weights and degree caches.

        Raises :class:`InvalidEventError` when the event would drive the
        edge weight negative, names a self-loop, or its declared kind
        contradicts the graph state (deletion/update of a missing edge).
        """
        where = f"event {index}" if index is not None else "event"
        if e.src == e.dst:
            raise InvalidEventError(f"{where}: self-loop at node {e.src}")
        cur = self.weight(e.src, e.dst)
        new = cur + e.delta_weight
        if new < -WEIGHT_REMOVE_TOL:
            raise InvalidEventError(
                f"{where}: edge ({e.src},{e.dst}) weight {cur} + delta "
                f"{e.delta_weight} would be negative"
            )
        if e.kind is EventKind.INSERTION and e.delta_weight <= 0.0:
            raise InvalidEventError(
                f"{where}: insertion with non-positive delta {e.delta_weight}"
            )
        if e.kind is EventKind.DELETION:
            if cur == 0.0:
                raise InvalidEventError(
                    f"{where}: deletion of missing edge ({e.src},{e.dst})"
                )
            if abs(new) > WEIGHT_REMOVE_TOL:
                raise InvalidEventError(
                    f"{where}: deletion delta {e.delta_weight} does not cancel "
                    f"current weight {cur}"
                )
        elif e.kind is EventKind.WEIGHT_UPDATE and cur == 0.0:
            raise InvalidEventError(
                f"{where}: weight update of missing edge ({e.src},{e.dst})"
            )
        if e.delta_weight == 0.0:
            self.ensure_node(e.src)
            self.ensure_node(e.dst)
            return
        self._add_weight(e.src, e.dst, e.delta_weight)

    # ------------------------------------------------------------------
    # auditing
    # ------------------------------------------------------------------

    def audit_degree_sums(self, tol: float = 1e-9) -> float:
        """Check every cached degree sum against a fresh recomputation.

        Returns the maximum absolute discrepancy; raises if above tol.
        """
        worst = 0.0
        for u in range(len(self._adj)):
            actual = sum(self._adj[u].values())
            err = abs(actual - self._deg[u])
            worst = max(worst, err)
        if worst > tol:
            raise InternalInconsistencyError(
                f"degree cache drifted by {worst:.3e} (tol {tol:.1e})"
            )
        return worst
