"""Incremental personalized PageRank via residual forward push.

Each tracked seed node owns a pair of sparse vectors: an estimate of its
personalized PageRank vector and a residual of unprocessed probability
mass. Pushing drains residual mass into the estimate and spreads the
rest to neighbors until every residual entry is below ``epsilon`` times
the node's weighted degree. Edge events are absorbed without a restart
by a local rescaling of the estimate and residual at the event's
endpoints; the rescaling keeps the linear invariance identity

    ppr(seed) = estimate + sum_u residual[u] * ppr(u)

exact on the post-event graph, so a single push per snapshot restores
the approximation guarantee no matter how many events arrived.

A dense solver over the teleporting random-walk operator is provided as
a test oracle for small graphs. Dangling nodes are treated as having an
implicit unit self-loop everywhere, matching the graph module.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    GraphDriftError,
    InternalInconsistencyError,
    OracleSizeError,
    PushDivergenceError,
)
from .graph import DynamicGraph, EdgeEvent

# Sparse entries below this magnitude are dropped to bound support growth.
DROP_TOL = 1e-15

# Default cap on neighbor mass-transfers per push call; exceeding it
# signals pathological input rather than a tight resource budget.
DEFAULT_TRANSFER_CAP = 10**9

DENSE_ORACLE_NODE_CAP = 2000


@dataclass
class PushState:
    """Per-seed push bookkeeping.

    ``estimate`` approximates the seed's PageRank vector; ``residual``
    holds unprocessed mass. ``frontier`` lists nodes whose residual
    bound must be rechecked by the next push (touched by adjustments or
    by degree changes). ``dirty`` is set whenever the estimate changes
    and cleared by the embedding layer once it re-sketches the vector.
    """

    seed: int
    alpha: float
    epsilon: float
    estimate: dict[int, float] = field(default_factory=dict)
    residual: dict[int, float] = field(default_factory=dict)
    frontier: set[int] = field(default_factory=set)
    dirty: bool = True


def init_state(seed: int, alpha: float, epsilon: float) -> PushState:
    """Fresh state: zero estimate, unit residual at the seed."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0,1), got {alpha}")
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return PushState(
        seed=seed,
        alpha=alpha,
        epsilon=epsilon,
        residual={seed: 1.0},
        frontier={seed},
    )


def dynamic_push(
    state: PushState,
    g: DynamicGraph,
    epsilon: float | None = None,
    alpha: float | None = None,
    max_transfers: int = DEFAULT_TRANSFER_CAP,
    full_scan: bool = False,
) -> tuple[set[int], set[int]]:
    """Push until every |residual[u]| <= epsilon * degree(u).

    The worklist starts from ``state.frontier``; pass ``full_scan=True``
    (implied when a tighter epsilon override is given) to rescan the
    whole residual support instead. Returns the sets of nodes whose
    estimate gained mass and whose residual was written, so callers
    keeping node-to-seed indexes can update them.
    """
    eps = state.epsilon if epsilon is None else epsilon
    a = state.alpha if alpha is None else alpha
    if epsilon is not None and epsilon < state.epsilon:
        full_scan = True

    estimate = state.estimate
    residual = state.residual
    work: deque[int] = deque()
    queued: set[int] = set()

    def enqueue(u: int) -> None:
        if u not in queued and abs(residual.get(u, 0.0)) > eps * g.effective_degree(u):
            queued.add(u)
            work.append(u)

    seeds = residual.keys() if full_scan else state.frontier
    for u in list(seeds):
        enqueue(u)
    state.frontier.clear()

    popped: set[int] = set()
    touched: set[int] = set()
    transfers = 0
    one_minus_a = 1.0 - a
    while work:
        u = work.popleft()
        queued.discard(u)
        ru = residual.get(u, 0.0)
        if abs(ru) <= eps * g.effective_degree(u):
            continue
        new_p = estimate.get(u, 0.0) + a * ru
        if abs(new_p) < DROP_TOL:
            estimate.pop(u, None)
        else:
            estimate[u] = new_p
        popped.add(u)
        state.dirty = True
        del residual[u]
        d = g.degree_sum(u)
        if d > 0.0:
            share_base = one_minus_a * ru / d
            transfers += g.out_degree_count(u)
            if transfers > max_transfers:
                raise PushDivergenceError(
                    f"push for seed {state.seed} exceeded {max_transfers} "
                    f"mass transfers at epsilon {eps}"
                )
            for v, w in g.out_items(u):
                rv = residual.get(v, 0.0) + share_base * w
                if abs(rv) < DROP_TOL:
                    residual.pop(v, None)
                else:
                    residual[v] = rv
                touched.add(v)
                enqueue(v)
        else:
            # dangling: implicit unit self-loop returns the rest to u
            rv = one_minus_a * ru
            transfers += 1
            if transfers > max_transfers:
                raise PushDivergenceError(
                    f"push for seed {state.seed} exceeded {max_transfers} "
                    f"mass transfers at epsilon {eps}"
                )
            if abs(rv) >= DROP_TOL:
                residual[u] = rv
            touched.add(u)
            enqueue(u)
    return popped, touched


def _adjust_orientation(
    state: PushState, i: int, j: int, dw: float, g: DynamicGraph
) -> bool:
    """Absorb the (i -> j) half of an edge event into one state.

    Must be called with the pre-event graph. No-op when the estimate
    carries no mass at i. Returns True when the state changed.
    """
    p_i = state.estimate.get(i, 0.0)
    if p_i == 0.0:
        return False
    alpha = state.alpha
    residual = state.residual
    d_old = g.degree_sum(i)
    if d_old <= 0.0:
        if dw <= 0.0:
            raise InternalInconsistencyError(
                f"seed {state.seed}: negative delta on dangling node {i} "
                "(deleting an edge that does not exist)"
            )
        # i held mass under its implicit self-loop and now gains its first
        # real out-edge; the walk column flips from the self-loop to j, and
        # the invariance correction moves mass between the two residuals.
        c = (1.0 - alpha) / alpha * p_i
        residual[j] = residual.get(j, 0.0) + c
        residual[i] = residual.get(i, 0.0) - c
        for node in (i, j):
            if abs(residual.get(node, 0.0)) < DROP_TOL:
                residual.pop(node, None)
        state.frontier.add(i)
        state.frontier.add(j)
        return True
    d_new = d_old + dw
    if d_new <= 1e-12:
        # i loses its last edge and falls back to the implicit self-loop;
        # move the invariance correction entirely into the residual.
        c = (1.0 - alpha) / alpha * p_i
        residual[i] = residual.get(i, 0.0) + c
        residual[j] = residual.get(j, 0.0) - c
    else:
        delta = p_i * dw / d_old
        state.estimate[i] = p_i + delta
        residual[i] = residual.get(i, 0.0) - delta / alpha
        residual[j] = residual.get(j, 0.0) + delta * (1.0 - alpha) / alpha
        state.dirty = True
    for node in (i, j):
        if abs(residual.get(node, 0.0)) < DROP_TOL:
            residual.pop(node, None)
    state.frontier.add(i)
    state.frontier.add(j)
    return True


def adjust_for_event(state: PushState, e: EdgeEvent, g_before: DynamicGraph) -> bool:
    """Rescale estimate/residual for one edge event.

    Must run against the graph state before the event is applied. In
    undirected graphs the event perturbs both endpoint rows, so both
    orientations are absorbed. Returns True when the state changed.
    """
    changed = _adjust_orientation(state, e.src, e.dst, e.delta_weight, g_before)
    if not g_before.directed:
        changed |= _adjust_orientation(state, e.dst, e.src, e.delta_weight, g_before)
    return changed


def increment_push(
    state: PushState,
    g: DynamicGraph,
    events: list[EdgeEvent],
    max_transfers: int = DEFAULT_TRANSFER_CAP,
) -> None:
    """Absorb one snapshot's events into a single state, then push once.

    Mutates ``g``: each event is adjusted against the pre-event graph
    and then applied. Multi-seed callers must instead adjust all states
    per event before applying it (see :class:`SeedSetEngine`).
    """
    for idx, e in enumerate(events):
        adjust_for_event(state, e, g)
        g.apply_event(e, index=idx)
        # degree changes at the endpoints can expose residual-bound
        # violations even where the adjustment was a no-op
        for node in (e.src, e.dst):
            if node in state.residual:
                state.frontier.add(node)
    dynamic_push(state, g, max_transfers=max_transfers)


@dataclass
class PprVector:
    """Sparse personalized PageRank vector keyed by node id."""

    entries: dict[int, float]

    def get(self, u: int) -> float:
        return self.entries.get(u, 0.0)

    def to_dense(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        for u, x in self.entries.items():
            out[u] = x
        return out


def _walk_operator(g: DynamicGraph) -> np.ndarray:
    """Column-stochastic walk matrix; column u is u's out-distribution.

    Dangling columns get the implicit unit self-loop.
    """
    n = g.node_count
    m = np.zeros((n, n))
    for u in range(n):
        d = g.degree_sum(u)
        if d <= 0.0:
            m[u, u] = 1.0
        else:
            for v, w in g.out_items(u):
                m[v, u] = w / d
    return m


def exact_ppr_matrix(
    g: DynamicGraph, alpha: float, node_cap: int = DENSE_ORACLE_NODE_CAP
) -> np.ndarray:
    """All personalized PageRank vectors as matrix columns (test oracle)."""
    n = g.node_count
    if n > node_cap:
        raise OracleSizeError(f"dense oracle capped at {node_cap} nodes, got {n}")
    m = _walk_operator(g)
    system = np.eye(n) - (1.0 - alpha) * m
    pi = alpha * np.linalg.inv(system)
    resid = np.max(np.abs(system @ pi - alpha * np.eye(n)))
    if resid > 1e-10:
        raise GraphDriftError(f"dense solve residual {resid:.3e} above 1e-10")
    return pi


def exact_ppr_dense(
    g: DynamicGraph, seed: int, alpha: float, node_cap: int = DENSE_ORACLE_NODE_CAP
) -> PprVector:
    """Solve the teleporting-walk linear system for one seed (test oracle)."""
    n = g.node_count
    if n > node_cap:
        raise OracleSizeError(f"dense oracle capped at {node_cap} nodes, got {n}")
    m = _walk_operator(g)
    system = np.eye(n) - (1.0 - alpha) * m
    rhs = np.zeros(n)
    rhs[seed] = alpha
    x = np.linalg.solve(system, rhs)
    resid = np.max(np.abs(system @ x - rhs))
    if resid > 1e-10:
        raise GraphDriftError(f"dense solve residual {resid:.3e} above 1e-10")
    return PprVector({u: float(x[u]) for u in range(n) if x[u] != 0.0})


def residual_violations(state: PushState, g: DynamicGraph, epsilon: float | None = None):
    """Nodes violating the residual bound (audit helper for tests)."""
    eps = state.epsilon if epsilon is None else epsilon
    return [
        (u, r)
        for u, r in state.residual.items()
        if abs(r) > eps * g.effective_degree(u)
    ]


class SeedSetEngine:
    """Coordinates push states for many seeds over one event stream.

    Keeps node-to-seed indexes so that an event only touches the states
    that actually hold mass at its endpoints. The per-snapshot protocol
    is: ``adjust_event`` for every state per event (before the graph
    mutation), apply the event to the graph, repeat for all events of
    the snapshot, then ``note_degree_changes`` and ``push_all``.
    """

    def __init__(
        self,
        alpha: float,
        epsilon: float,
        max_transfers: int = DEFAULT_TRANSFER_CAP,
    ):
        self.alpha = alpha
        self.epsilon = epsilon
        self.max_transfers = max_transfers
        self.states: dict[int, PushState] = {}
        # node -> seeds whose estimate (resp. residual) has support there;
        # stale supersets are fine, missing entries are not
        self._mass_index: dict[int, set[int]] = {}
        self._residual_index: dict[int, set[int]] = {}

    def add_seed(self, v: int) -> PushState:
        if v in self.states:
            return self.states[v]
        st = init_state(v, self.alpha, self.epsilon)
        self.states[v] = st
        self._residual_index.setdefault(v, set()).add(v)
        return st

    def adjust_event(self, e: EdgeEvent, g_before: DynamicGraph) -> None:
        """Absorb one event into every state with mass at its endpoints."""
        pairs = [(e.src, e.dst)]
        if not g_before.directed:
            pairs.append((e.dst, e.src))
        for i, j in pairs:
            for seed in self._mass_index.get(i, ()):
                st = self.states[seed]
                if _adjust_orientation(st, i, j, e.delta_weight, g_before):
                    self._residual_index.setdefault(i, set()).add(seed)
                    self._residual_index.setdefault(j, set()).add(seed)

    def note_degree_changes(self, nodes) -> None:
        """Schedule residual-bound rechecks where degrees changed."""
        for u in nodes:
            for seed in self._residual_index.get(u, ()):
                st = self.states[seed]
                if u in st.residual:
                    st.frontier.add(u)

    def push_all(self, g: DynamicGraph) -> None:
        for st in self.states.values():
            if not st.frontier:
                continue
            popped, touched = dynamic_push(st, g, max_transfers=self.max_transfers)
            for u in popped:
                self._mass_index.setdefault(u, set()).add(st.seed)
            for u in touched:
                self._residual_index.setdefault(u, set()).add(st.seed)

    def dirty_states(self):
        return [st for st in self.states.values() if st.dirty]


# ----------------------------------------------------------------------
# Checkpointing
# ----------------------------------------------------------------------
#
# Binary layout (all little-endian):
#   magic   8s   b"GDPPRCK\x01"
#   count   u32  number of states
# then per state:
#   seed    u64
#   alpha   f64
#   epsilon f64
#   n_est   u64, followed by n_est (u64 node, f64 value) pairs
#   n_res   u64, followed by n_res (u64 node, f64 value) pairs
#
# States are expected to be saved after a push; frontiers and dirty
# flags are not persisted and load clean.

CHECKPOINT_MAGIC = b"GDPPRCK\x01"


def write_checkpoint(path, states) -> None:
    states = list(states)
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<I", len(states)))
        for st in states:
            fh.write(struct.pack("<Qdd", st.seed, st.alpha, st.epsilon))
            for vec in (st.estimate, st.residual):
                fh.write(struct.pack("<Q", len(vec)))
                for u in sorted(vec):
                    fh.write(struct.pack("<Qd", u, vec[u]))


def read_checkpoint(path) -> list[PushState]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != CHECKPOINT_MAGIC:
            raise GraphDriftError(f"bad checkpoint magic {magic!r}")
        (count,) = struct.unpack("<I", fh.read(4))
        out = []
        for _ in range(count):
            seed, alpha, epsilon = struct.unpack("<Qdd", fh.read(24))
            vecs = []
            for _ in range(2):
                (n,) = struct.unpack("<Q", fh.read(8))
                vec = {}
                for _ in range(n):
                    u, x = struct.unpack("<Qd", fh.read(16))
                    vec[u] = x
                vecs.append(vec)
            out.append(
                PushState(
                    seed=seed,
                    alpha=alpha,
                    epsilon=epsilon,
                    estimate=vecs[0],
                    residual=vecs[1],
                    dirty=False,
                )
            )
        return out
