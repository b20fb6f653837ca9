"""Per-seed subgraph identification strategies.

Three families: hop-limited breadth-first neighborhoods, triadic-closure
"strong neighbor" cores (neighbors that close at least one triangle
with the seed), and the hybrid form that pads the strong core with its
boundary nodes. All predicates are structural: edge weights are ignored
beyond presence, and in directed graphs the union of in- and
out-neighbors is used.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .graph import DynamicGraph

BOUNDARY_MODES = ("strong-plus-seed", "strong-only")

STRATEGY_NAMES = ("1hop", "2hop", "3hop", "tc", "hybrid-tc")


@dataclass(frozen=True)
class SubgraphStrategy:
    """Which node set to score around each seed.

    ``kind`` is one of ``k-hop``, ``tc``, ``hybrid-tc``. ``boundary``
    controls whose frontier pads the hybrid core: the strong core plus
    the seed (default) or the strong core alone.
    """

    kind: str
    k: int = 1
    boundary: str = "strong-plus-seed"

    def __post_init__(self):
        if self.kind not in ("k-hop", "tc", "hybrid-tc"):
            raise ValueError(f"unknown strategy kind {self.kind!r}")
        if self.kind == "k-hop" and self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.boundary not in BOUNDARY_MODES:
            raise ValueError(f"boundary must be one of {BOUNDARY_MODES}")

    @classmethod
    def parse(cls, name: str, boundary: str = "strong-plus-seed") -> "SubgraphStrategy":
        name = name.strip().lower()
        if name.endswith("hop") and name[:-3].isdigit():
            return cls("k-hop", k=int(name[:-3]), boundary=boundary)
        if name == "tc":
            return cls("tc", boundary=boundary)
        if name == "hybrid-tc":
            return cls("hybrid-tc", boundary=boundary)
        raise ValueError(f"unknown strategy {name!r} (expected one of {STRATEGY_NAMES})")

    @property
    def label(self) -> str:
        return f"{self.k}hop" if self.kind == "k-hop" else self.kind


@dataclass
class SeedSubgraph:
    """Node set identified around one seed.

    ``strong`` is the triadic-closure core (empty for hop strategies)
    and ``boundary`` the frontier added by the hybrid strategy; both are
    subsets of ``nodes``, which always contains the seed.
    """

    seed: int
    nodes: set[int]
    strong: set[int] = field(default_factory=set)
    boundary: set[int] = field(default_factory=set)


def k_hop(g: DynamicGraph, v: int, k: int) -> SeedSubgraph:
    """All nodes within unweighted distance k of the seed."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    reached = {v}
    frontier = deque([(v, 0)])
    while frontier:
        u, depth = frontier.popleft()
        if depth == k:
            continue
        for w in g.neighbor_ids(u):
            if w not in reached:
                reached.add(w)
                frontier.append((w, depth + 1))
    return SeedSubgraph(seed=v, nodes=reached)


def strong_neighbors(g: DynamicGraph, v: int) -> set[int]:
    """Neighbors of v that share at least one common neighbor with it.

    Equivalent to the nonzero pattern of the squared binarized adjacency
    restricted to v's neighborhood, realized as sparse neighborhood
    intersections instead of a matrix product.
    """
    nei_v = g.neighbor_ids(v)
    strong = set()
    for u in nei_v:
        if not nei_v.isdisjoint(g.neighbor_ids(u)):
            strong.add(u)
    return strong


def hybrid_tc(
    g: DynamicGraph, v: int, boundary_of: str = "strong-plus-seed"
) -> SeedSubgraph:
    """Strong-neighbor core padded with its boundary nodes."""
    if boundary_of not in BOUNDARY_MODES:
        raise ValueError(f"boundary_of must be one of {BOUNDARY_MODES}")
    strong = strong_neighbors(g, v)
    core = strong | {v}
    frontier_sources = core if boundary_of == "strong-plus-seed" else strong
    boundary = set()
    for c in frontier_sources:
        boundary.update(g.neighbor_ids(c))
    boundary -= core
    return SeedSubgraph(seed=v, nodes=core | boundary, strong=strong, boundary=boundary)


def identify(g: DynamicGraph, v: int, strategy: SubgraphStrategy) -> SeedSubgraph:
    """Dispatch a strategy for one seed."""
    if strategy.kind == "k-hop":
        return k_hop(g, v, strategy.k)
    if strategy.kind == "tc":
        strong = strong_neighbors(g, v)
        return SeedSubgraph(seed=v, nodes=strong | {v}, strong=strong)
    return hybrid_tc(g, v, strategy.boundary)
