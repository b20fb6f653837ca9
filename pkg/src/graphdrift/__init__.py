"""Streaming anomaly detection for dynamic weighted graphs.

Maintains approximate personalized PageRank vectors per seed node under
an edge-event stream, sketches them into fixed-dimension embeddings,
and aggregates embedding shifts over per-seed subgraphs into snapshot
anomaly scores with a top-k evaluation harness.
"""

__version__ = "0.1.0"

from .embedding import (
    DEFAULT_DIM,
    Embedding,
    SparsifyConfig,
    distance,
    reduce_dim,
    sparsify,
    zero_embedding,
)
from .errors import (
    EventLogError,
    GraphDriftError,
    IncompatibleEmbeddingError,
    InternalInconsistencyError,
    InvalidEventError,
    OracleSizeError,
    PushDivergenceError,
    ScoringError,
)
from .graph import DynamicGraph, EdgeEvent, EventKind
from .pipeline import (
    EvalReport,
    EvalRow,
    GroundTruth,
    IngestResult,
    RunConfig,
    SeedPolicy,
    SnapshotPlan,
    evaluate,
    ingest,
    run,
    select_seeds,
)
from .ppr import (
    PprVector,
    PushState,
    SeedSetEngine,
    adjust_for_event,
    dynamic_push,
    exact_ppr_dense,
    exact_ppr_matrix,
    increment_push,
    init_state,
)
from .scoring import Aggregator, ScoreSeries, node_score, rank_snapshots, snapshot_score, subgraph_score
from .subgraphs import SeedSubgraph, SubgraphStrategy, hybrid_tc, identify, k_hop, strong_neighbors
from .synth import CliqueInjection, generate_synthetic

__all__ = [
    "Aggregator",
    "CliqueInjection",
    "DEFAULT_DIM",
    "DynamicGraph",
    "EdgeEvent",
    "Embedding",
    "EvalReport",
    "EvalRow",
    "EventKind",
    "EventLogError",
    "GraphDriftError",
    "GroundTruth",
    "IncompatibleEmbeddingError",
    "IngestResult",
    "InternalInconsistencyError",
    "InvalidEventError",
    "OracleSizeError",
    "PprVector",
    "PushDivergenceError",
    "PushState",
    "RunConfig",
    "ScoreSeries",
    "ScoringError",
    "SeedPolicy",
    "SeedSetEngine",
    "SeedSubgraph",
    "SnapshotPlan",
    "SparsifyConfig",
    "SubgraphStrategy",
    "adjust_for_event",
    "distance",
    "dynamic_push",
    "evaluate",
    "exact_ppr_dense",
    "exact_ppr_matrix",
    "generate_synthetic",
    "hybrid_tc",
    "identify",
    "increment_push",
    "ingest",
    "init_state",
    "k_hop",
    "node_score",
    "rank_snapshots",
    "reduce_dim",
    "run",
    "select_seeds",
    "snapshot_score",
    "sparsify",
    "strong_neighbors",
    "subgraph_score",
    "zero_embedding",
]
