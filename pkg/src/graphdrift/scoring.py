"""Anomaly score computation and aggregation.

A node's score for a snapshot is the distance between its consecutive
embeddings. Scores are aggregated twice: once over each seed's subgraph
(the subgraph aggregator) and once over all seeds (the graph
aggregator), yielding one score per snapshot.
"""

from __future__ import annotations

import enum
import statistics
import warnings
from dataclasses import dataclass, field

from .embedding import Embedding, distance
from .errors import ScoringError


class Aggregator(enum.Enum):
    MEAN = "mean"
    SUM = "sum"
    MAX = "max"
    MIN = "min"
    MEDIAN = "median"

    @classmethod
    def parse(cls, name: str) -> "Aggregator":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown aggregator {name!r} (expected one of {valid})")

    def apply(self, values) -> float:
        vals = list(values)
        if not vals:
            raise ScoringError(f"{self.value} aggregation over an empty set")
        if self is Aggregator.MEAN:
            return sum(vals) / len(vals)
        if self is Aggregator.SUM:
            return float(sum(vals))
        if self is Aggregator.MAX:
            return float(max(vals))
        if self is Aggregator.MIN:
            return float(min(vals))
        # median of an even-length list is the mean of the two central values
        return float(statistics.median(vals))


def node_score(x_prev: Embedding, x_curr: Embedding, p_norm: float) -> float:
    """Shift of one node between consecutive snapshots."""
    return distance(x_prev, x_curr, p_norm)


def subgraph_score(delta, nodes, phi: Aggregator) -> float:
    """Aggregate per-node shifts over one identified node set.

    Nodes missing from ``delta`` never had an embedding at either
    snapshot and contribute 0.
    """
    if not nodes:
        raise ScoringError("subgraph_score over an empty node set")
    return phi.apply(delta.get(i, 0.0) for i in nodes)


def snapshot_score(sub_scores, f: Aggregator) -> float:
    """Aggregate per-seed subgraph scores into one snapshot score."""
    if not sub_scores:
        raise ScoringError("snapshot_score over an empty seed set")
    return f.apply(sub_scores.values())


@dataclass
class ScoreSeries:
    """Per-snapshot anomaly scores, optionally with per-seed detail."""

    scores: dict[int, float] = field(default_factory=dict)
    detail: dict[int, dict[int, float]] | None = None

    def record(self, t: int, score: float, sub_scores=None) -> None:
        if not (score == score and abs(score) != float("inf")):
            raise ScoringError(f"non-finite score {score} at snapshot {t}")
        self.scores[t] = score
        if self.detail is not None and sub_scores is not None:
            self.detail[t] = dict(sub_scores)

    def ranked(self) -> list[int]:
        """Snapshot indices from highest to lowest score, ties by index."""
        return sorted(self.scores, key=lambda t: (-self.scores[t], t))


def rank_snapshots(series: ScoreSeries, k_prime: int) -> list[int]:
    """Indices of the k' highest-scoring snapshots (deterministic)."""
    if k_prime < 0:
        raise ValueError(f"k_prime must be >= 0, got {k_prime}")
    order = series.ranked()
    if k_prime > len(order):
        warnings.warn(
            f"k_prime {k_prime} exceeds {len(order)} scored snapshots; clamping",
            stacklevel=2,
        )
        k_prime = len(order)
    return order[:k_prime]
