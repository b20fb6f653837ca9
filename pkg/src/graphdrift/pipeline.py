"""End-to-end orchestration: ingest, stream scoring, evaluation.

The stream is processed snapshot by snapshot. For each snapshot the
engine first absorbs every edge event into all affected push states
(against the pre-event graph), applies the event to the graph, and
after the whole batch pushes every state back under its residual bound.
Changed estimate vectors are re-sketched; each node's embedding shift
is aggregated over the node set identified around every seed, and the
per-seed scores aggregate again into the snapshot's anomaly score.

Ground-truth labels ride along from ingest to evaluation but are never
visible to the scorer.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

from . import __version__ as _pkg_version
from .embedding import (
    DEFAULT_DIM,
    SPARSIFY_CEIL,
    Embedding,
    SparsifyConfig,
    distance,
    reduce_dim,
    sparsify,
    zero_embedding,
)
from .errors import EventLogError, GraphDriftError
from .eventlog import (
    build_id_map,
    events_from_rows,
    read_event_log,
    read_id_map,
    sha256_file,
    write_id_map,
)
from .graph import DynamicGraph, EdgeEvent
from .ppr import DEFAULT_TRANSFER_CAP, SeedSetEngine
from .scoring import Aggregator, ScoreSeries, rank_snapshots, snapshot_score, subgraph_score
from .subgraphs import SubgraphStrategy, identify

DEFAULT_ALPHA = 0.15
DEFAULT_EPSILON = 0.01
DEFAULT_HASH_SEED = 1
HEADLINE_K = 250
DEFAULT_K_LIST = tuple(sorted(set(range(50, 801, 50)) | {HEADLINE_K}))


# ----------------------------------------------------------------------
# plans and policies
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SnapshotPlan:
    """How the event stream is cut into snapshots.

    ``warmup_snapshots`` leading snapshots are folded into the initial
    graph and never scored; scored snapshots are renumbered from 1.
    """

    mode: str  # "events" | "window" | "boundaries"
    batch_size: int | None = None
    window: float | None = None
    boundaries: tuple[int, ...] | None = None
    warmup_snapshots: int = 0

    @classmethod
    def fixed_event_count(cls, batch_size: int, warmup_snapshots: int = 0):
        if batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {batch_size}")
        return cls("events", batch_size=batch_size, warmup_snapshots=warmup_snapshots)

    @classmethod
    def timestamp_window(cls, width: float, warmup_snapshots: int = 0):
        if width <= 0:
            raise ValueError(f"window width must be positive, got {width}")
        return cls("window", window=width, warmup_snapshots=warmup_snapshots)

    @classmethod
    def explicit_boundaries(cls, counts, warmup_snapshots: int = 0):
        counts = tuple(int(c) for c in counts)
        if any(c < 0 for c in counts):
            raise ValueError("per-snapshot event counts must be >= 0")
        return cls("boundaries", boundaries=counts, warmup_snapshots=warmup_snapshots)

    @classmethod
    def boundaries_from_file(cls, path, warmup_snapshots: int = 0):
        """Read per-snapshot event counts, one integer per line."""
        counts = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    counts.append(int(line))
                except ValueError:
                    raise EventLogError(f"bad event count {line!r}", line=line_no)
        return cls.explicit_boundaries(counts, warmup_snapshots)

    def describe(self) -> str:
        if self.mode == "events":
            return f"events:{self.batch_size}"
        if self.mode == "window":
            return f"window:{self.window:g}"
        return f"boundaries:{len(self.boundaries)}"


def partition_events(events, plan: SnapshotPlan) -> list[list[EdgeEvent]]:
    """Split the full event list into contiguous snapshot batches."""
    if plan.mode == "events":
        size = plan.batch_size
        return [events[i : i + size] for i in range(0, len(events), size)] or [[]]
    if plan.mode == "window":
        if not events:
            return [[]]
        t0 = events[0].time
        width = plan.window
        batches: list[list[EdgeEvent]] = []
        for e in events:
            k = int(math.floor((e.time - t0) / width))
            while len(batches) <= k:
                batches.append([])
            batches[k].append(e)
        return batches
    total = sum(plan.boundaries)
    if total != len(events):
        raise EventLogError(
            f"snapshot boundaries cover {total} events but the log has {len(events)}"
        )
    batches = []
    pos = 0
    for c in plan.boundaries:
        batches.append(events[pos : pos + c])
        pos += c
    return batches


@dataclass(frozen=True)
class SeedPolicy:
    """Which nodes act as seeds at every snapshot."""

    mode: str  # "all" | "high-degree" | "explicit"
    top_k: int | None = None
    seeds: tuple[int, ...] | None = None

    @classmethod
    def all_nodes(cls):
        return cls("all")

    @classmethod
    def high_degree(cls, top_k: int):
        if top_k < 1:
            raise ValueError(f"top_k must be >= 1, got {top_k}")
        return cls("high-degree", top_k=top_k)

    @classmethod
    def explicit(cls, seeds):
        return cls("explicit", seeds=tuple(int(s) for s in seeds))

    @classmethod
    def parse(cls, text: str) -> "SeedPolicy":
        """Parse 'all', 'high-degree:K', or 'file:PATH'."""
        text = text.strip()
        if text == "all":
            return cls.all_nodes()
        if text.startswith("high-degree:"):
            return cls.high_degree(int(text.split(":", 1)[1]))
        if text.startswith("file:"):
            path = text.split(":", 1)[1]
            with open(path, "r", encoding="utf-8") as fh:
                seeds = [
                    int(line.strip())
                    for line in fh
                    if line.strip() and not line.startswith("#")
                ]
            return cls.explicit(seeds)
        raise ValueError(f"unknown seed policy {text!r}")

    def describe(self) -> str:
        if self.mode == "all":
            return "all"
        if self.mode == "high-degree":
            return f"high-degree:{self.top_k}"
        return f"explicit:{len(self.seeds)}"


def select_seeds(g: DynamicGraph, policy: SeedPolicy) -> list[int]:
    """Seed nodes for the current graph, ascending and deterministic."""
    existing = g.existing_nodes
    if policy.mode == "all":
        return sorted(existing)
    if policy.mode == "high-degree":
        ranked = sorted(existing, key=lambda u: (-g.degree_sum(u), u))
        return sorted(ranked[: policy.top_k])
    chosen = []
    for s in policy.seeds:
        if s in existing:
            chosen.append(s)
        else:
            warnings.warn(f"explicit seed {s} not in graph; skipped", stacklevel=2)
    return sorted(set(chosen))


# ----------------------------------------------------------------------
# ground truth and evaluation
# ----------------------------------------------------------------------


@dataclass
class GroundTruth:
    """Per-snapshot anomaly flags derived from labeled edges.

    A snapshot is anomalous when it carries at least ``min_count``
    labeled events. Fixed at ingest; invisible to the scorer.
    """

    flags: dict[int, bool]
    min_count: int = 1

    @property
    def total_anomalies(self) -> int:
        return sum(1 for v in self.flags.values() if v)

    @classmethod
    def from_batches(cls, batches, min_count: int = 1) -> "GroundTruth":
        flags = {
            t: sum(1 for e in batch if e.anomalous) >= min_count
            for t, batch in enumerate(batches, start=1)
        }
        return cls(flags=flags, min_count=min_count)


@dataclass(frozen=True)
class EvalRow:
    k_prime: int
    precision: float
    recall: float
    f1: float


@dataclass
class EvalReport:
    rows: list[EvalRow]

    @property
    def headline(self) -> EvalRow | None:
        for row in self.rows:
            if row.k_prime == HEADLINE_K:
                return row
        return None


def evaluate(series: ScoreSeries, truth: GroundTruth, k_list=None) -> EvalReport:
    """Top-k' precision/recall/F1 rows against the ground truth."""
    ks = DEFAULT_K_LIST if k_list is None else tuple(k_list)
    total = truth.total_anomalies
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # clamping inside rank_snapshots
        for k in ks:
            picked = rank_snapshots(series, k)
            hits = sum(1 for t in picked if truth.flags.get(t, False))
            precision = hits / k if k > 0 else 0.0
            recall = hits / total if total > 0 else 0.0
            f1 = (
                2.0 * precision * recall / (precision + recall)
                if precision + recall > 0
                else 0.0
            )
            rows.append(EvalRow(k, precision, recall, f1))
    return EvalReport(rows=rows)


def calibrate_label_rule(batches, max_count: int = 200) -> list[tuple[int, int]]:
    """Sweep the min-count label rule; rows of (min_count, #anomalous)."""
    per_snapshot = [sum(1 for e in batch if e.anomalous) for batch in batches]
    table = []
    for mc in range(1, max_count + 1):
        table.append((mc, sum(1 for c in per_snapshot if c >= mc)))
        if table[-1][1] == 0:
            break
    return table


# ----------------------------------------------------------------------
# ingest
# ----------------------------------------------------------------------


@dataclass
class IngestResult:
    graph: DynamicGraph
    snapshots: list[list[EdgeEvent]]
    truth: GroundTruth
    num_nodes: int
    id_map: dict[str, int]
    info: dict


def _unit_event(g: DynamicGraph, e: EdgeEvent) -> EdgeEvent | None:
    """Coerce one event to the unit-weight view of the stream.

    Positive deltas insert the edge at weight 1 (no-op when present);
    negative deltas remove it entirely (no-op when absent).
    """
    cur = g.weight(e.src, e.dst)
    if e.delta_weight > 0.0:
        if cur > 0.0:
            return None
        return replace(e, delta_weight=1.0, kind=None)
    if e.delta_weight < 0.0:
        if cur <= 0.0:
            return None
        return replace(e, delta_weight=-cur, kind=None)
    return None


def ingest(
    path,
    id_map_path=None,
    plan: SnapshotPlan | None = None,
    directed: bool = False,
    weighted: bool = True,
    allow_unsorted: bool = False,
    min_count: int = 1,
) -> IngestResult:
    """Read an event log, fold warm-up into the initial graph, batch the
    rest into snapshots, and fix the ground truth."""
    if plan is None:
        plan = SnapshotPlan.fixed_event_count(1)
    rows, skipped_self_loops = read_event_log(path, allow_unsorted=allow_unsorted)
    if id_map_path is not None and _exists(id_map_path):
        id_map = read_id_map(id_map_path)
        fresh = build_id_map(rows)
        added = False
        for orig in fresh:
            if orig not in id_map:
                id_map[orig] = len(id_map)
                added = True
        if added:
            write_id_map(id_map_path, id_map)
    else:
        id_map = build_id_map(rows)
        if id_map_path is not None:
            write_id_map(id_map_path, id_map)
    events = events_from_rows(rows, id_map)
    batches = partition_events(events, plan)
    warm = plan.warmup_snapshots
    if warm > len(batches):
        raise EventLogError(
            f"warmup covers {warm} snapshots but the plan yields {len(batches)}"
        )
    g0 = DynamicGraph(directed=directed)
    for batch in batches[:warm]:
        for e in batch:
            ee = e if weighted else _unit_event(g0, e)
            if ee is None:
                continue
            g0.apply_event(ee, index=e.line)
    scored = batches[warm:]
    truth = GroundTruth.from_batches(scored, min_count=min_count)
    info = {
        "input": str(path),
        "input_sha256": sha256_file(path),
        "num_events": len(events),
        "num_nodes": len(id_map),
        "num_snapshots_total": len(batches),
        "num_snapshots_scored": len(scored),
        "warmup_snapshots": warm,
        "skipped_self_loops": skipped_self_loops,
        "anomalous_snapshots": truth.total_anomalies,
        "plan": plan.describe(),
        "directed": directed,
        "weighted": weighted,
        "label_min_count": min_count,
    }
    return IngestResult(
        graph=g0,
        snapshots=scored,
        truth=truth,
        num_nodes=len(id_map),
        id_map=id_map,
        info=info,
    )


def _exists(path) -> bool:
    import os

    return os.path.exists(path)


# ----------------------------------------------------------------------
# embedding stores
# ----------------------------------------------------------------------


class _SketchStore:
    """Keeps the latest sketch per node; update returns the shift."""

    def __init__(self, dim, hash_seed, cfg, value_mode, p_norm):
        self.dim = dim
        self.hash_seed = hash_seed
        self.cfg = cfg
        self.value_mode = value_mode
        self.p_norm = p_norm
        self._emb: dict[int, Embedding] = {}

    def _sketch(self, sparse_p) -> Embedding:
        return reduce_dim(sparse_p, self.dim, self.hash_seed, self.cfg, self.value_mode)

    def baseline(self, node, sparse_p) -> None:
        self._emb[node] = self._sketch(sparse_p)

    def update(self, node, sparse_p) -> float:
        new = self._sketch(sparse_p)
        old = self._emb.get(node)
        if old is None:
            old = zero_embedding(self.dim, self.hash_seed)
        shift = distance(old, new, self.p_norm)
        self._emb[node] = new
        return shift

    def embeddings(self):
        return self._emb


class _RawVectorStore:
    """Unsketched reference store: distances on raw sparsified vectors."""

    def __init__(self, p_norm):
        self.p_norm = p_norm
        self._vec: dict[int, dict[int, float]] = {}

    def baseline(self, node, sparse_p) -> None:
        self._vec[node] = dict(sparse_p)

    def update(self, node, sparse_p) -> float:
        old = self._vec.get(node, {})
        keys = old.keys() | sparse_p.keys()
        p = self.p_norm
        if p == 1.0:
            shift = sum(abs(old.get(k, 0.0) - sparse_p.get(k, 0.0)) for k in keys)
        else:
            shift = (
                sum(abs(old.get(k, 0.0) - sparse_p.get(k, 0.0)) ** p for k in keys)
                ** (1.0 / p)
            )
        self._vec[node] = dict(sparse_p)
        return float(shift)


# ----------------------------------------------------------------------
# run
# ----------------------------------------------------------------------


@dataclass
class RunConfig:
    """Effective parameters of one scoring run."""

    alpha: float = DEFAULT_ALPHA
    epsilon: float = DEFAULT_EPSILON
    dim: int = DEFAULT_DIM
    hash_seed: int = DEFAULT_HASH_SEED
    strategy: SubgraphStrategy = field(
        default_factory=lambda: SubgraphStrategy("hybrid-tc")
    )
    phi: Aggregator = Aggregator.SUM
    f_agg: Aggregator = Aggregator.MEAN
    p_norm: float = 2.0
    seed_policy: SeedPolicy = field(default_factory=SeedPolicy.all_nodes)
    weighted: bool = True
    embed_value: str = "log-ratio"
    sketch: bool = True
    eps_c_override: float | None = None
    max_transfers: int = DEFAULT_TRANSFER_CAP
    keep_detail: bool = False

    def echo(self) -> dict:
        return {
            "alpha": self.alpha,
            "epsilon": self.epsilon,
            "dim": self.dim,
            "hash_seed": self.hash_seed,
            "strategy": self.strategy.label,
            "boundary_of": self.strategy.boundary,
            "phi": self.phi.value,
            "f": self.f_agg.value,
            "p_norm": self.p_norm,
            "seeds": self.seed_policy.describe(),
            "weighted": self.weighted,
            "embed_value": self.embed_value,
            "sketch": self.sketch,
        }


def run(
    g: DynamicGraph,
    snapshots,
    config: RunConfig,
    capacity: int | None = None,
    progress=None,
) -> ScoreSeries:
    """Score every snapshot of the stream. Mutates ``g`` in place.

    ``capacity`` is the total number of node ids in the stream; it pins
    the sparsification cutoff for the whole run so that embeddings of
    unchanged vectors stay bit-identical across snapshots.
    """
    if capacity is None:
        capacity = g.node_count
        for batch in snapshots:
            for e in batch:
                capacity = max(capacity, e.src + 1, e.dst + 1)
    if config.eps_c_override is not None:
        cfg = SparsifyConfig(config.eps_c_override)
    else:
        cfg = SparsifyConfig.from_node_count(capacity)

    engine = SeedSetEngine(config.alpha, config.epsilon, config.max_transfers)
    if config.sketch:
        store = _SketchStore(
            config.dim, config.hash_seed, cfg, config.embed_value, config.p_norm
        )
    else:
        store = _RawVectorStore(config.p_norm)

    series = ScoreSeries(detail={} if config.keep_detail else None)

    # baselines on the initial graph
    for v in select_seeds(g, config.seed_policy):
        engine.add_seed(v)
    engine.push_all(g)
    for st in engine.dirty_states():
        store.baseline(st.seed, sparsify(st.estimate, cfg))
        st.dirty = False

    for t, batch in enumerate(snapshots, start=1):
        endpoints = set()
        for e in batch:
            ee = e if config.weighted else _unit_event(g, e)
            if ee is None:
                continue
            engine.adjust_event(ee, g)
            g.apply_event(ee, index=e.line)
            endpoints.add(ee.src)
            endpoints.add(ee.dst)
        engine.note_degree_changes(endpoints)
        seeds = select_seeds(g, config.seed_policy)
        for v in seeds:
            if v not in engine.states:
                engine.add_seed(v)
        engine.push_all(g)

        shifts: dict[int, float] = {}
        for st in engine.dirty_states():
            shifts[st.seed] = store.update(st.seed, sparsify(st.estimate, cfg))
            st.dirty = False

        if seeds:
            sub_scores = {}
            for v in seeds:
                sg = identify(g, v, config.strategy)
                sub_scores[v] = subgraph_score(shifts, sg.nodes, config.phi)
            score = snapshot_score(sub_scores, config.f_agg)
        else:
            sub_scores = {}
            score = 0.0
        series.record(t, score, sub_scores)
        if progress is not None:
            progress(t, score)
    return series


# ----------------------------------------------------------------------
# outputs
# ----------------------------------------------------------------------


def _write_header_comments(fh, echo: dict) -> None:
    for key in sorted(echo):
        fh.write(f"# {key}={echo[key]}\n")


def write_score_csv(path, series: ScoreSeries, truth: GroundTruth, echo: dict) -> None:
    """Score CSV: one row per snapshot plus its rank and truth flag."""
    order = series.ranked()
    rank_of = {t: i + 1 for i, t in enumerate(order)}
    with open(path, "w", encoding="utf-8") as fh:
        _write_header_comments(fh, echo)
        fh.write("snapshot,score,rank,is_ground_truth_anomaly\n")
        for t in sorted(series.scores):
            flag = 1 if truth.flags.get(t, False) else 0
            fh.write(f"{t},{series.scores[t]:.17g},{rank_of[t]},{flag}\n")


def read_score_csv(path) -> tuple[ScoreSeries, GroundTruth]:
    series = ScoreSeries()
    flags = {}
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("snapshot,"):
                continue
            t_str, score_str, _rank, flag_str = line.split(",")
            t = int(t_str)
            series.scores[t] = float(score_str)
            flags[t] = flag_str == "1"
    return series, GroundTruth(flags=flags)


def write_eval_csv(path, report: EvalReport, echo: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        _write_header_comments(fh, echo)
        fh.write("k_prime,precision,recall,f1\n")
        for row in report.rows:
            fh.write(
                f"{row.k_prime},{row.precision:.10g},{row.recall:.10g},{row.f1:.10g}\n"
            )


def write_manifest(path, config_echo: dict, info: dict) -> None:
    payload = {"package_version": _pkg_version, "config": config_echo, "input": info}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_subgraphs(g, snapshots, strategy, policy, weighted: bool = True):
    """Yield per-snapshot, per-seed membership dicts (debug stream).

    Applies events without any scoring.
    """
    for t, batch in enumerate(snapshots, start=1):
        for e in batch:
            ee = e if weighted else _unit_event(g, e)
            if ee is not None:
                g.apply_event(ee, index=e.line)
        for v in select_seeds(g, policy):
            sg = identify(g, v, strategy)
            yield {
                "snapshot": t,
                "seed": v,
                "strategy": strategy.label,
                "nodes": sorted(sg.nodes),
            }
