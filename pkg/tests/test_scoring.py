import math
import random

import numpy as np
import pytest

from graphdrift.embedding import Embedding, zero_embedding
from graphdrift.errors import ScoringError
from graphdrift.scoring import (
    Aggregator,
    ScoreSeries,
    node_score,
    rank_snapshots,
    snapshot_score,
    subgraph_score,
)


class TestAggregator:
    def test_hand_values(self):
        vals = [1.0, 2.0, 3.0, 4.0]
        assert Aggregator.SUM.apply(vals) == 10.0
        assert Aggregator.MEAN.apply(vals) == 2.5
        assert Aggregator.MAX.apply(vals) == 4.0
        assert Aggregator.MIN.apply(vals) == 1.0
        assert Aggregator.MEDIAN.apply(vals) == 2.5

    def test_median_odd(self):
        assert Aggregator.MEDIAN.apply([5.0, 1.0, 3.0]) == 3.0

    def test_parse(self):
        assert Aggregator.parse("Median") is Aggregator.MEDIAN
        with pytest.raises(ValueError):
            Aggregator.parse("mode")

    def test_empty_rejected(self):
        with pytest.raises(ScoringError):
            Aggregator.SUM.apply([])

    def test_sanity_invariants(self):
        rng = random.Random(6)
        for _ in range(50):
            vals = [rng.uniform(0, 10) for _ in range(rng.randint(1, 20))]
            lo = Aggregator.MIN.apply(vals)
            med = Aggregator.MEDIAN.apply(vals)
            hi = Aggregator.MAX.apply(vals)
            assert lo <= med <= hi
            assert Aggregator.SUM.apply(vals) == pytest.approx(
                Aggregator.MEAN.apply(vals) * len(vals)
            )
            shuffled = vals[:]
            rng.shuffle(shuffled)
            for agg in Aggregator:
                assert agg.apply(shuffled) == pytest.approx(agg.apply(vals))

    def test_monotonicity(self):
        rng = random.Random(7)
        for _ in range(30):
            vals = [rng.uniform(0, 5) for _ in range(8)]
            idx = rng.randrange(8)
            bumped = vals[:]
            bumped[idx] += rng.uniform(0.1, 3.0)
            for agg in (Aggregator.SUM, Aggregator.MEAN, Aggregator.MAX):
                assert agg.apply(bumped) >= agg.apply(vals)


class TestNodeScore:
    def test_unchanged_node_is_zero(self):
        e = Embedding(np.array([1.0, 2.0]), 2, 0)
        assert node_score(e, e, 2.0) == 0.0

    def test_new_node_scores_its_norm(self):
        e = Embedding(np.array([3.0, -4.0]), 2, 0)
        assert node_score(zero_embedding(2, 0), e, 2.0) == pytest.approx(5.0)

    def test_hand_l1(self):
        a = Embedding(np.array([1.0, 0.0]), 2, 0)
        b = Embedding(np.array([0.0, 1.0]), 2, 0)
        assert node_score(a, b, 1.0) == pytest.approx(2.0)


class TestSubgraphScore:
    def test_singleton(self):
        for agg in Aggregator:
            assert subgraph_score({1: 3.0}, {1}, agg) == 3.0

    def test_multiset(self):
        delta = {1: 1.0, 2: 2.0, 3: 3.0, 4: 4.0}
        nodes = {1, 2, 3, 4}
        assert subgraph_score(delta, nodes, Aggregator.SUM) == 10.0
        assert subgraph_score(delta, nodes, Aggregator.MEDIAN) == 2.5

    def test_missing_nodes_contribute_zero(self):
        assert subgraph_score({1: 3.0}, {1, 2, 3}, Aggregator.SUM) == 3.0
        assert subgraph_score({1: 3.0}, {1, 2, 3}, Aggregator.MIN) == 0.0

    def test_empty_node_set_rejected(self):
        with pytest.raises(ScoringError):
            subgraph_score({1: 1.0}, set(), Aggregator.SUM)


class TestSnapshotScore:
    def test_single_seed_passthrough(self):
        assert snapshot_score({0: 2.5}, Aggregator.MEAN) == 2.5

    def test_mean_and_max(self):
        scores = {0: 2.0, 1: 4.0}
        assert snapshot_score(scores, Aggregator.MEAN) == 3.0
        assert snapshot_score(scores, Aggregator.MAX) == 4.0

    def test_empty_seed_set_rejected(self):
        with pytest.raises(ScoringError):
            snapshot_score({}, Aggregator.MEAN)


class TestRankSnapshots:
    def series(self, values):
        s = ScoreSeries()
        for t, v in enumerate(values):
            s.record(t, v)
        return s

    def test_top_two(self):
        assert rank_snapshots(self.series([0.1, 0.9, 0.5]), 2) == [1, 2]

    def test_tie_break_by_index(self):
        assert rank_snapshots(self.series([0.5, 0.5, 0.5]), 2) == [0, 1]

    def test_k_zero(self):
        assert rank_snapshots(self.series([0.5]), 0) == []

    def test_clamp_warns(self):
        with pytest.warns(UserWarning):
            got = rank_snapshots(self.series([0.3, 0.1]), 5)
        assert got == [0, 1]

    def test_invariant_under_monotone_transform(self):
        rng = random.Random(8)
        vals = [rng.uniform(0, 1) for _ in range(40)]
        base = rank_snapshots(self.series(vals), 10)
        for f in (lambda x: 3 * x + 2, lambda x: x**3, math.exp):
            assert rank_snapshots(self.series([f(v) for v in vals]), 10) == base

    def test_non_finite_scores_rejected(self):
        s = ScoreSeries()
        with pytest.raises(ScoringError):
            s.record(0, float("nan"))
        with pytest.raises(ScoringError):
            s.record(0, float("inf"))
