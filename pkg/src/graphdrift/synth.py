"""Synthetic dynamic-graph streams with injected clique anomalies.

Background traffic follows a preferential-attachment style endpoint
pool, giving a heavy-tailed degree profile and gradual node arrival. At
each injected snapshot every edge of a clique over randomly chosen
nodes is inserted and labeled anomalous. Output is the standard TSV
event log (timestamps equal the snapshot index) plus an optional
sidecar listing the per-snapshot event counts for the explicit
snapshot-boundaries plan.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .eventlog import write_event_log


@dataclass(frozen=True)
class CliqueInjection:
    snapshot: int
    clique_size: int
    weight: float = 1.0

    @classmethod
    def parse(cls, text: str) -> "CliqueInjection":
        """Parse 'SNAPSHOT:SIZE[:WEIGHT]'."""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"injection must be SNAPSHOT:SIZE[:WEIGHT], got {text!r}")
        weight = float(parts[2]) if len(parts) == 3 else 1.0
        return cls(snapshot=int(parts[0]), clique_size=int(parts[1]), weight=weight)


def generate_synthetic(
    n: int,
    num_snapshots: int,
    background_rate: int,
    injections,
    rng_seed: int = 0,
    out_path=None,
    boundaries_path=None,
    fresh_node_prob: float = 0.15,
):
    """Build the event stream; optionally write the log and boundaries.

    Returns (events, counts) where events are raw
    (time, src, dst, delta, label) tuples and counts is the number of
    events per snapshot (index 0 = snapshot 1).
    """
    injections = list(injections)
    for inj in injections:
        if inj.clique_size > n:
            raise ValueError(
                f"clique size {inj.clique_size} exceeds node count {n}"
            )
        if not 1 <= inj.snapshot <= num_snapshots:
            raise ValueError(
                f"injection snapshot {inj.snapshot} outside 1..{num_snapshots}"
            )
    by_snapshot: dict[int, list[CliqueInjection]] = {}
    for inj in injections:
        by_snapshot.setdefault(inj.snapshot, []).append(inj)

    rng = random.Random(rng_seed)
    pool: list[int] = [0, 1]  # endpoint pool; repetition encodes degree bias
    next_fresh = 2

    def pick_endpoints():
        nonlocal next_fresh
        if next_fresh < n and rng.random() < fresh_node_prob:
            src = next_fresh
            next_fresh += 1
        else:
            src = rng.choice(pool)
        dst = rng.choice(pool)
        while dst == src:
            dst = rng.randrange(n)
        pool.append(src)
        pool.append(dst)
        return src, dst

    events = []
    counts = []
    for t in range(1, num_snapshots + 1):
        count = 0
        for _ in range(background_rate):
            src, dst = pick_endpoints()
            events.append((float(t), src, dst, 1.0, False))
            count += 1
        for inj in by_snapshot.get(t, ()):
            members = rng.sample(range(n), inj.clique_size)
            for a in range(len(members)):
                for b in range(a + 1, len(members)):
                    events.append(
                        (float(t), members[a], members[b], inj.weight, True)
                    )
                    count += 1
            for m in members:
                pool.append(m)
        counts.append(count)

    if out_path is not None:
        write_event_log(out_path, events)
    if boundaries_path is not None:
        with open(boundaries_path, "w", encoding="utf-8") as fh:
            fh.write("# events per snapshot\n")
            for c in counts:
                fh.write(f"{c}\n")
    return events, counts
