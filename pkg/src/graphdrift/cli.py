"""Command-line interface.

Subcommands: ``run`` (score a stream), ``evaluate`` (top-k precision,
recall, F1 from a score CSV), ``synth`` (generate a synthetic stream),
``calibrate-labels`` (sweep the snapshot label rule), and
``dump-subgraphs`` (per-seed membership debug dump).

Flag precedence: command-line flags override the optional JSON config
file, which overrides built-in defaults. The effective configuration is
echoed into every output file header and into the run manifest.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from .pipeline import (
    DEFAULT_ALPHA,
    DEFAULT_EPSILON,
    DEFAULT_HASH_SEED,
    RunConfig,
    SeedPolicy,
    SnapshotPlan,
    calibrate_label_rule,
    dump_subgraphs,
    evaluate,
    ingest,
    read_score_csv,
    run,
    write_eval_csv,
    write_manifest,
    write_score_csv,
)
from .scoring import Aggregator
from .subgraphs import BOUNDARY_MODES, STRATEGY_NAMES, SubgraphStrategy
from .synth import CliqueInjection, generate_synthetic
from .embedding import DEFAULT_DIM, VALUE_MODES


@click.group()
@click.version_option(version=__version__)
def main():
    """Snapshot anomaly detection over dynamic weighted graph streams."""


def _merge_config_file(ctx, config_path, values: dict) -> dict:
    """Apply config-file values for parameters the user left at default."""
    if config_path is None:
        return values
    with open(config_path, "r", encoding="utf-8") as fh:
        overrides = json.load(fh)
    unknown = set(overrides) - set(values)
    if unknown:
        raise click.UsageError(f"unknown config keys: {sorted(unknown)}")
    merged = dict(values)
    for key, val in overrides.items():
        src = ctx.get_parameter_source(key)
        if src is None or src.name != "COMMANDLINE":
            merged[key] = val
    return merged


def _snapshot_plan(snapshot_events, snapshot_boundaries, warmup) -> SnapshotPlan:
    if snapshot_events is not None and snapshot_boundaries is not None:
        raise click.UsageError(
            "--snapshot-events and --snapshot-boundaries are mutually exclusive"
        )
    if snapshot_boundaries is not None:
        return SnapshotPlan.boundaries_from_file(snapshot_boundaries, warmup)
    if snapshot_events is None:
        raise click.UsageError(
            "one of --snapshot-events or --snapshot-boundaries is required"
        )
    return SnapshotPlan.fixed_event_count(snapshot_events, warmup)


_run_options = [
    click.option("--input", "input_path", required=True, type=click.Path(exists=True)),
    click.option("--weighted/--unweighted", "weighted", default=True),
    click.option("--directed/--undirected", "directed", default=False),
    click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True),
    click.option("--epsilon", type=float, default=DEFAULT_EPSILON, show_default=True),
    click.option("--dim", type=int, default=DEFAULT_DIM, show_default=True),
    click.option(
        "--strategy",
        type=click.Choice(STRATEGY_NAMES),
        default="hybrid-tc",
        show_default=True,
    ),
    click.option(
        "--phi",
        type=click.Choice([a.value for a in Aggregator]),
        default="sum",
        show_default=True,
    ),
    click.option(
        "--f",
        "f_agg",
        type=click.Choice([a.value for a in Aggregator]),
        default="mean",
        show_default=True,
    ),
    click.option(
        "--norm", type=click.Choice(["l1", "l2"]), default="l2", show_default=True
    ),
    click.option("--seeds", default="all", show_default=True),
    click.option("--snapshot-events", type=int, default=None),
    click.option(
        "--snapshot-boundaries", type=click.Path(exists=True), default=None
    ),
    click.option("--warmup", type=int, default=0, show_default=True),
    click.option(
        "--hash-seed", type=int, default=DEFAULT_HASH_SEED, show_default=True
    ),
    click.option(
        "--embed-value",
        type=click.Choice(VALUE_MODES),
        default="log-ratio",
        show_default=True,
    ),
    click.option(
        "--boundary-of",
        type=click.Choice(BOUNDARY_MODES),
        default="strong-plus-seed",
        show_default=True,
    ),
    click.option("--allow-unsorted", is_flag=True, default=False),
    click.option("--min-count", type=int, default=1, show_default=True,
                 help="labeled events needed to mark a snapshot anomalous"),
]


def _apply_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn

    return wrap


@main.command(name="run")
@_apply_options(_run_options)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.pass_context
def run_cmd(ctx, config_path, out_path, **params):
    """Score every snapshot of an event stream."""
    params = _merge_config_file(ctx, config_path, params)
    plan = _snapshot_plan(
        params["snapshot_events"], params["snapshot_boundaries"], params["warmup"]
    )
    result = ingest(
        params["input_path"],
        id_map_path=str(out_path) + ".idmap.tsv",
        plan=plan,
        directed=params["directed"],
        weighted=params["weighted"],
        allow_unsorted=params["allow_unsorted"],
        min_count=params["min_count"],
    )
    config = RunConfig(
        alpha=params["alpha"],
        epsilon=params["epsilon"],
        dim=params["dim"],
        hash_seed=params["hash_seed"],
        strategy=SubgraphStrategy.parse(
            params["strategy"], boundary=params["boundary_of"]
        ),
        phi=Aggregator.parse(params["phi"]),
        f_agg=Aggregator.parse(params["f_agg"]),
        p_norm=1.0 if params["norm"] == "l1" else 2.0,
        seed_policy=SeedPolicy.parse(params["seeds"]),
        weighted=params["weighted"],
        embed_value=params["embed_value"],
    )
    echo = config.echo()
    echo["plan"] = plan.describe()
    echo["warmup"] = plan.warmup_snapshots
    series = run(result.graph, result.snapshots, config, capacity=result.num_nodes)
    write_score_csv(out_path, series, result.truth, echo)
    write_manifest(str(out_path) + ".manifest.json", echo, result.info)
    click.echo(
        f"scored {len(series.scores)} snapshots "
        f"({result.truth.total_anomalies} labeled anomalous) -> {out_path}"
    )


@main.command(name="evaluate")
@click.option("--scores", "scores_path", required=True, type=click.Path(exists=True))
@click.option("--k-list", default=None, help="comma-separated k' values")
@click.option("--out", "out_path", required=True, type=click.Path())
def evaluate_cmd(scores_path, k_list, out_path):
    """Compute top-k' precision/recall/F1 rows from a score CSV."""
    series, truth = read_score_csv(scores_path)
    ks = None
    if k_list:
        ks = [int(x) for x in k_list.split(",") if x.strip()]
    report = evaluate(series, truth, ks)
    write_eval_csv(out_path, report, {"scores": scores_path})
    head = report.headline
    if head is not None:
        click.echo(
            f"k'={head.k_prime}: precision={head.precision:.4f} "
            f"recall={head.recall:.4f} f1={head.f1:.4f}"
        )
    click.echo(f"wrote {len(report.rows)} rows -> {out_path}")


@main.command(name="synth")
@click.option("--nodes", "n", type=int, required=True)
@click.option("--snapshots", "num_snapshots", type=int, required=True)
@click.option("--background-rate", type=int, default=50, show_default=True)
@click.option(
    "--inject",
    "injections",
    multiple=True,
    help="SNAPSHOT:CLIQUE_SIZE[:WEIGHT]; repeatable",
)
@click.option("--rng-seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
def synth_cmd(n, num_snapshots, background_rate, injections, rng_seed, out_path):
    """Generate a synthetic labeled event stream with clique injections."""
    inj = [CliqueInjection.parse(s) for s in injections]
    events, counts = generate_synthetic(
        n,
        num_snapshots,
        background_rate,
        inj,
        rng_seed=rng_seed,
        out_path=out_path,
        boundaries_path=str(out_path) + ".boundaries",
    )
    labeled = sum(1 for e in events if e[4])
    click.echo(
        f"wrote {len(events)} events over {len(counts)} snapshots "
        f"({labeled} labeled anomalous) -> {out_path}"
    )


@main.command(name="calibrate-labels")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--snapshot-events", type=int, default=None)
@click.option("--snapshot-boundaries", type=click.Path(exists=True), default=None)
@click.option("--warmup", type=int, default=0, show_default=True)
@click.option("--target", type=int, required=True, help="desired anomalous snapshots")
@click.option("--allow-unsorted", is_flag=True, default=False)
def calibrate_cmd(
    input_path, snapshot_events, snapshot_boundaries, warmup, target, allow_unsorted
):
    """Sweep the label min-count rule and report the best match."""
    plan = _snapshot_plan(snapshot_events, snapshot_boundaries, warmup)
    result = ingest(input_path, plan=plan, allow_unsorted=allow_unsorted)
    table = calibrate_label_rule(result.snapshots)
    best = min(table, key=lambda row: (abs(row[1] - target), row[0]))
    click.echo("min_count\tanomalous_snapshots")
    for mc, count in table:
        marker = "  <-- closest" if (mc, count) == best else ""
        click.echo(f"{mc}\t{count}{marker}")
    if best[1] == target:
        click.echo(f"min_count={best[0]} hits the target of {target}")
    else:
        click.echo(
            f"no min_count hits {target} exactly; closest is "
            f"min_count={best[0]} with {best[1]}"
        )


@main.command(name="dump-subgraphs")
@click.option("--input", "input_path", required=True, type=click.Path(exists=True))
@click.option("--weighted/--unweighted", "weighted", default=True)
@click.option("--directed/--undirected", "directed", default=False)
@click.option(
    "--strategy", type=click.Choice(STRATEGY_NAMES), default="hybrid-tc",
    show_default=True,
)
@click.option(
    "--boundary-of",
    type=click.Choice(BOUNDARY_MODES),
    default="strong-plus-seed",
    show_default=True,
)
@click.option("--seeds", default="all", show_default=True)
@click.option("--snapshot-events", type=int, default=None)
@click.option("--snapshot-boundaries", type=click.Path(exists=True), default=None)
@click.option("--warmup", type=int, default=0, show_default=True)
@click.option("--allow-unsorted", is_flag=True, default=False)
@click.option("--out", "out_path", required=True, type=click.Path())
def dump_subgraphs_cmd(
    input_path,
    weighted,
    directed,
    strategy,
    boundary_of,
    seeds,
    snapshot_events,
    snapshot_boundaries,
    warmup,
    allow_unsorted,
    out_path,
):
    """Write per-snapshot, per-seed subgraph membership as JSON lines."""
    plan = _snapshot_plan(snapshot_events, snapshot_boundaries, warmup)
    result = ingest(
        input_path,
        plan=plan,
        directed=directed,
        weighted=weighted,
        allow_unsorted=allow_unsorted,
    )
    strat = SubgraphStrategy.parse(strategy, boundary=boundary_of)
    policy = SeedPolicy.parse(seeds)
    count = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for record in dump_subgraphs(
            result.graph, result.snapshots, strat, policy, weighted=weighted
        ):
            fh.write(json.dumps(record, sort_keys=True) + "\n")
            count += 1
    click.echo(f"wrote {count} subgraph records -> {out_path}")


if __name__ == "__main__":
    sys.exit(main())
