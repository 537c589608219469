"""Command-line front end.

One JSON config drives every experiment; ``--set key=value`` overrides
individual fields without editing the file.  Exit codes are CI-friendly:
0 success, 2 bad config, 3 a pipeline stage failed, 4 the volume test
ran fine but did not pass.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__, experiments, stats
from .experiments import ConfigError, StageError

EXIT_CONFIG = 2
EXIT_STAGE = 3
EXIT_FAILED = 4


def _load(config, sets) -> experiments.ExperimentConfig:
    try:
        return experiments.load_config(config, tuple(sets))
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)


def _run(fn, *args):
    try:
        return fn(*args)
    except StageError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_STAGE)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except Exception as exc:  # noqa: BLE001 - any other failure is a stage failure
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_STAGE)


def _config_options(fn):
    fn = click.option(
        "--set",
        "sets",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override a config field (repeatable).",
    )(fn)
    fn = click.option(
        "--config",
        "-c",
        required=True,
        type=click.Path(exists=True, dir_okay=False),
        help="Experiment config JSON.",
    )(fn)
    return fn


def _manifest(cfg) -> dict:
    path = Path(cfg.out) / "manifest.json"
    if not path.exists():
        click.echo(f"error: {path} not found; run `gen` first", err=True)
        sys.exit(EXIT_STAGE)
    return experiments._read_json(path)


@click.group()
@click.version_option(version=__version__, prog_name="qvforge")
def main() -> None:
    """Quantum-volume circuit pipeline: generate, route, schedule, simulate."""


@main.command()
@_config_options
def gen(config, sets):
    """Generate model circuits and the run manifest."""
    cfg = _load(config, sets)
    manifest = _run(experiments.stage_gen, cfg, Path(cfg.out))
    click.echo(f"generated {manifest['count']} circuits in {cfg.out}")


@main.command()
@_config_options
def transpile(config, sets):
    """Lay out and route the generated circuits onto the device."""
    cfg = _load(config, sets)
    rows = _run(experiments.stage_transpile, cfg, Path(cfg.out), _manifest(cfg))
    swaps = sum(r["swaps"] for r in rows) / len(rows)
    click.echo(f"routed {len(rows)} circuits (mean swaps {swaps:.2f})")


@main.command()
@_config_options
def schedule(config, sets):
    """Time-resolve the routed circuits and insert decoupling pulses."""
    cfg = _load(config, sets)
    rows = _run(experiments.stage_schedule, cfg, Path(cfg.out), _manifest(cfg))
    mean_ns = sum(r["duration_ns"] for r in rows) / len(rows)
    click.echo(f"scheduled {len(rows)} circuits (mean duration {mean_ns:.1f} ns)")


@main.command()
@_config_options
def simulate(config, sets):
    """Run noisy trajectory simulations of the scheduled circuits."""
    cfg = _load(config, sets)
    results = _run(experiments.stage_simulate, cfg, Path(cfg.out), _manifest(cfg))
    hops = [c["hop"] for c in results["circuits"]]
    click.echo(f"simulated {len(hops)} circuits (mean hop {sum(hops)/len(hops):.4f})")


@main.command()
@click.option(
    "--results",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="results.json from the simulate stage.",
)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--trace-csv", type=click.Path(dir_okay=False))
def report(results, out, trace_csv):
    """Aggregate per-circuit heavy-output rates into a pass/fail report."""

    def build():
        data = experiments._read_json(Path(results))
        rep = experiments.build_report(data)
        experiments._write_json(Path(out), rep)
        if trace_csv:
            trace = stats.cumulative_trace(rep["hops"])
            stats.write_trace_csv(trace, trace_csv)
        return rep

    rep = _run(build)
    click.echo(_verdict_line(rep["stats"]))
    if not rep["stats"]["passed"]:
        sys.exit(EXIT_FAILED)


def _verdict_line(s: dict) -> str:
    z = s["z"]
    z_text = f"{z:.4f}" if z is not None else "inf"
    return (
        f"n_c={s['n_c']} h_mean={s['h_mean']:.4f} sigma={s['sigma']:.5f} "
        f"z={z_text} confidence={s['confidence']:.3f}% passed={s['passed']}"
    )


@main.command()
@_config_options
def qv(config, sets):
    """Full pipeline: gen, transpile, schedule, simulate, report."""
    cfg = _load(config, sets)
    rep = _run(experiments.run_qv, cfg)
    click.echo(_verdict_line(rep["stats"]))
    if not rep["stats"]["passed"]:
        sys.exit(EXIT_FAILED)


@main.command("dd-ab")
@_config_options
def dd_ab(config, sets):
    """Paired comparison: identical circuits and noise, with and without
    decoupling pulses."""
    cfg = _load(config, sets)
    rep = _run(experiments.run_dd_ab, cfg)
    click.echo(
        f"n_c={rep['n_c']} fraction_improved={rep['fraction_improved']:.3f} "
        f"mean_increase={rep['mean_increase']:+.4f} "
        f"stderr={rep['stderr_increase']:.4f}"
    )


@main.command("router-ab")
@_config_options
def router_ab(config, sets):
    """Paired comparison: exact vs greedy routing, and entangler targets."""
    cfg = _load(config, sets)
    rep = _run(experiments.run_router_ab, cfg)
    b, h = rep["bip"], rep["heuristic"]
    click.echo(
        f"exact: mean_entanglers={b['mean_entanglers']:.2f} "
        f"max={b['max_entanglers']} duration={b['mean_duration_ns']:.1f}ns"
    )
    click.echo(
        f"greedy: mean_entanglers={h['mean_entanglers']:.2f} "
        f"max={h['max_entanglers']} duration={h['mean_duration_ns']:.1f}ns"
    )
    click.echo(
        f"ecr_duration_reduction={rep['ecr_duration_reduction']:.4f} "
        f"cost_dominance={rep['cost_dominance_fraction']:.3f}"
    )


if __name__ == "__main__":
    main()
