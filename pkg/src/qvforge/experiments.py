"""Reproducible experiment pipelines.

Each experiment is driven by one flat JSON config and a root seed; every
random draw comes from a named substream of that seed, so re-running any
stage (or the whole pipeline, or just one circuit on another machine)
reproduces its artifacts byte for byte.  Wall-clock facts go to a
separate metadata file so the scientific outputs stay byte-stable.

Per-circuit work fans out to a bounded process pool (QVF_THREADS or the
``workers`` config field); results are collected in index order, so the
pool size never changes any output.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__, stats
from .circuits import (
    consolidate_blocks,
    model_from_json,
    model_to_json,
    physical_from_json,
    physical_to_json,
)
from .device import DeviceModel, load_device, resolve_device_path
from .qvgen import QvSpec, generate_qv_circuit, ideal_heavy_set, ideal_hop
from .router import (
    RoutingConfig,
    apply_layout,
    build_bip,
    emission_stats,
    route_heuristic,
    solve_bip,
)
from .scheduler import (
    DdPolicy,
    circuit_duration,
    default_dd_policy,
    insert_dd,
    schedule_asap,
    schedule_from_json,
    schedule_to_json,
)
from .simkit import (
    from_device,
    load_noise,
    noise_from_json,
    noise_to_json,
    scale_noise,
    simulate_noisy,
)
from .simkit.noise import NoiseModel


class ConfigError(ValueError):
    pass


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class ExperimentConfig:
    device: str
    out: str
    width: int = 6
    depth: int = 6
    circuits: int = 300
    seed: int = 0
    shots: int = 1000
    # routing
    basis_fidelity: float = 0.99
    k: float = 0.995
    h: int = 1
    mirroring: bool = True
    method: str = "bip"
    entangler: str = "cx"
    time_limit: float = 10.0
    swap_distance: int | None = 2
    consolidate: bool = True
    # scheduling
    dd: bool = True
    dd_min_window_ns: float = 0.0
    # noise: explicit file wins; otherwise built from the device file
    noise: str | None = None
    profile: str = "sp"
    quasistatic_sigma: float = 0.0
    noise_scale: float = 1.0
    workers: int | None = None

    def routing(self) -> RoutingConfig:
        return RoutingConfig(
            k=self.k,
            basis_fidelity=self.basis_fidelity,
            h=self.h,
            time_limit=self.time_limit,
            allow_mirroring=self.mirroring,
            entangler=self.entangler,
            swap_distance=self.swap_distance,
        )

    def spec(self) -> QvSpec:
        return QvSpec(m=self.width, d=self.depth, seed=self.seed)


_BOOL_WORDS = {"true": True, "false": False, "on": True, "off": False}


def _coerce(value: str):
    low = value.lower()
    if low in _BOOL_WORDS:
        return _BOOL_WORDS[low]
    if low in ("null", "none"):
        return None
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def load_config(path: str | Path, overrides: tuple[str, ...] = ()) -> ExperimentConfig:
    """Config JSON plus ``key=value`` override strings."""
    try:
        with open(path) as f:
            data = json.load(f)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        data[key.strip()] = _coerce(value.strip())
    return config_from_dict(data)


def config_from_dict(data: dict) -> ExperimentConfig:
    fields = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(data) - fields
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    for required in ("device", "out"):
        if required not in data:
            raise ConfigError(f"config is missing the {required!r} field")
    try:
        cfg = ExperimentConfig(**data)
        cfg.routing()  # validates routing fields
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc))
    if cfg.circuits < 1:
        raise ConfigError("need at least one circuit")
    if cfg.shots < 1:
        raise ConfigError("need at least one shot")
    if cfg.method not in ("bip", "heuristic"):
        raise ConfigError(f"unknown routing method {cfg.method!r}")
    try:
        device_path = resolve_device_path(cfg.device)
    except Exception as exc:
        raise ConfigError(str(exc))
    cfg = dataclasses.replace(cfg, device=str(device_path))
    if cfg.noise is not None and not Path(cfg.noise).exists():
        raise ConfigError(f"noise file {cfg.noise} does not exist")
    return cfg


def resolve_noise(cfg: ExperimentConfig, device: DeviceModel) -> NoiseModel:
    from .gates import GateKind

    if cfg.noise is not None:
        noise = load_noise(cfg.noise)
    else:
        kind = GateKind.ECR if cfg.entangler == "ecr" else GateKind.CX
        noise = from_device(
            device,
            profile=cfg.profile,
            quasistatic_sigma=cfg.quasistatic_sigma,
            entangler_kind=kind,
        )
    if cfg.noise_scale != 1.0:
        noise = scale_noise(noise, cfg.noise_scale)
    return noise


def resolve_dd_policy(cfg: ExperimentConfig, device: DeviceModel) -> DdPolicy:
    policy = default_dd_policy(device, enabled=cfg.dd)
    if cfg.dd_min_window_ns > 0:
        policy = dataclasses.replace(
            policy, min_window_ps=int(round(cfg.dd_min_window_ns * 1000))
        )
    return policy


def worker_count(cfg: ExperimentConfig) -> int:
    if cfg.workers is not None:
        return max(1, cfg.workers)
    env = os.environ.get("QVF_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"QVF_THREADS={env!r} is not an integer")
    return min(os.cpu_count() or 1, 8)


def _pool_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (workers * 4))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _write_json(path: Path, data) -> None:
    with open(path, "w") as f:
        json.dump(data, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def _read_json(path: Path):
    with open(path) as f:
        return json.load(f)


# ---------------------------------------------------------------------------
# Stage: generate


def _gen_one(args) -> dict:
    index, spec_tuple = args
    spec = QvSpec(*spec_tuple)
    circuit = generate_qv_circuit(spec, index)
    return {
        "index": index,
        "circuit": model_to_json(circuit),
        "heavy": sorted(ideal_heavy_set(circuit)),
        "ideal_hop": ideal_hop(circuit),
    }


def stage_gen(cfg: ExperimentConfig, out_dir: Path) -> dict:
    """Write model circuits plus the manifest (heavy sets, seeds, version)."""
    circuits_dir = out_dir / "circuits"
    circuits_dir.mkdir(parents=True, exist_ok=True)
    spec = cfg.spec()
    spec_tuple = (spec.m, spec.d, spec.seed)
    rows = _pool_map(
        _gen_one,
        [(i, spec_tuple) for i in range(cfg.circuits)],
        worker_count(cfg),
    )
    entries = []
    for row in rows:
        name = f"circuit_{row['index']:04d}.json"
        _write_json(circuits_dir / name, row["circuit"])
        entries.append(
            {
                "index": row["index"],
                "file": f"circuits/{name}",
                "heavy": row["heavy"],
                "ideal_hop": row["ideal_hop"],
            }
        )
    manifest = {
        "version": __version__,
        "width": cfg.width,
        "depth": cfg.depth,
        "seed": cfg.seed,
        "count": cfg.circuits,
        "circuits": entries,
    }
    _write_json(out_dir / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# Stage: transpile


@lru_cache(maxsize=8)
def _device_cached(path: str) -> DeviceModel:
    return load_device(path)


def _route_one(args) -> dict:
    index, circuit_json, device_path, routing_kw, method, consolidate = args
    device = _device_cached(device_path)
    rcfg = RoutingConfig(**routing_kw)
    circuit = model_from_json(circuit_json)
    if consolidate:
        circuit = consolidate_blocks(circuit)
    if method == "bip":
        sol = solve_bip(build_bip(circuit, device, rcfg))
    else:
        sol = route_heuristic(circuit, device, rcfg)
    physical = apply_layout(circuit, sol, device, rcfg)
    em = emission_stats(physical)
    return {
        "index": index,
        "physical": physical_to_json(physical),
        "swaps": sol.swap_count,
        "entanglers": em.entangler_count,
        "sq_pulses": em.sq_pulse_count,
        "log_cost": sol.log_cost,
        "optimal": sol.optimal,
        "solve_seconds": sol.solve_seconds,
        "method": sol.method,
    }


# solve_seconds is wall clock, so it stays out of the CSV (artifacts must
# be byte-stable across re-runs); aggregates land in meta.json instead.
_ROUTING_CSV_FIELDS = (
    "index",
    "method",
    "swaps",
    "entanglers",
    "sq_pulses",
    "log_cost",
    "optimal",
)


def _write_routing_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(_ROUTING_CSV_FIELDS)
        for r in rows:
            w.writerow([r[k] for k in _ROUTING_CSV_FIELDS])


def stage_transpile(cfg: ExperimentConfig, run_dir: Path, manifest: dict) -> list[dict]:
    physical_dir = run_dir / "physical"
    physical_dir.mkdir(parents=True, exist_ok=True)
    routing_kw = dataclasses.asdict(cfg.routing())
    tasks = []
    for entry in manifest["circuits"]:
        circuit_json = _read_json(run_dir / entry["file"])
        tasks.append(
            (entry["index"], circuit_json, cfg.device, routing_kw, cfg.method, cfg.consolidate)
        )
    rows = _pool_map(_route_one, tasks, worker_count(cfg))
    for row in rows:
        _write_json(physical_dir / f"circuit_{row['index']:04d}.json", row.pop("physical"))
    _write_routing_csv(rows, run_dir / "routing_report.csv")
    return rows


# ---------------------------------------------------------------------------
# Stage: schedule


def _schedule_one(args) -> dict:
    index, physical_json, device_path, dd_kw = args
    device = _device_cached(device_path)
    physical = physical_from_json(physical_json)
    s = schedule_asap(physical, device)
    policy = DdPolicy(**dd_kw)
    if policy.enabled:
        s = insert_dd(s, policy)
    return {
        "index": index,
        "schedule": schedule_to_json(s),
        "duration_ns": circuit_duration(s),
    }


def stage_schedule(cfg: ExperimentConfig, run_dir: Path, manifest: dict) -> list[dict]:
    schedules_dir = run_dir / "schedules"
    schedules_dir.mkdir(parents=True, exist_ok=True)
    device = _device_cached(cfg.device)
    dd_kw = dataclasses.asdict(resolve_dd_policy(cfg, device))
    tasks = []
    for entry in manifest["circuits"]:
        physical_json = _read_json(run_dir / "physical" / f"circuit_{entry['index']:04d}.json")
        tasks.append((entry["index"], physical_json, cfg.device, dd_kw))
    rows = _pool_map(_schedule_one, tasks, worker_count(cfg))
    for row in rows:
        _write_json(schedules_dir / f"circuit_{row['index']:04d}.json", row.pop("schedule"))
    return rows


# ---------------------------------------------------------------------------
# Stage: simulate


def _simulate_one(args) -> dict:
    index, schedule_json, noise_json, shots, seed, heavy = args
    s = schedule_from_json(schedule_json)
    noise = noise_from_json(noise_json)
    counts = simulate_noisy(s, noise, shots, seed, stream_index=index)
    return {
        "index": index,
        "counts": counts.counts,
        "hop": stats.hop_of_counts(counts, set(heavy)),
    }


def stage_simulate(cfg: ExperimentConfig, run_dir: Path, manifest: dict) -> dict:
    device = _device_cached(cfg.device)
    noise_json = noise_to_json(resolve_noise(cfg, device))
    tasks = []
    for entry in manifest["circuits"]:
        schedule_json = _read_json(run_dir / "schedules" / f"circuit_{entry['index']:04d}.json")
        tasks.append(
            (entry["index"], schedule_json, noise_json, cfg.shots, cfg.seed, entry["heavy"])
        )
    rows = _pool_map(_simulate_one, tasks, worker_count(cfg))
    results = {
        "version": __version__,
        "seed": cfg.seed,
        "shots": cfg.shots,
        "circuits": [
            {"index": r["index"], "hop": r["hop"], "counts": r["counts"]} for r in rows
        ],
    }
    _write_json(run_dir / "results.json", results)
    return results


# ---------------------------------------------------------------------------
# Stage: report


def build_report(results: dict) -> dict:
    hops = [c["hop"] for c in results["circuits"]]
    agg = stats.aggregate(hops)
    return {
        "version": results.get("version", __version__),
        "seed": results.get("seed"),
        "shots": results.get("shots"),
        "stats": stats.stats_to_json(agg),
        "hops": hops,
    }


def stage_report(results: dict, run_dir: Path) -> dict:
    report = build_report(results)
    _write_json(run_dir / "report.json", report)
    trace = stats.cumulative_trace(report["hops"])
    stats.write_trace_csv(trace, run_dir / "trace.csv")
    return report


# ---------------------------------------------------------------------------
# End-to-end experiments


def _staged(stage: str, fn, *args):
    try:
        return fn(*args)
    except Exception as exc:  # noqa: BLE001 - stage label then re-raise
        raise StageError(stage, exc) from exc


def run_qv(cfg: ExperimentConfig) -> dict:
    """gen -> transpile -> schedule -> simulate -> report, one directory."""
    run_dir = Path(cfg.out)
    run_dir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    last = t0
    timing = {}

    def tick(name):
        nonlocal last
        now = time.time()
        timing[name] = round(now - last, 3)
        last = now

    manifest = _staged("gen", stage_gen, cfg, run_dir)
    tick("gen_seconds")
    route_rows = _staged("transpile", stage_transpile, cfg, run_dir, manifest)
    tick("transpile_seconds")
    _staged("schedule", stage_schedule, cfg, run_dir, manifest)
    tick("schedule_seconds")
    results = _staged("simulate", stage_simulate, cfg, run_dir, manifest)
    tick("simulate_seconds")
    report = _staged("report", stage_report, results, run_dir)
    timing["total_seconds"] = round(time.time() - t0, 3)
    solve = [r["solve_seconds"] for r in route_rows]
    meta = {
        "timing": timing,
        "routing": {
            "mean_solve_seconds": round(float(np.mean(solve)), 4),
            "max_solve_seconds": round(float(np.max(solve)), 4),
        },
    }
    _write_json(run_dir / "meta.json", meta)
    return report


def run_dd_ab(cfg: ExperimentConfig) -> dict:
    """Same circuits and noise simulated with and without decoupling.

    Per-shot reset flips and static detunings are drawn before the first
    schedule step, so the paired arms see identical noise realizations
    shot for shot; only the schedules differ."""
    run_dir = Path(cfg.out)
    run_dir.mkdir(parents=True, exist_ok=True)
    device = _device_cached(cfg.device)
    noise_json = noise_to_json(resolve_noise(cfg, device))
    workers = worker_count(cfg)

    manifest = _staged("gen", stage_gen, cfg, run_dir)
    _staged("transpile", stage_transpile, cfg, run_dir, manifest)

    policy_on = resolve_dd_policy(dataclasses.replace(cfg, dd=True), device)
    dd_on = dataclasses.asdict(policy_on)
    dd_off = dataclasses.asdict(dataclasses.replace(policy_on, enabled=False))

    arms = {}
    for arm, dd_kw in (("idle", dd_off), ("dd", dd_on)):
        tasks = []
        for entry in manifest["circuits"]:
            physical_json = _read_json(
                run_dir / "physical" / f"circuit_{entry['index']:04d}.json"
            )
            tasks.append((entry["index"], physical_json, cfg.device, dd_kw))
        scheds = _staged(f"schedule[{arm}]", _pool_map, _schedule_one, tasks, workers)
        sim_tasks = [
            (
                entry["index"],
                srow["schedule"],
                noise_json,
                cfg.shots,
                cfg.seed,
                entry["heavy"],
            )
            for entry, srow in zip(manifest["circuits"], scheds)
        ]
        rows = _staged(f"simulate[{arm}]", _pool_map, _simulate_one, sim_tasks, workers)
        arms[arm] = [r["hop"] for r in rows]

    idle = np.array(arms["idle"])
    dd = np.array(arms["dd"])
    diff = dd - idle
    n = diff.size
    stderr = float(diff.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    report = {
        "version": __version__,
        "seed": cfg.seed,
        "shots": cfg.shots,
        "n_c": n,
        "pairs": [
            {"index": i, "hop_idle": float(a), "hop_dd": float(b)}
            for i, (a, b) in enumerate(zip(idle, dd))
        ],
        "fraction_improved": float(np.mean(diff > 0)),
        "mean_increase": float(diff.mean()),
        "stderr_increase": stderr,
        "mean_hop_idle": float(idle.mean()),
        "mean_hop_dd": float(dd.mean()),
    }
    _write_json(run_dir / "dd_ab.json", report)
    return report


def run_router_ab(cfg: ExperimentConfig) -> dict:
    """Exact vs heuristic routing, and entangler-target duration comparison.

    Routes the same circuits three ways: exact solver targeting the
    config entangler, the lookahead heuristic on the same target, and the
    exact solver targeting the other entangler kind.  Reports gate-count
    distributions (exact vs heuristic) and mean scheduled durations
    (CX-target vs ECR-target)."""
    run_dir = Path(cfg.out)
    run_dir.mkdir(parents=True, exist_ok=True)
    workers = worker_count(cfg)
    device = _device_cached(cfg.device)
    dd_kw_sched = dataclasses.asdict(resolve_dd_policy(cfg, device))
    manifest = _staged("gen", stage_gen, cfg, run_dir)

    other = "ecr" if cfg.entangler == "cx" else "cx"
    routing_kw = dataclasses.asdict(cfg.routing())
    routing_other = dict(routing_kw, entangler=other)

    def route_tasks(kw, method):
        tasks = []
        for entry in manifest["circuits"]:
            circuit_json = _read_json(run_dir / entry["file"])
            tasks.append(
                (entry["index"], circuit_json, cfg.device, kw, method, cfg.consolidate)
            )
        return tasks

    arms = {}
    for name, kw, method in (
        ("bip", routing_kw, "bip"),
        ("heuristic", routing_kw, "heuristic"),
        (f"bip_{other}", routing_other, "bip"),
    ):
        rows = _staged(f"route[{name}]", _pool_map, _route_one, route_tasks(kw, method), workers)
        sched_tasks = [
            (r["index"], r["physical"], cfg.device, dd_kw_sched) for r in rows
        ]
        scheds = _staged(
            f"schedule[{name}]", _pool_map, _schedule_one, sched_tasks, workers
        )
        arms[name] = {
            "entanglers": [r["entanglers"] for r in rows],
            "sq_pulses": [r["sq_pulses"] for r in rows],
            "swaps": [r["swaps"] for r in rows],
            "log_cost": [r["log_cost"] for r in rows],
            "duration_ns": [s["duration_ns"] for s in scheds],
        }

    def summary(a):
        return {
            "mean_entanglers": float(np.mean(a["entanglers"])),
            "max_entanglers": int(np.max(a["entanglers"])),
            "mean_sq_pulses": float(np.mean(a["sq_pulses"])),
            "mean_swaps": float(np.mean(a["swaps"])),
            "mean_duration_ns": float(np.mean(a["duration_ns"])),
        }

    base = summary(arms["bip"])
    alt = summary(arms[f"bip_{other}"])
    if cfg.entangler == "cx":
        cx_d, ecr_d = base["mean_duration_ns"], alt["mean_duration_ns"]
    else:
        cx_d, ecr_d = alt["mean_duration_ns"], base["mean_duration_ns"]
    report = {
        "version": __version__,
        "seed": cfg.seed,
        "n_c": cfg.circuits,
        "bip": base,
        "heuristic": summary(arms["heuristic"]),
        f"bip_{other}": alt,
        "cost_dominance_fraction": float(
            np.mean(
                np.array(arms["bip"]["log_cost"])
                >= np.array(arms["heuristic"]["log_cost"]) - 1e-9
            )
        ),
        "ecr_duration_reduction": float((cx_d - ecr_d) / cx_d),
        "per_circuit": {name: dict(a) for name, a in arms.items()},
    }
    _write_json(run_dir / "router_ab.json", report)
    return report
