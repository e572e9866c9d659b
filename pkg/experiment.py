# Codes By Visionnn

"""
burstscale Experiment Flows
Orchestrates the four subcommands:
  train   train and save predictors for every SLO
  run     sweep (SLO, mode) cells and write a JSON Lines report
  stats   summarise a trace
  oracle  compare the greedy bucket packer with the exact MILP
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import yaml
from rich.progress import Progress, SpinnerColumn, TextColumn

from audit import run_audits
from cli import (
    COLOR_PRIMARY,
    console,
    print_frontier_summary,
    print_info,
    print_oracle_result,
    print_report_card,
    print_results_table,
    print_section,
    print_success,
    print_threshold_summary,
    print_trace_stats,
    print_warning,
)
from config import NS_PER_US
from errors import BurstscaleError, ConfigError
from fingerprint import chain_hash
from logger import log
from metrics import Metrics
from predictor import Predictors, RateThresholdTable, analytic_predictors, train_long_term, train_short_term
from predictor_store import load_frontier, load_thresholds, save_frontier, save_thresholds
from report_store import append_records, unique_report_path
from server_mapper import BucketStats, CoreMapping, milp_exact, remap_greedy
from settings import ExperimentConfig, config_hash, sweep
from simulator import SimParams, mode_profile, probe_rate, profile_epochs, run_mode
from traffic import PacketRecord, TraceStats, compute_stats, generate, parse_trace


def _spinner() -> Progress:
    return Progress(
        SpinnerColumn(spinner_name="dots", style=f"bold {COLOR_PRIMARY}"),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,
    )


# ─── Inputs ───────────────────────────────────────────────────────────────────

def build_trace(config: ExperimentConfig) -> List[PacketRecord]:
    """The configured trace file, or the generated workload."""
    if config.workload.trace is not None:
        return parse_trace(Path(config.workload.trace).expanduser())
    return generate(config.workload.to_spec(config.seed))


def load_predictors(config: ExperimentConfig, slo_ns: int) -> Predictors:
    chain = config.chain.to_chain()
    if config.predictors.source == "analytic":
        return analytic_predictors(
            chain, slo_ns, config.core_mapper.max_split, config.training.flow_grid, config.core_mapper.plan_overhead_ns
        )
    directory = Path(config.predictors.dir).expanduser()
    expected = chain_hash(chain)
    return Predictors(
        load_frontier(slo_ns, directory, expected),
        load_thresholds(slo_ns, directory, expected),
    )


# ─── train ────────────────────────────────────────────────────────────────────

def cmd_train(config: ExperimentConfig) -> List[Path]:
    """Train and save a frontier family and a threshold table per SLO."""
    print_section("Train Predictors")
    chain = config.chain.to_chain()
    params = SimParams.from_config(config)
    training = config.training
    directory = Path(config.predictors.dir).expanduser()

    workload_cfg = config.workload
    if training.workload_duration_s is not None and workload_cfg.trace is None:
        workload_cfg = replace(workload_cfg, duration_s=training.workload_duration_s)
    workload = build_trace(replace(config, workload=workload_cfg))
    print_info(f"Training workload: {len(workload):,} packets")

    written: List[Path] = []
    for slo_ns in config.slos_ns:
        slo_us = slo_ns / NS_PER_US

        def profile(scheme, trace):
            return profile_epochs(chain, slo_ns, scheme, trace, params)

        def probe(flows, rate, seed):
            return probe_rate(chain, slo_ns, flows, rate, training.probe_duration_s, seed, params)

        with _spinner() as progress:
            progress.add_task(f"Profiling epochs at SLO {slo_us:g} µs...", total=None)
            family = train_short_term(
                profile, chain, slo_ns, workload,
                config.core_mapper.max_split, training.flow_grid, training.max_probe_flows,
            )
        with _spinner() as progress:
            progress.add_task(f"Searching rate thresholds at SLO {slo_us:g} µs...", total=None)
            table = train_long_term(probe, chain, slo_ns, training.flow_grid, training.resolution, config.seed)

        written.append(save_frontier(family, directory))
        written.append(save_thresholds(table, directory))
        log.info(f"TRAIN | slo_us={slo_us:g} levels={len(family.frontiers)} T1={table.rates[0]:.0f}")

        print_frontier_summary(family)
        print_threshold_summary(table)
        if not any(table.rates):
            print_warning(f"Every threshold is 0 at SLO {slo_us:g} µs; the chain cannot meet it")

    print_success(f"Wrote {len(written)} predictor files to {directory}")
    return written


# ─── run ──────────────────────────────────────────────────────────────────────

def _cell_header(config: ExperimentConfig, digest: str, slo_us: float, mode: str) -> Dict[str, object]:
    return {"config_hash": digest, "seed": config.seed, "slo_us": slo_us, "mode": mode}


def run_cell(
    config: ExperimentConfig,
    slo_us: float,
    mode: str,
    trace: Optional[Sequence[PacketRecord]] = None,
) -> List[Dict[str, object]]:
    """
    Simulate one cell. Failures become a single error record so the rest of
    the sweep keeps going.
    """
    header = _cell_header(config, config_hash(config), slo_us, mode)
    try:
        if trace is None:
            trace = build_trace(config)
        slo_ns = int(round(slo_us * NS_PER_US))
        predictors = load_predictors(config, slo_ns) if mode_profile(mode).needs_predictors else None
        metrics: Metrics = run_mode(config, trace, mode, predictors, slo_ns)
        ok, reason = run_audits(metrics)
    except BurstscaleError as e:
        log.exception(f"RUN | cell slo_us={slo_us:g} mode={mode} failed: {e}")
        return [{"type": "error", **header, "error": str(e), "exit_code": e.exit_code}]

    records = []
    for record in metrics.records(config.output.verbose):
        records.append({**record, **header})
    records[0]["audit"] = "ok" if ok else reason
    summary = records[0]
    log.info(f"RUN | mode={mode} slo_us={slo_us:g} p99_us={summary['p99_us']} avg_cores={summary['avg_cores']:.2f}")
    return records


def cmd_run(config: ExperimentConfig) -> Path:
    """Run every (SLO, mode) cell and write the report. Returns its path."""
    print_section("Run Experiments")
    cells = sweep(config)
    if not cells:
        raise ConfigError("empty sweep: need at least one SLO and one mode")

    jobs = config.output.jobs
    path = unique_report_path(config.output.name, Path(config.output.dir).expanduser())
    print_info(f"{len(cells)} cell(s), {jobs} job(s), report {path.name}")

    results: List[List[Dict[str, object]]] = []
    with _spinner() as progress:
        task = progress.add_task("Simulating...", total=None)
        if jobs == 1:
            trace = build_trace(config)
            for slo_us, mode in cells:
                progress.update(task, description=f"Simulating {mode} at SLO {slo_us:g} µs...")
                results.append(run_cell(config, slo_us, mode, trace))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(run_cell, config, slo_us, mode) for slo_us, mode in cells]
                results = [future.result() for future in futures]

    rows = []
    for records in results:
        append_records(path, records)
        rows.append(records[0])
    failed = sum(1 for row in rows if row["type"] == "error")

    print_results_table(rows)
    print_report_card(path, len(cells), failed)
    log.info(f"RUN | sweep done cells={len(cells)} failed={failed} report={path}")
    return path


# ─── stats ────────────────────────────────────────────────────────────────────

def cmd_stats(config: Optional[ExperimentConfig] = None, trace_path: Optional[Path] = None) -> TraceStats:
    print_section("Trace Statistics")
    if trace_path is not None:
        trace = parse_trace(Path(trace_path).expanduser())
        source = str(trace_path)
    else:
        config = config or ExperimentConfig()
        trace = build_trace(config)
        source = config.workload.trace or f"generated (seed {config.seed})"
    stats = compute_stats(trace)
    print_trace_stats(stats, source)
    return stats


# ─── oracle ───────────────────────────────────────────────────────────────────

def _load_instance(path: Path) -> Dict[str, object]:
    try:
        raw = yaml.safe_load(Path(path).expanduser().read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"cannot read oracle instance {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid oracle instance {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"oracle instance {path} must be a mapping")
    missing = [k for k in ("rates", "flows", "grid", "thresholds", "cores") if k not in raw]
    if missing:
        raise ConfigError(f"oracle instance {path} is missing: {', '.join(missing)}")
    return raw


def cmd_oracle(instance_path: Path) -> Dict[str, object]:
    """Exact vs greedy bucket packing on a small instance file."""
    print_section("Packing Oracle")
    raw = _load_instance(instance_path)
    try:
        stats = BucketStats(tuple(raw["rates"]), tuple(raw["flows"]))
    except ValueError as e:
        raise ConfigError(f"oracle instance: {e}") from e
    table = RateThresholdTable("oracle", 0, tuple(raw["grid"]), tuple(raw["thresholds"]))
    cores = int(raw["cores"])
    if cores < 1:
        raise ConfigError(f"oracle instance needs at least one core, got {cores}")

    with _spinner() as progress:
        progress.add_task("Solving MILP...", total=None)
        exact = milp_exact(stats, table, cores)
    start = CoreMapping.spread(stats.buckets, cores, 1)
    greedy = remap_greedy(stats, start, table)
    greedy_cores = len(greedy.mapping.active_cores())

    lines = [
        f"core {core}: buckets {exact.mapping.buckets_of(core)}"
        for core in exact.mapping.active_cores()
    ]
    print_oracle_result(exact.cores, greedy_cores, greedy.feasible, lines)
    return {"exact": exact.cores, "greedy": greedy_cores, "greedy_feasible": greedy.feasible}
