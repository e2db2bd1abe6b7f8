"""Replication batches, cross-replication statistics, and sensitivity sweeps.

A batch runs n replications of one scenario, each with a seed derived
injectively from (base_seed, index), and reduces them to per-metric
{mean, median, std}.  The three sweeps vary cost multipliers, mandated
capture duration, and the supply share of revenue; every sweep point
reuses the same per-replication seeds so differences are attributable to
the parameter, not sampling noise.  Fan-out may run in a process pool;
results are gathered by index, so completion order never affects output.
"""

from __future__ import annotations

import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

from . import dataio
from .engine import ReplicationResult, Stats, run_replication
from .rng import replication_seed
from .scenario import ScenarioConfig
from .types import LINE_HAUL_MODES, Mode

#: The registered cost-sweep targets, in output order.
COST_TARGETS = ("capture", "storage", "pipeline", "rail", "water",
                "all_transport")

#: The distance metrics summarized across replications.
_DISTANCE_METRICS = ("mean", "median", "std")


@dataclass(frozen=True)
class SummaryStats:
    """Per-metric statistics across the replications of one batch."""

    total_tonnes: Stats
    tonnes_by_mode: dict[Mode, Stats]
    mode_shares: dict[Mode, Stats]
    #: Stats across replications of each per-replication distance statistic,
    #: keyed by the inner statistic name ("mean", "median", "std").
    total_distance: dict[str, Stats]
    ac_distance: dict[str, Stats]
    profit_per_tonne: Stats
    n_replications: int


def summarize(results: Sequence[ReplicationResult]) -> SummaryStats:
    """Reduce a batch of replication results to SummaryStats."""
    if not results:
        raise ValueError("cannot summarize an empty batch")
    return SummaryStats(
        total_tonnes=Stats.of([r.total_tonnes for r in results]),
        tonnes_by_mode={
            m: Stats.of([r.tonnes_by_mode.get(m, 0.0) for r in results])
            for m in LINE_HAUL_MODES},
        mode_shares={
            m: Stats.of([r.mode_shares.get(m, 0.0) for r in results])
            for m in LINE_HAUL_MODES},
        total_distance={
            k: Stats.of([getattr(r.total_distance_stats, k) for r in results])
            for k in _DISTANCE_METRICS},
        ac_distance={
            k: Stats.of([getattr(r.ac_distance_stats, k) for r in results])
            for k in _DISTANCE_METRICS},
        profit_per_tonne=Stats.of([r.profit_per_tonne for r in results]),
        n_replications=len(results))


@dataclass(frozen=True)
class SweepResult:
    """One sensitivity axis: (parameter value, batch summary) per point.

    ``totals`` additionally keeps each point's per-replication total
    tonnes (same replication order at every point), which is what the
    pointwise-per-seed monotonicity checks consume.
    """

    axis: str
    points: tuple[tuple[float, SummaryStats], ...]
    totals: tuple[tuple[float, ...], ...] = ()

    def __post_init__(self):
        values = [v for v, _ in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(
                f"sweep values must be strictly increasing, got {values}")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.points)


# ---------------------------------------------------------------------------
# Parallel fan-out

_POOL_INPUTS: Optional[dataio.SimulationInputs] = None


def _pool_init(cfg: ScenarioConfig) -> None:
    global _POOL_INPUTS
    _POOL_INPUTS = dataio.load_inputs(cfg)


def _pool_run(task: tuple[int, ScenarioConfig]) -> tuple[int, ReplicationResult]:
    index, cfg = task
    return index, run_replication(cfg, _POOL_INPUTS)


def _run_tasks(base_cfg: ScenarioConfig,
               tasks: Sequence[tuple[int, ScenarioConfig]],
               jobs: int,
               inputs: Optional[dataio.SimulationInputs]) -> list[ReplicationResult]:
    """Run (index, cfg) tasks, returning results ordered by index."""
    out: dict[int, ReplicationResult] = {}
    if jobs <= 1 or len(tasks) <= 1:
        if inputs is None:
            inputs = dataio.load_inputs(base_cfg)
        for index, cfg in tasks:
            out[index] = run_replication(cfg, inputs)
    else:
        workers = min(jobs, len(tasks))
        with ProcessPoolExecutor(max_workers=workers,
                                 initializer=_pool_init,
                                 initargs=(base_cfg,)) as pool:
            for index, result in pool.map(_pool_run, tasks):
                out[index] = result
    return [out[i] for i in sorted(out)]


def _batch_seeds(base_seed: int, n: int) -> list[int]:
    seeds = [replication_seed(base_seed, i) for i in range(n)]
    if len(set(seeds)) != n:
        raise RuntimeError(f"replication seed collision for base {base_seed}")
    return seeds


def run_replications(cfg: ScenarioConfig, n: int,
                     base_seed: Optional[int] = None, *,
                     jobs: int = 1,
                     inputs: Optional[dataio.SimulationInputs] = None,
                     ) -> tuple[SummaryStats, list[ReplicationResult]]:
    """Run n replications with seeds derived from (base_seed, index)."""
    if n < 1:
        raise ValueError(f"need at least one replication, got {n}")
    base = cfg.seed if base_seed is None else base_seed
    tasks = [(i, replace(cfg, seed=s))
             for i, s in enumerate(_batch_seeds(base, n))]
    results = _run_tasks(cfg, tasks, jobs, inputs)
    return summarize(results), results


# ---------------------------------------------------------------------------
# Sweeps


def _sweep(cfg: ScenarioConfig, axis: str,
           variants: Sequence[tuple[float, ScenarioConfig]],
           n: int, base_seed: Optional[int], jobs: int,
           inputs: Optional[dataio.SimulationInputs]) -> SweepResult:
    base = cfg.seed if base_seed is None else base_seed
    seeds = _batch_seeds(base, n)
    tasks = []
    for p, (_, variant) in enumerate(variants):
        for r, seed in enumerate(seeds):
            tasks.append((p * n + r, replace(variant, seed=seed)))
    results = _run_tasks(cfg, tasks, jobs, inputs)
    points = []
    totals = []
    for p, (value, _) in enumerate(variants):
        batch = results[p * n:(p + 1) * n]
        points.append((value, summarize(batch)))
        totals.append(tuple(r.total_tonnes for r in batch))
    return SweepResult(axis=axis, points=tuple(points), totals=tuple(totals))


def default_multiplier_grid() -> tuple[float, ...]:
    """0.2 through 2.0 in steps of 0.2."""
    return tuple(i / 5 for i in range(1, 11))


def sweep_cost_multipliers(cfg: ScenarioConfig,
                           factors: Optional[Sequence[float]] = None,
                           targets: Optional[Sequence[str]] = None,
                           n: int = 1, base_seed: Optional[int] = None, *,
                           jobs: int = 1,
                           inputs: Optional[dataio.SimulationInputs] = None,
                           ) -> dict[str, SweepResult]:
    """One sweep per cost target, each over the factor grid."""
    factors = tuple(factors) if factors is not None else default_multiplier_grid()
    if any(f <= 0 for f in factors):
        raise ValueError(f"multiplier factors must be > 0, got {factors}")
    targets = tuple(targets) if targets is not None else COST_TARGETS
    unknown = [t for t in targets if t not in COST_TARGETS]
    if unknown:
        raise ValueError(f"unknown cost targets {unknown}; "
                         f"expected a subset of {COST_TARGETS}")
    out: dict[str, SweepResult] = {}
    for target in targets:
        variants = [(f, replace(cfg, econ=cfg.econ.with_multiplier(target, f)))
                    for f in factors]
        out[target] = _sweep(cfg, f"cost_multiplier[{target}]", variants,
                             n, base_seed, jobs, inputs)
    return out


def sweep_mandated_duration(cfg: ScenarioConfig,
                            years: Optional[Sequence[int]] = None,
                            n: int = 1, base_seed: Optional[int] = None, *,
                            jobs: int = 1,
                            inputs: Optional[dataio.SimulationInputs] = None,
                            ) -> SweepResult:
    """Vary mandated capture duration; credited revenue years stay fixed."""
    years = tuple(years) if years is not None else tuple(range(12, 19))
    bad = [y for y in years if y < cfg.econ.credit_years]
    if bad:
        raise ValueError(f"mandated duration below credit_years "
                         f"{cfg.econ.credit_years}: {bad}")
    variants = [(float(y), replace(cfg, econ=replace(cfg.econ,
                                                     mandated_years=int(y))))
                for y in years]
    return _sweep(cfg, "mandated_years", variants, n, base_seed, jobs, inputs)


def sweep_revenue_share(cfg: ScenarioConfig,
                        shares: Optional[Sequence[float]] = None,
                        n: int = 1, base_seed: Optional[int] = None, *,
                        jobs: int = 1,
                        inputs: Optional[dataio.SimulationInputs] = None,
                        ) -> SweepResult:
    """Vary the supply agents' share of the tax-credit revenue."""
    shares = (tuple(shares) if shares is not None
              else tuple(i / 20 for i in range(21)))
    bad = [s for s in shares if not 0.0 <= s <= 1.0]
    if bad:
        raise ValueError(f"revenue shares outside [0, 1]: {bad}")
    variants = [(s, replace(cfg, econ=replace(cfg.econ, share_to_supply=s)))
                for s in shares]
    return _sweep(cfg, "share_to_supply", variants, n, base_seed, jobs, inputs)


# ---------------------------------------------------------------------------
# Serialization


def _flat_columns() -> list[str]:
    cols = ["total_tonnes"]
    for mode in LINE_HAUL_MODES:
        cols.append(f"{mode.label.lower()}_tonnes")
    for mode in LINE_HAUL_MODES:
        cols.append(f"{mode.label.lower()}_share")
    for metric in _DISTANCE_METRICS:
        cols.append(f"total_distance_{metric}")
    for metric in _DISTANCE_METRICS:
        cols.append(f"ac_distance_{metric}")
    cols.append("profit_per_tonne")
    return cols


def _flat_values(s: SummaryStats) -> list[Stats]:
    vals = [s.total_tonnes]
    vals.extend(s.tonnes_by_mode[m] for m in LINE_HAUL_MODES)
    vals.extend(s.mode_shares[m] for m in LINE_HAUL_MODES)
    vals.extend(s.total_distance[k] for k in _DISTANCE_METRICS)
    vals.extend(s.ac_distance[k] for k in _DISTANCE_METRICS)
    vals.append(s.profit_per_tonne)
    return vals


def write_sweep_csv(sweep: SweepResult, path) -> Path:
    """One row per sweep point; metric columns carry mean/median/std."""
    path = Path(path)
    header = ["value"]
    for col in _flat_columns():
        header.extend((f"{col}_mean", f"{col}_median", f"{col}_std"))
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for value, stats in sweep.points:
            row = [repr(float(value))]
            for s in _flat_values(stats):
                row.extend((repr(float(s.mean)), repr(float(s.median)),
                            repr(float(s.std))))
            writer.writerow(row)
    return path
