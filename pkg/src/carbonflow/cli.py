"""Command-line interface.

Subcommands: run, sweep, gen-sites, gen-scenario, validate.  Exit codes:
0 success, 1 input error (bad flags, unparseable or invalid inputs),
2 runtime failure.  Every error path prints a single line starting with
``error:``.  Flags such as --algorithm and --seed override the scenario
file, so sweeps can be scripted without editing inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .dataio import (LoadError, load_inputs, load_population, summary_dict,
                     write_outputs)
from .engine import Stats
from .experiment import (SummaryStats, run_replications,
                         sweep_cost_multipliers, sweep_mandated_duration,
                         sweep_revenue_share, write_sweep_csv)
from .generate import (GenParams, SiteParams, generate_candidate_sinks,
                       generate_synthetic_scenario, write_sites)
from .scenario import (Algorithm, ScenarioConfig, ScenarioError,
                       parse_scenario, validate_scenario)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 1, not 2."""

    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="carbonflow",
                     description="CO2 capture-transport-storage market "
                                 "simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_flags(p, out_required=True):
        p.add_argument("--scenario", required=True,
                       help="scenario key=value file")
        if out_required:
            p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--algorithm",
                       choices=[a.value for a in Algorithm],
                       help="override the scenario's matching algorithm")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--reps", type=int, default=1,
                       help="number of replications (default 1)")
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                       help="parallel workers (default: machine parallelism)")

    p_run = sub.add_parser("run", help="run replications and write outputs")
    scenario_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a sensitivity sweep")
    scenario_flags(p_sweep)
    p_sweep.add_argument("--kind", required=True,
                         choices=("cost", "duration", "share"))
    p_sweep.add_argument("--values",
                         help="comma-separated sweep values "
                              "(default: the standard grid)")
    p_sweep.add_argument("--targets",
                         help="comma-separated cost targets "
                              "(cost sweeps only)")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_val = sub.add_parser("validate", help="check a scenario file")
    p_val.add_argument("--scenario", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_gen = sub.add_parser("gen-scenario",
                           help="write a synthetic scenario")
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--n-sources", type=int, default=60)
    p_gen.add_argument("--n-sinks", type=int, default=12)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--bbox",
                       help="lon_lo,lat_lo,lon_hi,lat_hi "
                            "(default: a 18x12 degree box)")
    p_gen.set_defaults(func=_cmd_gen_scenario)

    p_sites = sub.add_parser("gen-sites",
                             help="generate candidate storage sites")
    p_sites.add_argument("--scenario", required=True,
                         help="scenario supplying sources and networks")
    p_sites.add_argument("--population",
                         help="population grid CSV (lon,lat,daytime,"
                              "nighttime); default: empty grid")
    p_sites.add_argument("--out", required=True, help="output sites CSV")
    p_sites.add_argument("--cluster-radius", type=float, default=100.0)
    p_sites.add_argument("--pop-radius", type=float, default=30.0)
    p_sites.add_argument("--pop-threshold", type=float, default=25_000.0)
    p_sites.add_argument("--max-sites", type=int, default=120)
    p_sites.set_defaults(func=_cmd_gen_sites)

    return parser


def _load_config(args) -> ScenarioConfig:
    cfg, violations = parse_scenario(args.scenario)
    if not violations:
        violations = validate_scenario(cfg)
    if violations:
        raise ScenarioError("; ".join(str(v) for v in violations))
    if getattr(args, "algorithm", None):
        cfg = replace(cfg, algorithm=Algorithm(args.algorithm))
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def _stats_dict(stats: SummaryStats) -> dict:
    def unpack(s: Stats) -> dict:
        return {"mean": s.mean, "median": s.median, "std": s.std}

    return {
        "n_replications": stats.n_replications,
        "total_tonnes": unpack(stats.total_tonnes),
        "tonnes_by_mode": {m.label: unpack(s)
                           for m, s in sorted(stats.tonnes_by_mode.items())},
        "mode_shares": {m.label: unpack(s)
                        for m, s in sorted(stats.mode_shares.items())},
        "total_distance": {k: unpack(s)
                           for k, s in sorted(stats.total_distance.items())},
        "ac_distance": {k: unpack(s)
                        for k, s in sorted(stats.ac_distance.items())},
        "profit_per_tonne": unpack(stats.profit_per_tonne),
    }


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    if args.reps < 1:
        raise ValueError(f"--reps must be >= 1, got {args.reps}")
    stats, results = run_replications(cfg, args.reps, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, result in enumerate(results):
        write_outputs(result, out / f"rep_{i:03d}")
    payload = {"algorithm": cfg.algorithm.value, "base_seed": cfg.seed,
               "summary": _stats_dict(stats),
               "replications": [summary_dict(r) for r in results]}
    (out / "summary.json").write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n",
        encoding="utf-8")
    print(f"wrote {len(results)} replication(s) to {out}")
    return 0


def _parse_values(text: Optional[str], conv=float) -> Optional[list]:
    if text is None:
        return None
    try:
        return [conv(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ValueError(f"bad --values list {text!r}: {exc}") from exc


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    values = _parse_values(args.values)
    written: list[Path] = []
    if args.kind == "cost":
        targets = (args.targets.split(",") if args.targets else None)
        sweeps = sweep_cost_multipliers(cfg, values, targets, n=args.reps,
                                        jobs=args.jobs)
        for target, sweep in sweeps.items():
            written.append(write_sweep_csv(
                sweep, out / f"sweep_cost_{target}.csv"))
    else:
        if args.targets:
            raise ValueError("--targets applies only to --kind cost")
        if args.kind == "duration":
            years = None if values is None else [int(v) for v in values]
            sweep = sweep_mandated_duration(cfg, years, n=args.reps,
                                            jobs=args.jobs)
        else:
            sweep = sweep_revenue_share(cfg, values, n=args.reps,
                                        jobs=args.jobs)
        written.append(write_sweep_csv(sweep,
                                       out / f"sweep_{args.kind}.csv"))
    print(f"wrote {len(written)} sweep file(s) to {out}")
    return 0


def _cmd_validate(args) -> int:
    cfg, violations = parse_scenario(args.scenario)
    violations = list(violations) + validate_scenario(cfg)
    for violation in violations:
        print(violation)
    if violations:
        print(f"error: scenario has {len(violations)} violation(s)")
        return 1
    print("ok")
    return 0


def _cmd_gen_scenario(args) -> int:
    kwargs = {}
    if args.bbox:
        parts = [float(p) for p in args.bbox.split(",")]
        if len(parts) != 4:
            raise ValueError(f"--bbox needs 4 numbers, got {args.bbox!r}")
        kwargs["bbox"] = tuple(parts)
    params = GenParams(n_sources=args.n_sources, n_sinks=args.n_sinks,
                       seed=args.seed, **kwargs)
    paths = generate_synthetic_scenario(params, args.out)
    print(f"wrote scenario to {paths['scenario']}")
    return 0


def _cmd_gen_sites(args) -> int:
    cfg = _load_config(args)
    inputs = load_inputs(cfg)
    pop = load_population(args.population) if args.population else []
    params = SiteParams(cluster_radius_miles=args.cluster_radius,
                        pop_radius_miles=args.pop_radius,
                        pop_threshold=args.pop_threshold,
                        max_sites=args.max_sites)
    candidates = generate_candidate_sinks(inputs.sources, inputs.networks,
                                          pop, params)
    write_sites(candidates, args.out)
    print(f"wrote {len(candidates)} candidate site(s) to {args.out}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except (LoadError, ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
