"""Scenario configuration: the flat key=value file, parsing and validation.

All tunables live here: the simulation clock, the matching algorithm, the
RNG seed, the capture-fraction draw range, every economic constant, and the
paths of the agent/network CSV inputs.  ``validate_scenario`` never raises;
violations are returned as data so the CLI can print all of them at once.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional

from .types import CostMultipliers, EconomicParams, Mode


class Algorithm(enum.Enum):
    """The five source-sink matching criteria."""

    MPFY = "MPFY"  # most profitable, first profitable year
    MPAY = "MPAY"  # most profitable over all years
    SDFY = "SDFY"  # shortest total distance, first profitable year
    SDAY = "SDAY"  # shortest total distance over all years
    ACAY = "ACAY"  # shortest access (first+last leg) distance over all years

    @property
    def first_year_only(self) -> bool:
        return self in (Algorithm.MPFY, Algorithm.SDFY)


@dataclass(frozen=True)
class Violation:
    field: str
    message: str

    def __str__(self):
        return f"{self.field}: {self.message}"


@dataclass(frozen=True)
class ScenarioConfig:
    first_year: int = 2025
    last_admission_year: int = 2032
    horizon_end: int = 2043
    algorithm: Algorithm = Algorithm.MPFY
    seed: int = 1
    capture_fraction_lo: float = 0.90
    capture_fraction_hi: float = 1.00
    econ: EconomicParams = field(default_factory=EconomicParams)
    sources_file: str = "sources.csv"
    sinks_file: str = "sinks.csv"
    pipeline_nodes_file: str = "pipeline_nodes.csv"
    pipeline_edges_file: str = "pipeline_edges.csv"
    rail_nodes_file: str = "rail_nodes.csv"
    rail_edges_file: str = "rail_edges.csv"
    water_nodes_file: str = "water_nodes.csv"
    water_edges_file: str = "water_edges.csv"
    base_dir: str = "."

    def path(self, name: str) -> Path:
        """Resolve one of the *_file fields against base_dir."""
        return Path(self.base_dir) / getattr(self, name)

    def network_paths(self, mode: Mode) -> tuple[Path, Path]:
        stem = mode.name.lower()
        return (self.path(f"{stem}_nodes_file"), self.path(f"{stem}_edges_file"))


# Scenario-file keys for the flattened EconomicParams fields.
_ECON_FLOAT_KEYS = (
    "revenue_storage", "revenue_storage_dac", "revenue_utilization",
    "revenue_utilization_dac", "rate_pipeline", "rate_rail", "rate_water",
    "rate_truck", "capex_pipeline_per_mile", "capex_rail_per_mile",
    "capex_water_terminal_per_tonne", "terminal_buffer_days",
    "storage_cost_default", "share_to_supply",
)
_ECON_INT_KEYS = ("credit_years", "mandated_years", "water_terminal_count")
_MULTIPLIER_KEYS = tuple(f"multiplier_{n}" for n in
                         ("capture", "storage", "pipeline", "rail", "water"))
_PATH_KEYS = tuple(f.name for f in fields(ScenarioConfig)
                   if f.name.endswith("_file"))


class ScenarioError(Exception):
    """Unparseable scenario file (I/O or syntax, not semantic violations)."""


def parse_scenario(path) -> tuple[ScenarioConfig, list[Violation]]:
    """Read a key=value scenario file.

    Returns the config plus any key-level violations (unknown keys, values
    that fail to coerce).  Semantic checks are validate_scenario's job.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from exc

    raw: dict[str, str] = {}
    violations: list[Violation] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            violations.append(Violation(f"line {lineno}", f"expected key=value, got {line!r}"))
            continue
        key, value = line.split("=", 1)
        raw[key.strip()] = value.strip()

    cfg = ScenarioConfig(base_dir=str(path.parent))
    econ_kwargs: dict = {}
    mult_kwargs: dict = {}
    cfg_kwargs: dict = {}

    def coerce(key: str, value: str, conv, target: dict, name: str):
        try:
            target[name] = conv(value)
        except ValueError as exc:
            violations.append(Violation(key, str(exc)))

    for key, value in raw.items():
        if key in ("first_year", "last_admission_year", "horizon_end", "seed"):
            coerce(key, value, int, cfg_kwargs, key)
        elif key == "algorithm":
            try:
                cfg_kwargs["algorithm"] = Algorithm(value.upper())
            except ValueError:
                violations.append(Violation(key, f"unknown algorithm {value!r}"))
        elif key == "capture_fraction_range":
            parts = value.split(",")
            if len(parts) != 2:
                violations.append(Violation(key, "expected lo,hi"))
            else:
                coerce(key, parts[0], float, cfg_kwargs, "capture_fraction_lo")
                coerce(key, parts[1], float, cfg_kwargs, "capture_fraction_hi")
        elif key in ("capture_fraction_lo", "capture_fraction_hi"):
            coerce(key, value, float, cfg_kwargs, key)
        elif key in _ECON_FLOAT_KEYS:
            coerce(key, value, float, econ_kwargs, key)
        elif key in _ECON_INT_KEYS:
            coerce(key, value, int, econ_kwargs, key)
        elif key in _MULTIPLIER_KEYS:
            coerce(key, value, float, mult_kwargs, key.removeprefix("multiplier_"))
        elif key in _PATH_KEYS:
            cfg_kwargs[key] = value
        else:
            violations.append(Violation(key, "unknown scenario key"))

    if mult_kwargs:
        econ_kwargs["multipliers"] = replace(CostMultipliers(), **mult_kwargs)
    if econ_kwargs:
        cfg_kwargs["econ"] = replace(EconomicParams(), **econ_kwargs)
    return replace(cfg, **cfg_kwargs), violations


def write_scenario(cfg: ScenarioConfig, path) -> None:
    """Write a scenario file that parse_scenario round-trips."""
    econ = cfg.econ
    lines = [
        "# carbonflow scenario",
        f"first_year={cfg.first_year}",
        f"last_admission_year={cfg.last_admission_year}",
        f"horizon_end={cfg.horizon_end}",
        f"algorithm={cfg.algorithm.value}",
        f"seed={cfg.seed}",
        f"capture_fraction_range={cfg.capture_fraction_lo!r},{cfg.capture_fraction_hi!r}",
    ]
    for key in _ECON_FLOAT_KEYS:
        lines.append(f"{key}={getattr(econ, key)!r}")
    for key in _ECON_INT_KEYS:
        lines.append(f"{key}={getattr(econ, key)}")
    for key in _MULTIPLIER_KEYS:
        lines.append(f"{key}={getattr(econ.multipliers, key.removeprefix('multiplier_'))!r}")
    for key in _PATH_KEYS:
        lines.append(f"{key}={getattr(cfg, key)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def validate_scenario(cfg: ScenarioConfig) -> list[Violation]:
    """Every invariant violation in the config; empty list means valid."""
    v: list[Violation] = []
    econ = cfg.econ

    if not cfg.first_year <= cfg.last_admission_year:
        v.append(Violation("first_year",
                           f"first_year {cfg.first_year} must be <= "
                           f"last_admission_year {cfg.last_admission_year}"))
    if not cfg.last_admission_year < cfg.horizon_end:
        v.append(Violation("horizon_end",
                           f"horizon_end {cfg.horizon_end} must be > "
                           f"last_admission_year {cfg.last_admission_year}"))
    if cfg.horizon_end < cfg.last_admission_year + econ.credit_years - 1:
        v.append(Violation("horizon_end",
                           f"horizon_end {cfg.horizon_end} too short: connections admitted in "
                           f"{cfg.last_admission_year} run through "
                           f"{cfg.last_admission_year + econ.credit_years - 1}"))
    if not isinstance(cfg.algorithm, Algorithm):
        v.append(Violation("algorithm", f"not a valid algorithm: {cfg.algorithm!r}"))
    if not (0 < cfg.capture_fraction_lo <= cfg.capture_fraction_hi <= 1.0):
        v.append(Violation("capture_fraction_range",
                           f"[{cfg.capture_fraction_lo}, {cfg.capture_fraction_hi}] "
                           "must satisfy 0 < lo <= hi <= 1"))
    if not -(2 ** 63) <= cfg.seed < 2 ** 64:
        v.append(Violation("seed", "must fit in 64 bits"))

    if not 0.0 <= econ.share_to_supply <= 1.0:
        v.append(Violation("share_to_supply",
                           f"{econ.share_to_supply} outside [0, 1]"))
    if econ.mandated_years < econ.credit_years:
        v.append(Violation("mandated_years",
                           f"mandated_years {econ.mandated_years} must be >= "
                           f"credit_years {econ.credit_years}"))
    if econ.credit_years < 1:
        v.append(Violation("credit_years", "must be >= 1"))
    for key in _ECON_FLOAT_KEYS:
        if key == "share_to_supply":
            continue
        if getattr(econ, key) < 0:
            v.append(Violation(key, f"{getattr(econ, key)} must be >= 0"))
    if econ.water_terminal_count < 0:
        v.append(Violation("water_terminal_count", "must be >= 0"))
    for name in ("capture", "storage", "pipeline", "rail", "water"):
        value = getattr(econ.multipliers, name)
        if not value > 0:
            v.append(Violation(f"multiplier_{name}", f"{value} must be > 0"))
    return v
