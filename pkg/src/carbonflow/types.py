"""Shared domain types: geography, transport modes, market agents, economics.

Monetary amounts are USD, masses are tonnes, distances are miles.  All cost
and revenue constants default to the published per-tonne / per-mile inputs
the model was calibrated with; every one of them can be overridden through
the scenario file.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, replace
from typing import Optional

UNLIMITED = math.inf

#: Always-available sentinel for network elements and sinks.
ALWAYS = 0


class Mode(enum.IntEnum):
    """Transport modes.  Integer order doubles as the matching tie-break
    order (Pipeline < Rail < Water).  Truck never runs line-haul; it only
    carries the access legs of Water routes."""

    PIPELINE = 0
    RAIL = 1
    WATER = 2
    TRUCK = 3

    @property
    def label(self) -> str:
        return self.name.capitalize()

    @classmethod
    def parse(cls, text: str) -> "Mode":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown mode {text!r}") from None


LINE_HAUL_MODES = (Mode.PIPELINE, Mode.RAIL, Mode.WATER)
ALL_LINE_HAUL = frozenset(LINE_HAUL_MODES)


class AgentState(enum.Enum):
    WAITING = "waiting"
    SELECTING = "selecting"
    CONNECTED = "connected"
    COMPLETE = "complete"


#: Legal lifecycle order; transitions may only move rightward.
STATE_ORDER = (AgentState.WAITING, AgentState.SELECTING,
               AgentState.CONNECTED, AgentState.COMPLETE)


class DemandCategory(enum.Enum):
    STORAGE = "Storage"
    UTILIZATION = "Utilization"

    @classmethod
    def parse(cls, text: str) -> "DemandCategory":
        t = text.strip().lower()
        for member in cls:
            if member.value.lower() == t:
                return member
        raise ValueError(f"unknown demand category {text!r}")


@dataclass(frozen=True)
class GeoPoint:
    """Longitude/latitude in degrees; validated at construction."""

    lon: float
    lat: float

    def __post_init__(self):
        if not (-180.0 <= self.lon <= 180.0):
            raise ValueError(f"lon {self.lon} outside [-180, 180]")
        if not (-90.0 <= self.lat <= 90.0):
            raise ValueError(f"lat {self.lat} outside [-90, 90]")


# ---------------------------------------------------------------------------
# Source (supply) types

#: (number of facilities, total MTPA) per source type in the national
#: inventory used for calibration; drives the synthetic generator's default
#: type mix and per-type mean annual tonnage.
SOURCE_TYPE_STATS = {
    "Powerplant": (1158, 1476.8),
    "BECCS": (80, 502.7),
    "Petro & NG Systems": (1804, 231.8),
    "Refinery": (133, 181.6),
    "Chemicals": (275, 91.0),
    "Other": (1043, 76.2),
    "Cement": (91, 66.2),
    "Iron & Steel": (119, 62.3),
    "Minerals": (273, 42.6),
    "Petrochemicals": (56, 40.2),
    "Pulp & Paper": (218, 34.4),
    "Hydrogen": (37, 15.5),
    "Waste": (79, 14.0),
    "Metals": (154, 13.1),
    "DAC": (24, 6.3),
}

#: Uniform capture-cost range (USD/tonne) drawn once per agent per replication.
CAPTURE_COST_RANGES = {
    "DAC": (134.0, 342.0),
    "BECCS": (55.0, 60.0),
    "Cement": (60.0, 120.0),
    "Chemicals": (15.0, 25.0),
    "Hydrogen": (50.0, 80.0),
    "Iron & Steel": (40.0, 100.0),
    "Metals": (40.0, 100.0),
    "Minerals": (15.0, 25.0),
    "Other": (15.0, 25.0),
    "Petro & NG Systems": (15.0, 25.0),
    "Petrochemicals": (15.0, 25.0),
    "Powerplant": (50.0, 100.0),
    "Pulp & Paper": (40.0, 100.0),
    "Refinery": (15.0, 25.0),
    "Waste": (40.0, 100.0),
}

SOURCE_TYPES = tuple(CAPTURE_COST_RANGES)


def _squash(text: str) -> str:
    return re.sub(r"[^a-z0-9]", "", text.lower())


_SOURCE_TYPE_LOOKUP = {_squash(name): name for name in SOURCE_TYPES}
_SOURCE_TYPE_LOOKUP.update({
    "powerplant": "Powerplant",
    "directaircapture": "DAC",
    "bioenergywithcarboncaptureandstorage": "BECCS",
    "petroleumandnaturalgassystems": "Petro & NG Systems",
    "petroleumngsystems": "Petro & NG Systems",
    "ironandsteel": "Iron & Steel",
    "pulpandpaper": "Pulp & Paper",
})


def canonical_source_type(text: str) -> str:
    """Map a loosely-spelled source type to its canonical name.

    Raises ValueError for anything not in the 15-type inventory.
    """
    key = _squash(text)
    if key not in _SOURCE_TYPE_LOOKUP:
        raise ValueError(f"unknown source type {text!r}")
    return _SOURCE_TYPE_LOOKUP[key]


def source_type_share(name: str) -> float:
    """Share of total CO2 supply contributed by a source type."""
    total = sum(mtpa for _, mtpa in SOURCE_TYPE_STATS.values())
    return SOURCE_TYPE_STATS[name][1] / total


def mean_annual_tonnes(name: str) -> float:
    """Average facility size (tonnes/year) for a source type."""
    count, mtpa = SOURCE_TYPE_STATS[name]
    return mtpa * 1e6 / count


#: Sink types whose food-grade use of CO2 forbids pipeline delivery.
FOOD_GRADE_SINK_TYPES = frozenset({"foodandbeverage", "foodbeverage"})


def is_food_grade(sink_type: str) -> bool:
    return _squash(sink_type) in FOOD_GRADE_SINK_TYPES


# ---------------------------------------------------------------------------
# Agents


@dataclass
class SupplyAgent:
    """A CO2 emitter looking for a sink and a route.

    ``capture_fraction`` and ``capture_cost`` hold NaN on templates loaded
    from file; the engine fills them from per-agent random substreams at the
    start of each replication.  ``start_year`` of None means "assign
    randomly within the admission window".
    """

    id: str
    source_type: str
    location: GeoPoint
    annual_tonnes: float
    start_year: Optional[int] = None
    capture_fraction: float = math.nan
    capture_cost: float = math.nan
    allowed_modes: frozenset = ALL_LINE_HAUL
    state: AgentState = AgentState.WAITING

    def __post_init__(self):
        self.source_type = canonical_source_type(self.source_type)
        if not self.annual_tonnes > 0:
            raise ValueError(f"agent {self.id}: annual_tonnes must be > 0")

    @property
    def is_dac(self) -> bool:
        return self.source_type == "DAC"

    @property
    def effective_tonnes(self) -> float:
        """Tonnes per year actually captured once connected."""
        return self.annual_tonnes * self.capture_fraction


@dataclass
class DemandAgent:
    """A storage site or utilization facility that accepts CO2."""

    id: str
    category: DemandCategory
    sink_type: str
    location: GeoPoint
    cost_per_tonne: float
    annual_capacity: float = UNLIMITED
    total_capacity: float = UNLIMITED
    available_year: int = ALWAYS
    end_year: Optional[int] = None
    allowed_modes: frozenset = ALL_LINE_HAUL

    def __post_init__(self):
        if self.cost_per_tonne < 0:
            raise ValueError(f"sink {self.id}: cost_per_tonne must be >= 0")
        if self.end_year is not None and self.available_year > self.end_year:
            raise ValueError(f"sink {self.id}: available_year > end_year")


# ---------------------------------------------------------------------------
# Economic parameters


@dataclass(frozen=True)
class CostMultipliers:
    """Sensitivity scalers for the five primary cost inputs."""

    capture: float = 1.0
    storage: float = 1.0
    pipeline: float = 1.0
    rail: float = 1.0
    water: float = 1.0

    def for_mode(self, mode: Mode) -> float:
        if mode is Mode.PIPELINE:
            return self.pipeline
        if mode is Mode.RAIL:
            return self.rail
        if mode is Mode.WATER:
            return self.water
        return 1.0  # truck access legs are not a swept cost


@dataclass(frozen=True)
class EconomicParams:
    """Revenue, transport and capital cost inputs.

    Defaults reproduce the published calibration exactly: tax-credit revenue
    85/180/60/130 USD/t by sink category and DAC status, per-tonne-mile
    rates 0.0161 (pipeline), 0.0708 (rail), 0.0644 (water), 0.1770 (truck),
    capital 784,198 USD/mile (pipeline spur), 2,000,000 USD/mile (rail spur)
    and 4,585.1 USD per tonne of water terminal buffer capacity.
    """

    revenue_storage: float = 85.0
    revenue_storage_dac: float = 180.0
    revenue_utilization: float = 60.0
    revenue_utilization_dac: float = 130.0
    rate_pipeline: float = 0.0161
    rate_rail: float = 0.0708
    rate_water: float = 0.0644
    rate_truck: float = 0.1770
    capex_pipeline_per_mile: float = 784_198.0
    capex_rail_per_mile: float = 2_000_000.0
    capex_water_terminal_per_tonne: float = 4_585.1
    terminal_buffer_days: float = 7.0
    water_terminal_count: int = 2
    storage_cost_default: float = 10.0
    share_to_supply: float = 0.75
    credit_years: int = 12
    mandated_years: int = 12
    multipliers: CostMultipliers = field(default_factory=CostMultipliers)

    def transport_rate(self, mode: Mode) -> float:
        return {
            Mode.PIPELINE: self.rate_pipeline,
            Mode.RAIL: self.rate_rail,
            Mode.WATER: self.rate_water,
            Mode.TRUCK: self.rate_truck,
        }[mode]

    def with_multiplier(self, target: str, factor: float) -> "EconomicParams":
        """Copy with one multiplier (or the all_transport group) replaced."""
        if target == "all_transport":
            mult = replace(self.multipliers, pipeline=factor, rail=factor,
                           water=factor)
        else:
            mult = replace(self.multipliers, **{target: factor})
        return replace(self, multipliers=mult)
