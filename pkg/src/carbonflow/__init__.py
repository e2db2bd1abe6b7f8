"""Agent-based simulator of a CO2 capture-transport-storage market.

Supply agents (emitters) pick demand agents (storage sites and CO2 users)
and multimodal routes under one of five matching criteria; a connection
happens only when the split tax-credit revenue makes both sides
profitable.  The package covers scenario configuration, geospatial mode
networks, route building, connection economics, the matching algorithms,
the annual-tick engine, replication/sweep experiments, and a CLI.
"""

from .scenario import (Algorithm, ScenarioConfig, ScenarioError, Violation,
                       parse_scenario, validate_scenario, write_scenario)
from .types import (ALWAYS, UNLIMITED, AgentState, CostMultipliers,
                    DemandAgent, DemandCategory, EconomicParams, GeoPoint,
                    Mode, SupplyAgent)
from .geo import EARTH_RADIUS_MILES, great_circle_miles
from .network import ModeNetwork, NetworkEdge, NetworkNode
from .routes import Route, build_route, enumerate_candidates
from .econ import ConnectionEvaluation, evaluate_connection
from .matching import MatchDecision, Outcome, select
from .engine import (Connection, ReplicationResult, Simulation, Stats,
                     assign_start_years, run_replication, step_year)
from .dataio import (LoadError, PopulationCell, SimulationInputs,
                     load_inputs, load_network, load_population,
                     load_sinks, load_sources, write_outputs)
from .generate import (GenParams, SinkCandidate, SiteParams,
                       generate_candidate_sinks, generate_synthetic_scenario)
from .experiment import (SummaryStats, SweepResult, run_replications,
                         summarize, sweep_cost_multipliers,
                         sweep_mandated_duration, sweep_revenue_share,
                         write_sweep_csv)

__version__ = "0.1.0"

__all__ = [
    "ALWAYS", "UNLIMITED", "EARTH_RADIUS_MILES",
    "AgentState", "Algorithm", "Connection", "ConnectionEvaluation",
    "CostMultipliers", "DemandAgent", "DemandCategory", "EconomicParams",
    "GenParams", "GeoPoint", "LoadError", "MatchDecision", "Mode",
    "ModeNetwork", "NetworkEdge", "NetworkNode", "Outcome",
    "PopulationCell", "ReplicationResult", "Route", "ScenarioConfig",
    "ScenarioError", "Simulation", "SimulationInputs", "SinkCandidate",
    "SiteParams", "Stats", "SummaryStats", "SupplyAgent", "SweepResult",
    "Violation",
    "assign_start_years", "build_route", "enumerate_candidates",
    "evaluate_connection", "generate_candidate_sinks",
    "generate_synthetic_scenario", "great_circle_miles", "load_inputs",
    "load_network", "load_population", "load_sinks", "load_sources",
    "parse_scenario", "run_replication", "run_replications", "select",
    "step_year", "summarize", "sweep_cost_multipliers",
    "sweep_mandated_duration", "sweep_revenue_share", "validate_scenario",
    "write_outputs", "write_scenario", "write_sweep_csv",
]
