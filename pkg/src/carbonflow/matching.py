"""Source-sink selection: the five matching criteria.

All five algorithms share one candidate-filtering rule (profitable, and
startable within the admission window and the sink's end-year cap) and
one tie-break chain; they differ only in the primary criterion and in
whether they look across all years or just the first year with a
startable profitable candidate:

  MPFY  most supply profit, first profitable year
  MPAY  most supply profit, any year in the window
  SDFY  shortest total distance, first profitable year
  SDAY  shortest total distance, any year
  ACAY  shortest access (first+last leg) distance, any year

Ties break by smaller total distance, earlier start year, mode order
(pipeline, rail, water), then smaller demand id; entry and exit node
order close the chain so the choice is always unique.

``select`` is the list-based reference implementation; the engine feeds
the same ``pick_row`` core with precomputed arrays, so both paths choose
identically.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .econ import ConnectionEvaluation, evaluate_connection
from .routes import Route
from .scenario import Algorithm
from .types import DemandAgent, EconomicParams, SupplyAgent


class Outcome(enum.Enum):
    CONNECT = "connect"
    DEFER = "defer"
    NO_MATCH = "no_match"


@dataclass(frozen=True)
class MatchDecision:
    outcome: Outcome
    evaluation: Optional[ConnectionEvaluation] = None
    target_year: Optional[int] = None

    @classmethod
    def connect(cls, evaluation: ConnectionEvaluation) -> "MatchDecision":
        return cls(Outcome.CONNECT, evaluation=evaluation,
                   target_year=evaluation.start_year)

    @classmethod
    def defer(cls, target_year: int) -> "MatchDecision":
        return cls(Outcome.DEFER, target_year=target_year)

    @classmethod
    def no_match(cls) -> "MatchDecision":
        return cls(Outcome.NO_MATCH)


def pick_row(algorithm: Algorithm, e_years: np.ndarray, mask: np.ndarray,
             supply_profit: np.ndarray, total_miles: np.ndarray,
             access_miles: np.ndarray, mode_code: np.ndarray,
             demand_rank: np.ndarray, entry_rank: np.ndarray,
             exit_rank: np.ndarray) -> Optional[int]:
    """Index of the winning candidate row, or None when mask is empty.

    ``e_years`` holds each candidate's earliest feasible start year and
    ``mask`` its eligibility (profitable, startable in the window,
    capacity available).  First-year algorithms narrow to the earliest
    startable year before applying their criterion.
    """
    if not mask.any():
        return None
    if algorithm.first_year_only:
        mask = mask & (e_years == e_years[mask].min())
    if algorithm in (Algorithm.MPFY, Algorithm.MPAY):
        primary = -supply_profit
    elif algorithm in (Algorithm.SDFY, Algorithm.SDAY):
        primary = total_miles
    else:
        primary = access_miles
    idx = np.nonzero(mask)[0]
    order = np.lexsort((exit_rank[idx], entry_rank[idx], demand_rank[idx],
                        mode_code[idx], e_years[idx], total_miles[idx],
                        primary[idx]))
    return int(idx[order[0]])


def _ranks(values: list) -> np.ndarray:
    table = {v: i for i, v in enumerate(sorted(set(values)))}
    return np.array([table[v] for v in values], dtype=np.int64)


def select(agent: SupplyAgent, candidates: Sequence[tuple[Route, int]],
           demands: Mapping[str, DemandAgent], current_year: int,
           algorithm: Algorithm, params: EconomicParams) -> MatchDecision:
    """Decide this year's action for one supply agent.

    ``candidates`` are (route, earliest start year) pairs covering the
    window from the current year through the last admission year, as
    produced by enumerate_candidates; capacity filtering is the caller's
    responsibility.  Returns Connect with the winning evaluation when the
    winner is startable now, Defer with its start year when it lies
    ahead (first-year algorithms treat this as plain waiting and simply
    re-fire next year), and NoMatch when no profitable candidate exists
    anywhere in the window.
    """
    n = len(candidates)
    if n == 0:
        return MatchDecision.no_match()

    e_years = np.empty(n, dtype=np.int64)
    mask = np.zeros(n, dtype=bool)
    supply_profit = np.zeros(n, dtype=np.float64)
    total_miles = np.empty(n, dtype=np.float64)
    access_miles = np.empty(n, dtype=np.float64)
    mode_code = np.empty(n, dtype=np.int64)
    evaluations: list[Optional[ConnectionEvaluation]] = [None] * n

    horizon = params.mandated_years - 1
    for i, (route, earliest) in enumerate(candidates):
        d = demands[route.demand_id]
        e = max(earliest, current_year)
        e_years[i] = e
        total_miles[i] = route.total_miles
        access_miles[i] = route.access_miles
        mode_code[i] = int(route.mode)
        if d.end_year is not None and e + horizon > d.end_year:
            continue
        ev = evaluate_connection(agent, d, route, e, params)
        evaluations[i] = ev
        supply_profit[i] = ev.supply_profit
        mask[i] = ev.profitable

    routes = [route for route, _ in candidates]
    chosen = pick_row(
        algorithm, e_years, mask, supply_profit, total_miles, access_miles,
        mode_code, _ranks([r.demand_id for r in routes]),
        _ranks([r.entry_node for r in routes]),
        _ranks([r.exit_node for r in routes]))
    if chosen is None:
        return MatchDecision.no_match()
    if e_years[chosen] > current_year:
        return MatchDecision.defer(int(e_years[chosen]))
    return MatchDecision.connect(evaluations[chosen])
