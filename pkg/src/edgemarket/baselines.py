"""Comparison strategies: uniform pricing, no helpers, and no prioritization.

Each baseline removes exactly one ingredient of the full scheme so sweeps
can attribute the server's utility gain. All three reuse the shared
assignment engine and therefore satisfy the same feasibility constraints.
"""

from __future__ import annotations

import numpy as np

from .allocator import AllocationOutcome, IncrementPolicy, run_assignment, solve_all
from .auction import RecruitedAd
from .scenario import Scenario, follower_contexts
from .stackelberg import PriceSolution, best_response, price_cap, price_floor

UNIFORM_GRID_POINTS = 10_000


def uniform_price_search(scenario: Scenario, grid_points: int = UNIFORM_GRID_POINTS) -> float:
    """Single price maximizing the aggregate server profit across all TDs.

    Searched on a geometric grid between the server's break-even price and
    the smallest cap among TDs that are not priced out; candidate prices
    span several orders of magnitude, which a linear grid cannot resolve.
    Returns the break-even price when every TD is priced out.
    """
    contexts = follower_contexts(scenario)
    floor = price_floor(scenario.econ, scenario.es.energy_per_cycle)
    eligible_caps = [price_cap(ctx) for ctx in contexts if price_cap(ctx) > floor]
    if not eligible_caps:
        return floor
    hi = min(eligible_caps)
    grid = np.geomspace(floor, hi, grid_points)

    gamma = scenario.econ.energy_unit_cost
    aggregate = np.zeros_like(grid)
    for ctx in contexts:
        td = ctx.td
        phi, rate, w = td.task.cycles_per_bit, ctx.uplink_bps, td.satisfaction
        denom = gamma * td.tx_power_w + (grid - gamma * td.energy_per_cycle) * phi * rate
        volume = np.clip(w * rate / denom - 1.0, 0.0, td.task.size_bits)
        aggregate += (grid - floor) * phi * volume
    return float(grid[int(np.argmax(aggregate))])


def allocate_uniform_pricing(scenario: Scenario,
                             recruited: list[RecruitedAd]) -> AllocationOutcome:
    """One price for everyone; assignment runs without price increments,
    which would break uniformity."""
    price = uniform_price_search(scenario)
    solutions = [
        PriceSolution(price=price, offload_bits=best_response(ctx, price),
                      priced_out=False, iterations=0)
        for ctx in follower_contexts(scenario)
    ]
    policy = IncrementPolicy(scenario.config_echo.steps_l)
    return run_assignment(scenario, solutions, recruited, policy,
                          prioritize=True, increments=False, first_fit_ad=False)


def allocate_no_recruitment(scenario: Scenario) -> AllocationOutcome:
    """Full scheme but with no ADs: server fit and price increments only."""
    policy = IncrementPolicy(scenario.config_echo.steps_l)
    return run_assignment(scenario, solve_all(scenario), [], policy,
                          prioritize=True, increments=True, first_fit_ad=False)


def allocate_no_priority(scenario: Scenario,
                         recruited: list[RecruitedAd]) -> AllocationOutcome:
    """Id-order placement, first feasible AD, no price increments."""
    policy = IncrementPolicy(scenario.config_echo.steps_l)
    return run_assignment(scenario, solve_all(scenario), recruited, policy,
                          prioritize=False, increments=False, first_fit_ad=True)
