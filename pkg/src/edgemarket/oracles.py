"""Brute-force reference computations used to check the closed-form solvers.

These deliberately avoid the solver's algebra: the follower oracle scans the
device utility itself over a dense volume grid, and the leader oracle scans
the realized server profit over a dense price grid. Slow but independent.
"""

from __future__ import annotations

import numpy as np

from .stackelberg import FollowerContext, LeaderContext, best_response


def follower_utility_curve(ctx: FollowerContext, price: float,
                           volumes: np.ndarray) -> np.ndarray:
    """Device utility evaluated directly from its definition, elementwise."""
    td, gamma = ctx.td, ctx.econ.energy_unit_cost
    phi, rate = td.task.cycles_per_bit, ctx.uplink_bps
    return (
        td.satisfaction * np.log1p(volumes)
        + td.completion_value
        - gamma * td.energy_per_cycle * phi * (td.task.size_bits - volumes)
        - gamma * td.tx_power_w * volumes / rate
        - price * phi * volumes
    )


def grid_best_volume(ctx: FollowerContext, price: float, points: int = 100_000) -> float:
    """Argmax of the device utility over an even grid on [0, task size]."""
    volumes = np.linspace(0.0, ctx.td.task.size_bits, points)
    utilities = follower_utility_curve(ctx, price, volumes)
    return float(volumes[int(np.argmax(utilities))])


def grid_best_price(ctx: LeaderContext, points: int = 10_000) -> tuple[float, float]:
    """(price, utility) maximizing the realized per-TD server profit over an
    even grid on [floor, cap]."""
    prices = np.linspace(ctx.price_floor, ctx.price_cap, points)
    floor = ctx.follower.econ.energy_unit_cost * ctx.es_energy_per_cycle
    phi = ctx.follower.td.task.cycles_per_bit
    utilities = np.array([
        (p - floor) * phi * best_response(ctx.follower, p) for p in prices
    ])
    k = int(np.argmax(utilities))
    return float(prices[k]), float(utilities[k])
