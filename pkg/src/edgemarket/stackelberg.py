"""Two-stage pricing game between the edge server and one task device.

Solved by backward induction under the sufficient-resources assumption.
Stage one: given a posted price ``d`` per cycle, the TD's concave utility
has the unique maximizer

    l*(d) = w R / (g p + d phi R - g q phi R) - 1,

with w the satisfaction scale, R the uplink rate, g the $/J energy cost,
p the transmit power, q the TD's J/cycle and phi the cycles per bit. Stage
two: the server picks ``d`` to maximize its margin times l*(d), which is
strictly concave in ``d`` as long as the server's energy per cycle exceeds
the device's, so the stationary price is found by bisection on the sign of
the marginal utility.

The feasible-volume clamp to [0, L] is applied here, inside
``best_response``, so every consumer of the solver sees feasible volumes.
``solve_price`` maximizes the realized (clamped) objective: when the clamp
binds near the price floor the bracket is advanced to the price where the
unclamped optimum re-enters [0, L].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import EconomicParams, TdProfile


class DegeneratePricingError(ValueError):
    """The follower objective lost concavity, e.g. a price below the
    device's own marginal energy cost in a scenario violating the
    server-pays-more-per-cycle assumption."""


@dataclass(frozen=True)
class FollowerContext:
    """Everything needed to evaluate one TD's response to a price."""

    td: TdProfile
    econ: EconomicParams
    uplink_bps: float

    def __post_init__(self):
        if self.uplink_bps <= 0:
            raise ValueError("uplink_bps must be > 0")

    def demand_denominator(self, price: float) -> float:
        """g p + d phi R - g q phi R, the effective per-bit price scale."""
        td, gamma = self.td, self.econ.energy_unit_cost
        phi, rate = td.task.cycles_per_bit, self.uplink_bps
        return gamma * td.tx_power_w + (price - gamma * td.energy_per_cycle) * phi * rate


def price_floor(econ: EconomicParams, es_energy_per_cycle: float) -> float:
    """Lowest admissible price: the server's break-even cost per cycle.

    Below this the server loses money on every locally processed cycle, so
    it is the natural lower end of the bisection bracket.
    """
    return econ.energy_unit_cost * es_energy_per_cycle


def unclamped_best_response(ctx: FollowerContext, price: float) -> float:
    """Stationary point of the TD utility in offloaded bits, unconstrained.

    May be negative (price above the cap) or exceed the task size; use
    ``best_response`` for the feasible value.
    """
    denom = ctx.demand_denominator(price)
    if denom <= 0:
        raise DegeneratePricingError(
            f"non-positive demand denominator {denom!r} at price {price!r}")
    return ctx.td.satisfaction * ctx.uplink_bps / denom - 1.0


def best_response(ctx: FollowerContext, price: float) -> float:
    """Utility-maximizing offload volume at a posted price, in [0, L]."""
    raw = unclamped_best_response(ctx, price)
    return min(max(raw, 0.0), ctx.td.task.size_bits)


def price_cap(ctx: FollowerContext) -> float:
    """Price at which the TD's best response falls to exactly zero bits."""
    td, gamma = ctx.td, ctx.econ.energy_unit_cost
    phi, rate = td.task.cycles_per_bit, ctx.uplink_bps
    return td.satisfaction / phi + gamma * (td.energy_per_cycle - td.tx_power_w / (phi * rate))


def full_offload_price(ctx: FollowerContext) -> float:
    """Price at which the unclamped best response equals the full task size.

    Below this price the volume clamp binds and the realized response stays
    pinned at L.
    """
    td, gamma = ctx.td, ctx.econ.energy_unit_cost
    phi, rate = td.task.cycles_per_bit, ctx.uplink_bps
    return (td.satisfaction / (phi * (1.0 + td.task.size_bits))
            + gamma * (td.energy_per_cycle - td.tx_power_w / (phi * rate)))


@dataclass(frozen=True)
class LeaderContext:
    """One TD's pricing problem as seen by the edge server."""

    follower: FollowerContext
    es_energy_per_cycle: float
    price_floor: float
    price_cap: float
    tolerance: float  # bisection bracket width on the price axis, $/cycle

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be > 0")

    @classmethod
    def build(cls, follower: FollowerContext, es_energy_per_cycle: float,
              tolerance: float = 1e-12) -> "LeaderContext":
        return cls(
            follower=follower,
            es_energy_per_cycle=es_energy_per_cycle,
            price_floor=price_floor(follower.econ, es_energy_per_cycle),
            price_cap=price_cap(follower),
            tolerance=tolerance,
        )


def leader_utility(ctx: LeaderContext, price: float) -> float:
    """Realized per-TD server profit: margin times the clamped best response."""
    ctxf = ctx.follower
    margin = price - ctxf.econ.energy_unit_cost * ctx.es_energy_per_cycle
    return margin * ctxf.td.task.cycles_per_bit * best_response(ctxf, price)


def leader_marginal_utility(ctx: LeaderContext, price: float) -> float:
    """d/d(price) of the per-TD server profit along the unclamped response."""
    ctxf = ctx.follower
    td, gamma = ctxf.td, ctxf.econ.energy_unit_cost
    phi, rate, w = td.task.cycles_per_bit, ctxf.uplink_bps, td.satisfaction
    denom = ctxf.demand_denominator(price)
    if denom <= 0:
        raise DegeneratePricingError(
            f"non-positive demand denominator {denom!r} at price {price!r}")
    margin = price - gamma * ctx.es_energy_per_cycle
    return phi * (w * rate / denom - 1.0) - margin * phi * phi * w * rate * rate / (denom * denom)


def leader_curvature(ctx: LeaderContext, price: float) -> float:
    """Second derivative of the per-TD server profit; negative whenever the
    server's energy per cycle exceeds the device's."""
    ctxf = ctx.follower
    td, gamma = ctxf.td, ctxf.econ.energy_unit_cost
    phi, rate, w = td.task.cycles_per_bit, ctxf.uplink_bps, td.satisfaction
    denom = ctxf.demand_denominator(price)
    if denom <= 0:
        raise DegeneratePricingError(
            f"non-positive demand denominator {denom!r} at price {price!r}")
    energy_gap = ctx.es_energy_per_cycle - td.energy_per_cycle
    numer = -2.0 * w * phi * phi * rate * rate * (
        gamma * phi * rate * energy_gap + gamma * td.tx_power_w)
    return numer / denom ** 3


@dataclass(frozen=True)
class PriceSolution:
    """Result of one per-TD price solve."""

    price: float
    offload_bits: float
    priced_out: bool
    iterations: int


def solve_price(ctx: LeaderContext) -> PriceSolution:
    """Find the server's profit-maximizing price for one TD by bisection.

    The marginal utility is positive at the floor and negative at the cap
    whenever the bracket is non-degenerate, so bisecting its sign converges
    to the stationary price in at most ceil(log2(range / tolerance)) steps.
    Two special cases are handled exactly:

    * cap <= floor: the device is priced out, returns (cap, 0).
    * the volume clamp binds at the floor: the realized profit rises
      linearly until the unclamped optimum re-enters [0, L], so the bracket
      starts at the full-offload price instead; if the marginal utility is
      already non-positive there, that endpoint is the maximizer.
    """
    ctxf = ctx.follower
    floor, cap = ctx.price_floor, ctx.price_cap
    if cap <= floor:
        return PriceSolution(price=cap, offload_bits=0.0, priced_out=True, iterations=0)

    lo = max(floor, full_offload_price(ctxf))
    hi = cap
    iterations = 0
    if lo >= hi:
        best = hi
    elif leader_marginal_utility(ctx, lo) <= 0.0:
        best = lo
    else:
        # Sign change is guaranteed: the derivative at the cap equals
        # -margin * phi^2 w / R < 0 for any cap above the floor.
        while hi - lo > ctx.tolerance:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:  # bracket at float resolution
                break
            iterations += 1
            if leader_marginal_utility(ctx, mid) > 0.0:
                lo = mid
            else:
                hi = mid
        best = 0.5 * (lo + hi)
    return PriceSolution(
        price=best,
        offload_bits=best_response(ctxf, best),
        priced_out=False,
        iterations=iterations,
    )
