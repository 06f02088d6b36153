"""Priority-driven task placement under server and helper capacity limits.

The entry point ``allocate`` implements the greedy assignment heuristic:

1. If all solved demands fit the server, every task runs there at its
   unmodified per-TD solution.
2. Otherwise tasks are ranked by server profit per unit of server compute
   and placed in that order: first try the server's remaining capacity,
   then the recruited AD with the highest delegation utility among those
   with room and a non-negative utility, and failing both, raise the task's
   price one increment (shrinking its volume and demand) and retry. A task
   whose price reaches its cap is rejected and consumes nothing.

The same engine, with prioritization, increments or best-AD selection
switched off, also powers the comparison strategies in ``baselines``.
Allocation is inherently sequential (one shared ledger); each call builds
an immutable outcome that downstream replay checks can verify against the
formula layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import model
from .auction import RecruitedAd
from .model import EconomicParams, OffloadDecision, TdProfile, min_resources, relay_rate
from .scenario import Scenario, follower_contexts, leader_contexts
from .stackelberg import PriceSolution, best_response, price_cap, solve_price


@dataclass(frozen=True)
class ResourceLedger:
    """Remaining compute after allocation: the server plus each AD by id."""

    es_remaining: float
    ad_remaining: dict[int, float]


@dataclass(frozen=True)
class IncrementPolicy:
    """Number of equal price steps between a TD's solved price and its cap."""

    steps: int = 20

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError("steps must be >= 1")


@dataclass(frozen=True)
class AllocationOutcome:
    """The solved strategy triple plus realized utilities and ledgers.

    Per-TD sequences are aligned with ``scenario.tds``; per-AD sequences are
    aligned with ``scenario.ads`` (zeros for ADs never assigned work).
    """

    decisions: tuple[OffloadDecision, ...]
    ledger: ResourceLedger
    es_utility: float
    td_utilities: tuple[float, ...]
    ad_utilities: tuple[float, ...]
    ad_assigned_cycles: tuple[float, ...]
    price_increment_counts: tuple[int, ...]
    es_task_utilities: tuple[float, ...]
    rejected: tuple[bool, ...]


def task_priority(td: TdProfile, econ: EconomicParams, es_energy_per_cycle: float,
                  price: float, offload_bits: float, uplink_bps: float) -> float:
    """Server profit per unit of server compute spent on this task.

    Undefined (raises ValueError) for empty offloads or tasks whose upload
    already exceeds the deadline; such tasks consume no server compute or
    cannot run there at all.
    """
    if offload_bits <= 0:
        raise ValueError("priority undefined for an empty offload")
    transfer = offload_bits / uplink_bps
    demand = min_resources(td.task.cycles_per_bit * offload_bits, td.task.deadline_s, transfer)
    if math.isinf(demand):
        raise ValueError("priority undefined when upload exceeds the deadline")
    profit = model.es_local_utility(price, es_energy_per_cycle, econ.energy_unit_cost,
                                    td.task.cycles_per_bit, offload_bits)
    return profit / demand


def ad_priority(td: TdProfile, reward_per_cycle: float, econ: EconomicParams,
                bs_power_w: float, price: float, offload_bits: float,
                relay_bps: float) -> float:
    """Server profit from delegating this task to a given AD."""
    return model.es_delegation_utility(price, reward_per_cycle, econ.energy_unit_cost,
                                       bs_power_w, td.task.cycles_per_bit,
                                       offload_bits, relay_bps)


def solve_all(scenario: Scenario) -> list[PriceSolution]:
    """Per-TD price solutions, in TD order."""
    return [solve_price(ctx) for ctx in leader_contexts(scenario)]


def allocate(scenario: Scenario, solutions: list[PriceSolution],
             recruited: list[RecruitedAd], policy: IncrementPolicy) -> AllocationOutcome:
    """Run the full heuristic: prioritized placement with price increments."""
    return run_assignment(scenario, solutions, recruited, policy,
                          prioritize=True, increments=True, first_fit_ad=False)


def run_assignment(scenario: Scenario, solutions: list[PriceSolution],
                   recruited: list[RecruitedAd], policy: IncrementPolicy, *,
                   prioritize: bool, increments: bool, first_fit_ad: bool) -> AllocationOutcome:
    """Shared assignment engine behind the main heuristic and its ablations.

    ``prioritize`` sorts tasks by descending server profit density instead of
    id order; ``increments`` enables the price-raising retry loop;
    ``first_fit_ad`` takes the lowest-id feasible AD instead of the highest
    delegation utility.
    """
    tds = scenario.tds
    if len(solutions) != len(tds):
        raise ValueError("one price solution required per TD")
    ad_ids = {ad.id for ad in scenario.ads}
    seen = set()
    for rec in recruited:
        if rec.ad.id not in ad_ids:
            raise ValueError(f"recruited AD {rec.ad.id} is not part of the scenario")
        if rec.ad.id in seen:
            raise ValueError(f"AD {rec.ad.id} recruited twice")
        seen.add(rec.ad.id)

    econ, channel, es = scenario.econ, scenario.channel, scenario.es
    gamma = econ.energy_unit_cost
    contexts = follower_contexts(scenario)
    uplinks = [ctx.uplink_bps for ctx in contexts]
    caps = [price_cap(ctx) for ctx in contexts]

    n = len(tds)
    prices = [sol.price for sol in solutions]
    volumes = [sol.offload_bits for sol in solutions]
    increments_used = [0] * n
    rejected = [False] * n
    locations = [0] * n

    def es_demand(i: int) -> float:
        transfer = volumes[i] / uplinks[i]
        return min_resources(tds[i].task.cycles_per_bit * volumes[i],
                             tds[i].task.deadline_s, transfer)

    demands = [es_demand(i) for i in range(n)]
    es_left = es.capacity_hz
    ad_left = {ad.id: ad.capacity_hz for ad in scenario.ads}

    if sum(demands) <= es.capacity_hz:
        # Everything fits: keep the unmodified per-TD solutions.
        es_left -= sum(demands)
    else:
        helpers = sorted(recruited, key=lambda rec: rec.ad.id)
        relays = {rec.ad.id: relay_rate(channel, rec.ad) for rec in helpers}

        def sort_key(i: int):
            try:
                prio = task_priority(tds[i], econ, es.energy_per_cycle,
                                     prices[i], volumes[i], uplinks[i])
            except ValueError:
                prio = -math.inf  # nothing to place, or server-infeasible
            return (-prio, tds[i].id)

        order = sorted(range(n), key=sort_key) if prioritize \
            else sorted(range(n), key=lambda i: tds[i].id)

        for i in order:
            base_price = prices[i]
            cap = caps[i]
            step = (cap - base_price) / policy.steps
            while True:
                if demands[i] <= es_left:
                    locations[i] = 0
                    es_left -= demands[i]
                    break

                candidates = []
                for rec in helpers:
                    transfer = volumes[i] / uplinks[i] + volumes[i] / relays[rec.ad.id]
                    need = min_resources(tds[i].task.cycles_per_bit * volumes[i],
                                         tds[i].task.deadline_s, transfer)
                    if need > ad_left[rec.ad.id]:
                        continue
                    utility = ad_priority(tds[i], rec.reward_per_cycle, econ,
                                          channel.bs_power_w, prices[i], volumes[i],
                                          relays[rec.ad.id])
                    if utility >= 0.0:
                        candidates.append((utility, rec.ad.id, need))
                if candidates:
                    if first_fit_ad:
                        _, chosen, need = min(candidates, key=lambda c: c[1])
                    else:
                        best = max(candidates, key=lambda c: (c[0], -c[1]))
                        _, chosen, need = best
                    locations[i] = chosen
                    ad_left[chosen] -= need
                    break

                if not increments or step <= 0:
                    rejected[i] = True
                    locations[i] = 0
                    volumes[i] = 0.0
                    demands[i] = 0.0
                    break

                increments_used[i] += 1
                prices[i] = base_price + increments_used[i] * step
                volumes[i] = best_response(contexts[i], prices[i])
                demands[i] = es_demand(i)
                if increments_used[i] >= policy.steps or prices[i] >= cap:
                    rejected[i] = True
                    locations[i] = 0
                    prices[i] = cap
                    volumes[i] = 0.0
                    demands[i] = 0.0
                    break

    decisions = tuple(
        OffloadDecision(price_per_cycle=prices[i], offload_bits=volumes[i],
                        location=locations[i])
        for i in range(n)
    )

    reward_by_id = {rec.ad.id: rec.reward_per_cycle for rec in recruited}
    relay_by_id = {ad.id: relay_rate(channel, ad) for ad in scenario.ads}
    es_task_utilities = []
    assigned_cycles = {ad.id: 0.0 for ad in scenario.ads}
    for i, dec in enumerate(decisions):
        phi = tds[i].task.cycles_per_bit
        if dec.location == 0:
            es_task_utilities.append(model.es_local_utility(
                dec.price_per_cycle, es.energy_per_cycle, gamma, phi, dec.offload_bits))
        else:
            es_task_utilities.append(model.es_delegation_utility(
                dec.price_per_cycle, reward_by_id[dec.location], gamma,
                channel.bs_power_w, phi, dec.offload_bits, relay_by_id[dec.location]))
            assigned_cycles[dec.location] += phi * dec.offload_bits

    td_utilities = tuple(
        model.td_utility(tds[i], econ, decisions[i], uplinks[i]) for i in range(n)
    )
    ad_utilities = tuple(
        model.ad_utility(reward_by_id.get(ad.id, ad.bid_per_cycle), ad.bid_per_cycle,
                         assigned_cycles[ad.id])
        for ad in scenario.ads
    )

    return AllocationOutcome(
        decisions=decisions,
        ledger=ResourceLedger(es_remaining=es_left, ad_remaining=dict(ad_left)),
        es_utility=sum(es_task_utilities),
        td_utilities=td_utilities,
        ad_utilities=ad_utilities,
        ad_assigned_cycles=tuple(assigned_cycles[ad.id] for ad in scenario.ads),
        price_increment_counts=tuple(increments_used),
        es_task_utilities=tuple(es_task_utilities),
        rejected=tuple(rejected),
    )


# --------------------------------------------------------------------------
# Constraint replay
# --------------------------------------------------------------------------


def check_outcome(scenario: Scenario, recruited: list[RecruitedAd],
                  outcome: AllocationOutcome, *, rel_tol: float = 1e-9) -> None:
    """Replay every feasibility and rationality constraint from the formulas.

    Verifies placement validity, volume bounds, per-location capacity sums
    against the returned ledger, server rationality for every assignment,
    non-negative TD utility, and consistency of the recorded utilities.
    Price bounds are enforced for every served decision (positive volume);
    a zero-volume decision carries no transaction, so its price is only
    required to be non-negative (a priced-out TD records its cap, which may
    sit below the floor).

    Raises AssertionError on the first violated constraint.
    """
    tds, es, channel, econ = scenario.tds, scenario.es, scenario.channel, scenario.econ
    gamma = econ.energy_unit_cost
    contexts = follower_contexts(scenario)
    floor = gamma * es.energy_per_cycle
    reward_by_id = {rec.ad.id: rec.reward_per_cycle for rec in recruited}
    ad_by_id = {ad.id: ad for ad in scenario.ads}

    assert len(outcome.decisions) == len(tds), "one decision per TD required"

    es_total = 0.0
    ad_totals = {ad.id: 0.0 for ad in scenario.ads}
    ad_cycles = {ad.id: 0.0 for ad in scenario.ads}
    for i, dec in enumerate(outcome.decisions):
        td = tds[i]
        cap = price_cap(contexts[i])
        assert dec.location == 0 or dec.location in ad_by_id, \
            f"TD {i}: unknown location {dec.location}"
        assert -1e-9 <= dec.offload_bits <= td.task.size_bits * (1 + rel_tol), \
            f"TD {i}: offload volume outside [0, task size]"
        if dec.offload_bits > 0:
            assert floor - 1e-15 <= dec.price_per_cycle <= cap * (1 + rel_tol) + 1e-15, \
                f"TD {i}: served price {dec.price_per_cycle} outside [{floor}, {cap}]"
        else:
            assert dec.price_per_cycle >= 0, f"TD {i}: negative price"

        if dec.location == 0:
            transfer = dec.offload_bits / contexts[i].uplink_bps
            demand = min_resources(td.task.cycles_per_bit * dec.offload_bits,
                                   td.task.deadline_s, transfer)
            assert not math.isinf(demand), f"TD {i}: assigned to the server but infeasible there"
            es_total += demand
            profit = model.es_local_utility(dec.price_per_cycle, es.energy_per_cycle,
                                            gamma, td.task.cycles_per_bit, dec.offload_bits)
        else:
            assert dec.location in reward_by_id, \
                f"TD {i}: delegated to AD {dec.location} which was never recruited"
            assert dec.offload_bits > 0, f"TD {i}: empty delegation"
            relay = relay_rate(channel, ad_by_id[dec.location])
            transfer = dec.offload_bits / contexts[i].uplink_bps + dec.offload_bits / relay
            demand = min_resources(td.task.cycles_per_bit * dec.offload_bits,
                                   td.task.deadline_s, transfer)
            assert not math.isinf(demand), f"TD {i}: delegated but infeasible on AD {dec.location}"
            ad_totals[dec.location] += demand
            ad_cycles[dec.location] += td.task.cycles_per_bit * dec.offload_bits
            profit = model.es_delegation_utility(dec.price_per_cycle,
                                                 reward_by_id[dec.location], gamma,
                                                 channel.bs_power_w, td.task.cycles_per_bit,
                                                 dec.offload_bits, relay)
        assert profit >= -1e-9, f"TD {i}: server rationality violated ({profit})"
        assert math.isclose(profit, outcome.es_task_utilities[i], rel_tol=rel_tol, abs_tol=1e-12), \
            f"TD {i}: recorded server utility does not replay"

        realized = model.td_utility(td, econ, dec, contexts[i].uplink_bps)
        assert realized >= -1e-9, f"TD {i}: negative device utility {realized}"
        assert math.isclose(realized, outcome.td_utilities[i], rel_tol=rel_tol, abs_tol=1e-12), \
            f"TD {i}: recorded device utility does not replay"

    cap_tol = rel_tol * es.capacity_hz
    assert es_total <= es.capacity_hz + cap_tol, "server capacity exceeded"
    assert math.isclose(outcome.ledger.es_remaining, es.capacity_hz - es_total,
                        rel_tol=rel_tol, abs_tol=cap_tol), "server ledger does not replay"
    for ad in scenario.ads:
        assert ad_totals[ad.id] <= ad.capacity_hz * (1 + rel_tol), \
            f"AD {ad.id}: capacity exceeded"
        assert math.isclose(outcome.ledger.ad_remaining[ad.id],
                            ad.capacity_hz - ad_totals[ad.id],
                            rel_tol=rel_tol, abs_tol=rel_tol * ad.capacity_hz), \
            f"AD {ad.id}: ledger does not replay"

    for k, ad in enumerate(scenario.ads):
        assert math.isclose(outcome.ad_assigned_cycles[k], ad_cycles[ad.id],
                            rel_tol=rel_tol, abs_tol=1e-6), \
            f"AD {ad.id}: recorded assigned cycles do not replay"
        reward = reward_by_id.get(ad.id, ad.bid_per_cycle)
        expect = model.ad_utility(reward, ad.bid_per_cycle, ad_cycles[ad.id])
        assert math.isclose(outcome.ad_utilities[k], expect,
                            rel_tol=rel_tol, abs_tol=1e-12), \
            f"AD {ad.id}: recorded utility does not replay"
        assert outcome.ad_utilities[k] >= -1e-12, f"AD {ad.id}: negative utility"

    assert math.isclose(outcome.es_utility, model.es_total_utility(outcome),
                        rel_tol=rel_tol, abs_tol=1e-9), "total server utility does not replay"

    for i, dec in enumerate(outcome.decisions):
        if outcome.rejected[i]:
            assert dec.offload_bits == 0.0 and dec.location == 0, \
                f"TD {i}: rejected but still assigned"
