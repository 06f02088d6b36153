"""Programmatic verification battery behind the CLI ``verify`` verb.

A quick, self-contained subset of the oracle checks from the test suite:
closed-form solver outputs against brute-force grid searches, the price-cap
identity, derivative consistency, auction rationality, and the constraint
replay over a small scenario grid. Each check returns (name, ok, detail).
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .allocator import check_outcome
from .auction import vickrey_rewards
from .harness import run_one, run_strategy
from .model import EconomicParams, TaskSpec, TdProfile
from .oracles import grid_best_price, grid_best_volume
from .scenario import ScenarioConfig, generate
from .stackelberg import (
    FollowerContext,
    LeaderContext,
    best_response,
    leader_marginal_utility,
    leader_utility,
    price_cap,
    solve_price,
    unclamped_best_response,
)


def random_follower_context(rng: np.random.Generator) -> tuple[FollowerContext, float]:
    """A follower context spanning wide magnitude ranges, plus a valid
    server energy per cycle above the device's."""
    q = float(10 ** rng.uniform(-10, -8.8))
    q_es = q * float(rng.uniform(1.3, 4.0))
    task = TaskSpec.make(
        size_bits=float(10 ** rng.uniform(5, 8)),
        cycles_per_bit=float(rng.uniform(50, 1000)),
        deadline_s=float(rng.uniform(0.05, 3.0)),
    )
    econ = EconomicParams(energy_unit_cost=float(10 ** rng.uniform(-1, 1)))
    td = TdProfile(
        id=0, task=task,
        tx_power_w=float(10 ** rng.uniform(-2, 0)),
        satisfaction=float(10 ** rng.uniform(-1, 5)),
        energy_per_cycle=q,
        completion_value=econ.energy_unit_cost * q * task.total_cycles * 1.5,
        bs_distance_m=float(rng.uniform(10, 500)),
    )
    ctx = FollowerContext(td=td, econ=econ, uplink_bps=float(10 ** rng.uniform(6, 9)))
    return ctx, q_es


def _check_follower(rng, rounds=200):
    worst = 0.0
    for _ in range(rounds):
        ctx, q_es = random_follower_context(rng)
        lead = LeaderContext.build(ctx, q_es)
        if lead.price_cap <= lead.price_floor:
            continue
        price = float(rng.uniform(lead.price_floor, lead.price_cap))
        grid = grid_best_volume(ctx, price, points=20_000)
        step = ctx.td.task.size_bits / (20_000 - 1)
        worst = max(worst, abs(best_response(ctx, price) - grid) / step)
    return worst <= 1.0, f"worst deviation {worst:.3f} grid steps"


def _check_leader(rng, rounds=60):
    worst = 0.0
    for _ in range(rounds):
        ctx, q_es = random_follower_context(rng)
        lead = LeaderContext.build(ctx, q_es)
        if lead.price_cap <= lead.price_floor:
            continue
        sol = solve_price(lead)
        _, grid_util = grid_best_price(lead, points=4000)
        mine = leader_utility(lead, sol.price)
        if grid_util > 0:
            worst = max(worst, (grid_util - mine) / grid_util)
    return worst <= 1e-6, f"worst shortfall {worst:.2e} relative"


def _check_cap_identity(rng, rounds=500):
    worst = 0.0
    for _ in range(rounds):
        ctx, _ = random_follower_context(rng)
        worst = max(worst, abs(unclamped_best_response(ctx, price_cap(ctx))))
    return worst <= 1e-9, f"worst pre-clamp response {worst:.2e} bits"


def _check_derivative(rng, rounds=300):
    worst = 0.0
    for _ in range(rounds):
        ctx, q_es = random_follower_context(rng)
        lead = LeaderContext.build(ctx, q_es)
        if lead.price_cap <= lead.price_floor:
            continue
        span = lead.price_cap - lead.price_floor
        h = 1e-7 * span
        price = float(rng.uniform(lead.price_floor + 2 * h, lead.price_cap - 2 * h))
        phi = ctx.td.task.cycles_per_bit
        margin = lambda p: p - ctx.econ.energy_unit_cost * q_es
        util = lambda p: margin(p) * phi * unclamped_best_response(ctx, p)
        fdiff = (util(price + h) - util(price - h)) / (2 * h)
        scale = max(abs(leader_marginal_utility(lead, lead.price_floor)),
                    abs(leader_marginal_utility(lead, lead.price_cap)))
        worst = max(worst, abs(leader_marginal_utility(lead, price) - fdiff) / scale)
    return worst <= 1e-4, f"worst relative residual {worst:.2e}"


def _check_replay(config: ScenarioConfig):
    failures = []
    for n, m, seed in [(100, 0, 0), (100, 10, 1), (130, 10, 2), (160, 30, 3)]:
        scenario = generate(replace(config, n_tds=n, n_ads=m, seed=seed))
        recruited = vickrey_rewards(list(scenario.ads))
        for strategy in ("proposed", "up", "nr", "nppi"):
            outcome = run_strategy(scenario, strategy)
            rec = [] if strategy == "nr" else recruited
            try:
                check_outcome(scenario, rec, outcome)
            except AssertionError as exc:
                failures.append(f"{strategy}@N={n},M={m}: {exc}")
    return not failures, "; ".join(failures) or "all outcomes replay"


def _check_auction(config: ScenarioConfig):
    scenario = generate(replace(config, n_ads=30, seed=5))
    recruited = vickrey_rewards(list(scenario.ads))
    ok = all(rec.reward_per_cycle >= rec.ad.bid_per_cycle for rec in recruited)
    return ok, "reward >= bid for every AD"


def _check_determinism(config: ScenarioConfig):
    a = run_one(replace(config, n_tds=120, seed=7), "proposed")
    b = run_one(replace(config, n_tds=120, seed=7), "proposed")
    same = (a.es_utility == b.es_utility and a.mean_td_utility == b.mean_td_utility
            and a.rejections == b.rejections)
    return same, "repeated run metrics identical"


def run_verification(config: ScenarioConfig, seed: int = 0):
    """Run every check; returns a list of (name, ok, detail)."""
    rng = np.random.default_rng(seed)
    results = [
        ("follower best response vs volume grid", *_check_follower(rng)),
        ("leader price vs price grid", *_check_leader(rng)),
        ("price cap zeroes the response", *_check_cap_identity(rng)),
        ("marginal utility vs finite differences", *_check_derivative(rng)),
        ("constraint replay across strategies", *_check_replay(config)),
        ("auction individual rationality", *_check_auction(config)),
        ("seeded determinism", *_check_determinism(config)),
    ]
    return results
