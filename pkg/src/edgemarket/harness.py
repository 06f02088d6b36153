"""Experiment harness: single runs, sweeps over device counts, CSV output.

Every run composes scenario generation, per-TD price solving, AD
recruitment and the chosen allocation strategy, then reduces the outcome to
one metric row. Rows are deterministic per (config, seed); wall time is the
one exception, so CSV emission can exclude it when byte-stable files are
needed (for example to diff two sweeps).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

from .allocator import AllocationOutcome, IncrementPolicy, allocate, solve_all
from .auction import vickrey_rewards
from .baselines import (
    allocate_no_priority,
    allocate_no_recruitment,
    allocate_uniform_pricing,
)
from .scenario import Scenario, ScenarioConfig, generate

STRATEGIES = ("proposed", "up", "nr", "nppi")

CSV_HEADER = ("strategy,n_tds,n_ads,seed,es_utility,mean_td_utility,"
              "mean_ad_utility,rejections,increments,utilization,wall_time_s")


@dataclass(frozen=True)
class ExperimentResult:
    """One metric row per (strategy, scenario)."""

    strategy: str
    n_tds: int
    n_ads: int
    seed: int
    es_utility: float
    mean_td_utility: float
    mean_ad_utility: float
    rejections: int
    increments: int
    utilization: float
    wall_time_s: float


def run_strategy(scenario: Scenario, strategy: str) -> AllocationOutcome:
    """Dispatch one allocation strategy on an already generated scenario."""
    name = strategy.lower()
    if name == "proposed":
        policy = IncrementPolicy(scenario.config_echo.steps_l)
        return allocate(scenario, solve_all(scenario),
                        vickrey_rewards(list(scenario.ads)), policy)
    if name == "up":
        return allocate_uniform_pricing(scenario, vickrey_rewards(list(scenario.ads)))
    if name == "nr":
        return allocate_no_recruitment(scenario)
    if name == "nppi":
        return allocate_no_priority(scenario, vickrey_rewards(list(scenario.ads)))
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def summarize(scenario: Scenario, strategy: str, outcome: AllocationOutcome,
              wall_time_s: float) -> ExperimentResult:
    n_tds, n_ads = len(scenario.tds), len(scenario.ads)
    used = scenario.es.capacity_hz - outcome.ledger.es_remaining
    return ExperimentResult(
        strategy=strategy.lower(),
        n_tds=n_tds,
        n_ads=n_ads,
        seed=scenario.config_echo.seed,
        es_utility=outcome.es_utility,
        mean_td_utility=sum(outcome.td_utilities) / n_tds if n_tds else 0.0,
        mean_ad_utility=sum(outcome.ad_utilities) / n_ads if n_ads else 0.0,
        rejections=sum(outcome.rejected),
        increments=sum(outcome.price_increment_counts),
        utilization=used / scenario.es.capacity_hz,
        wall_time_s=wall_time_s,
    )


def run_one(config: ScenarioConfig, strategy: str) -> ExperimentResult:
    """Generate, solve, recruit and allocate once; deterministic per seed."""
    start = time.perf_counter()
    scenario = generate(config)
    outcome = run_strategy(scenario, strategy)
    elapsed = time.perf_counter() - start
    return summarize(scenario, strategy, outcome, elapsed)


def sweep(config_template: ScenarioConfig, axis: str, values: list[int],
          seeds: list[int], strategies: list[str] | None = None) -> list[ExperimentResult]:
    """Cartesian product of (axis value, seed, strategy), in stable order."""
    if axis not in ("n_tds", "n_ads"):
        raise ValueError("axis must be 'n_tds' or 'n_ads'")
    if not values or not seeds:
        raise ValueError("values and seeds must be non-empty")
    strategies = list(strategies or STRATEGIES)
    results = []
    for value in values:
        for seed in seeds:
            config = replace(config_template, seed=seed, **{axis: value})
            for strategy in strategies:
                results.append(run_one(config, strategy))
    return results


def format_csv(results: list[ExperimentResult], include_wall_time: bool = True) -> str:
    header = CSV_HEADER if include_wall_time else CSV_HEADER.rsplit(",", 1)[0]
    lines = [header]
    for r in results:
        row = (f"{r.strategy},{r.n_tds},{r.n_ads},{r.seed},{r.es_utility!r},"
               f"{r.mean_td_utility!r},{r.mean_ad_utility!r},{r.rejections},"
               f"{r.increments},{r.utilization!r}")
        if include_wall_time:
            row += f",{r.wall_time_s!r}"
        lines.append(row)
    return "\n".join(lines) + "\n"


def emit_csv(results: list[ExperimentResult], path,
             include_wall_time: bool = True) -> None:
    """Write one row per result; floats use shortest round-trip formatting."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(results, include_wall_time=include_wall_time))


def parse_csv(text: str) -> list[ExperimentResult]:
    """Inverse of ``format_csv`` (wall time defaults to 0 when absent)."""
    lines = text.strip().splitlines()
    results = []
    for line in lines[1:]:
        parts = line.split(",")
        strategy, n_tds, n_ads, seed = parts[0], int(parts[1]), int(parts[2]), int(parts[3])
        floats = [float(x) for x in parts[4:7]]
        rejections, increments = int(parts[7]), int(parts[8])
        utilization = float(parts[9])
        wall = float(parts[10]) if len(parts) > 10 else 0.0
        results.append(ExperimentResult(
            strategy, n_tds, n_ads, seed, floats[0], floats[1], floats[2],
            rejections, increments, utilization, wall))
    return results
