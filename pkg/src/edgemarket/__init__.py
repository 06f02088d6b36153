"""Incentive-driven pricing and task allocation for device-assisted edge computing.

A leader (edge server) posts per-device prices for computation, task devices
best-respond with offload volumes, auxiliary devices are recruited through a
reverse second-price auction, and a priority-driven heuristic places tasks
under capacity constraints. Includes baseline strategies and a seeded sweep
harness.
"""

from .allocator import (
    AllocationOutcome,
    IncrementPolicy,
    ResourceLedger,
    allocate,
    check_outcome,
    solve_all,
)
from .auction import RecruitedAd, vickrey_rewards
from .baselines import (
    allocate_no_priority,
    allocate_no_recruitment,
    allocate_uniform_pricing,
)
from .harness import ExperimentResult, emit_csv, run_one, sweep
from .model import (
    AdProfile,
    ChannelParams,
    EconomicParams,
    EsProfile,
    OffloadDecision,
    TaskSpec,
    TdProfile,
)
from .scenario import (
    DEFAULT_CONFIG,
    CalibrationError,
    Scenario,
    ScenarioConfig,
    calibrate,
    generate,
    load_config,
    save_config,
)
from .stackelberg import (
    FollowerContext,
    LeaderContext,
    PriceSolution,
    best_response,
    price_cap,
    solve_price,
)

__all__ = [
    "AdProfile", "AllocationOutcome", "CalibrationError", "ChannelParams",
    "DEFAULT_CONFIG", "EconomicParams", "EsProfile", "ExperimentResult",
    "FollowerContext", "IncrementPolicy", "LeaderContext", "OffloadDecision",
    "PriceSolution", "RecruitedAd", "ResourceLedger", "Scenario",
    "ScenarioConfig", "TaskSpec", "TdProfile", "allocate",
    "allocate_no_priority", "allocate_no_recruitment",
    "allocate_uniform_pricing", "best_response", "calibrate", "check_outcome",
    "emit_csv", "generate", "load_config", "price_cap", "run_one",
    "save_config", "solve_all", "solve_price", "sweep", "vickrey_rewards",
]

__version__ = "0.1.0"
