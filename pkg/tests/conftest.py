import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from edgemarket.model import EconomicParams, TaskSpec, TdProfile
from edgemarket.stackelberg import FollowerContext, LeaderContext

settings.register_profile(
    "deterministic",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deterministic")


def make_follower(rng: np.random.Generator) -> tuple[FollowerContext, float]:
    """Random follower context over wide magnitude ranges plus a compatible
    server energy per cycle (always above the device's)."""
    q = float(10 ** rng.uniform(-10, -8.8))
    q_es = q * float(rng.uniform(1.3, 4.0))
    task = TaskSpec.make(
        size_bits=float(10 ** rng.uniform(5, 8)),
        cycles_per_bit=float(rng.uniform(50, 1000)),
        deadline_s=float(rng.uniform(0.05, 3.0)),
    )
    econ = EconomicParams(energy_unit_cost=float(10 ** rng.uniform(-1, 1)))
    td = TdProfile(
        id=0,
        task=task,
        tx_power_w=float(10 ** rng.uniform(-2, 0)),
        satisfaction=float(10 ** rng.uniform(-1, 5)),
        energy_per_cycle=q,
        completion_value=econ.energy_unit_cost * q * task.total_cycles * 1.5,
        bs_distance_m=float(rng.uniform(10, 500)),
    )
    ctx = FollowerContext(td=td, econ=econ, uplink_bps=float(10 ** rng.uniform(6, 9)))
    return ctx, q_es


def make_leader(rng: np.random.Generator, tolerance: float = 1e-12):
    """Random leader context, resampled until the price bracket is open."""
    while True:
        ctx, q_es = make_follower(rng)
        lead = LeaderContext.build(ctx, q_es, tolerance=tolerance)
        if lead.price_cap > lead.price_floor:
            return lead


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
