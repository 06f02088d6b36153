"""Formula-layer tests: frozen oracle values, invariants, and properties."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from edgemarket.model import (
    AdProfile,
    ChannelParams,
    EconomicParams,
    EsProfile,
    InfeasibleLinkError,
    OffloadDecision,
    TaskSpec,
    TdProfile,
    ad_transfer_time,
    ad_utility,
    channel_gain,
    es_delegation_utility,
    es_local_utility,
    es_transfer_time,
    link_rate,
    min_resources,
    relay_rate,
    td_energy_cost,
    td_payment,
    td_satisfaction,
    td_utility,
    uplink_rate,
)


def _td(size=1e7, phi=100.0, deadline=1.0, p=0.1, w=1.0, q=1e-9, v=2.0, dist=100.0):
    return TdProfile(id=0, task=TaskSpec.make(size, phi, deadline), tx_power_w=p,
                     satisfaction=w, energy_per_cycle=q, completion_value=v,
                     bs_distance_m=dist)


ECON = EconomicParams(energy_unit_cost=1.0)


# --------------------------------------------------------------------------
# channel and timing
# --------------------------------------------------------------------------

def test_channel_gain_values():
    assert channel_gain(10.0, 1.0, 2.0) == 10.0
    assert channel_gain(10.0, 10.0, 2.0) == pytest.approx(0.1)
    assert channel_gain(10.0, 100.0, 0.0) == 10.0


def test_channel_gain_literal_growing_switch():
    assert channel_gain(10.0, 10.0, 2.0, decay=False) == pytest.approx(1000.0)


def test_channel_gain_rejects_bad_inputs():
    with pytest.raises(ValueError):
        channel_gain(10.0, 0.0, 2.0)
    with pytest.raises(ValueError):
        channel_gain(10.0, -1.0, 2.0)
    with pytest.raises(ValueError):
        channel_gain(0.0, 1.0, 2.0)


def test_link_rate_values():
    chan = ChannelParams(bandwidth_hz=1e6, noise_w=1.0, fading=1.0,
                         pathloss_exp=2.0, bs_power_w=1.0)
    assert link_rate(chan, 1.0, 1.0) == pytest.approx(1e6)       # SNR 1 -> log2(2)
    assert link_rate(chan, 3.0, 1.0) == pytest.approx(2e6)       # SNR 3 -> log2(4)
    assert link_rate(chan, 0.0, 123.0) == 0.0


def test_transfer_times():
    assert es_transfer_time(0.0, 1e6) == 0.0
    assert es_transfer_time(1e6, 1e6) == 1.0
    assert es_transfer_time(9999.0, 1e6) == pytest.approx(9.999e-3)
    assert ad_transfer_time(0.0, 1.0, 1.0) == 0.0
    assert ad_transfer_time(1e6, 1e6, 1e6) == 2.0
    assert ad_transfer_time(1e6, 2e6, 1e6) == pytest.approx(1.5)
    with pytest.raises(InfeasibleLinkError):
        es_transfer_time(1.0, 0.0)
    with pytest.raises(InfeasibleLinkError):
        ad_transfer_time(1.0, 1e6, 0.0)


def test_min_resources_values():
    assert min_resources(0.0, 1.0, 0.5) == 0.0
    assert min_resources(1e6, 1.0, 0.5) == pytest.approx(2e6)
    assert math.isinf(min_resources(1e6, 1.0, 1.2))
    assert math.isinf(min_resources(1e6, 1.0, 1.0))
    with pytest.raises(ValueError):
        min_resources(-1.0, 1.0, 0.5)


@given(
    cycles=st.floats(1.0, 1e12),
    extra=st.floats(0.0, 1e12),
    deadline=st.floats(0.01, 100.0),
    transfer=st.floats(0.0, 200.0),
    tighter=st.floats(0.0, 100.0),
)
def test_min_resources_monotone(cycles, extra, deadline, transfer, tighter):
    base = min_resources(cycles, deadline, transfer)
    assert min_resources(cycles + extra, deadline, transfer) >= base
    assert min_resources(cycles, deadline, transfer + tighter) >= base


# --------------------------------------------------------------------------
# utilities: frozen derived values
# --------------------------------------------------------------------------

def test_td_satisfaction_values():
    assert td_satisfaction(5.0, 0.0) == 0.0
    assert td_satisfaction(1.0, math.e - 1.0) == pytest.approx(1.0)
    assert td_satisfaction(2.0, 9999.0) == pytest.approx(18.420680743952367)


def test_td_payment_values():
    assert td_payment(1e-6, 100.0, 0.0) == 0.0
    assert td_payment(1e-6, 100.0, 9999.0) == pytest.approx(0.9999)
    assert td_payment(0.0, 100.0, 9999.0) == 0.0


def test_td_energy_cost_values():
    td = _td()
    # full offload leaves only the transmit term
    assert td_energy_cost(td, ECON, 1e7, 1e6) == pytest.approx(1.0 * 0.1 * 1e7 / 1e6)
    # full local leaves only the processing term
    assert td_energy_cost(td, ECON, 0.0, 1e6) == pytest.approx(1e-9 * 100.0 * 1e7)
    # mixed case: both terms, each checked independently
    local = 1e-9 * 100.0 * (1e7 - 9999.0)
    transmit = 0.1 * 9999.0 / 1e6
    assert local == pytest.approx(0.9990001)
    assert transmit == pytest.approx(0.0009999)
    assert td_energy_cost(td, ECON, 9999.0, 1e6) == pytest.approx(local + transmit)
    assert td_energy_cost(td, ECON, 9999.0, 1e6) == pytest.approx(1.0)


def test_td_utility_values():
    td = _td()
    idle = OffloadDecision(price_per_cycle=1e-6, offload_bits=0.0, location=0)
    assert td_utility(td, ECON, idle, 1e6) == pytest.approx(2.0 - 1e-9 * 100.0 * 1e7)
    dec = OffloadDecision(price_per_cycle=1e-6, offload_bits=9999.0, location=0)
    assert td_utility(td, ECON, dec, 1e6) == pytest.approx(9.210440371976183)


def test_es_local_utility_values():
    assert es_local_utility(2e-9, 2e-9, 1.0, 100.0, 9999.0) == 0.0
    assert es_local_utility(1e-6, 2e-9, 1.0, 100.0, 9999.0) == pytest.approx(0.9979002)
    assert es_local_utility(1e-6, 2e-9, 1.0, 100.0, 0.0) == 0.0


def test_es_delegation_utility_values():
    assert es_delegation_utility(1e-6, 5e-7, 1.0, 1.0, 100.0, 0.0, 1e6) == 0.0
    assert es_delegation_utility(1e-6, 5e-7, 1.0, 1.0, 100.0, 9999.0, 1e6) \
        == pytest.approx(0.489951)
    assert es_delegation_utility(1e-6, 1e-6, 1.0, 0.0, 100.0, 9999.0, 1e6) == 0.0


def test_es_total_utility_sums_per_task_entries():
    class Outcome:
        decisions = (
            OffloadDecision(1e-6, 9999.0, 0),
            OffloadDecision(1e-6, 9999.0, 1),
        )
        es_task_utilities = (0.9979002, 0.489951)

    from edgemarket.model import es_total_utility
    assert es_total_utility(Outcome()) == pytest.approx(1.4878512)

    class Empty:
        decisions = ()
        es_task_utilities = ()

    assert es_total_utility(Empty()) == 0.0


def test_ad_utility_values():
    assert ad_utility(2e-7, 2e-7, 1e9) == 0.0
    assert ad_utility(3e-7, 2e-7, 1e9) == pytest.approx(100.0)
    assert ad_utility(3e-7, 2e-7, 0.0) == 0.0
    with pytest.raises(ValueError):
        ad_utility(3e-7, 2e-7, -1.0)


# --------------------------------------------------------------------------
# invariants and properties
# --------------------------------------------------------------------------

def test_zero_offload_leaves_only_value_and_local_energy():
    td = _td(w=7.0, v=9.0)
    assert td_satisfaction(td.satisfaction, 0.0) == 0.0
    assert td_payment(5e-7, td.task.cycles_per_bit, 0.0) == 0.0
    dec = OffloadDecision(price_per_cycle=5e-7, offload_bits=0.0, location=0)
    expected = td.completion_value - ECON.energy_unit_cost * td.energy_per_cycle \
        * td.task.cycles_per_bit * td.task.size_bits
    assert td_utility(td, ECON, dec, 1e6) == pytest.approx(expected)


def test_dimensional_homogeneity_energy_rescaling():
    # Doubling the $/J price while halving every energy rate leaves every
    # utility unchanged: energies only enter through gamma * <energy>.
    rng = np.random.default_rng(7)
    for _ in range(200):
        w = 10 ** rng.uniform(-1, 4)
        phi = rng.uniform(50, 1000)
        size = 10 ** rng.uniform(4, 8)
        q = 10 ** rng.uniform(-10, -8)
        q_es = q * rng.uniform(1.5, 3.0)
        p = 10 ** rng.uniform(-2, 0)
        p_bs = 10 ** rng.uniform(-1, 1)
        rate = 10 ** rng.uniform(6, 9)
        price = 10 ** rng.uniform(-9, -4)
        reward = price * rng.uniform(0.0, 1.0)
        bits = rng.uniform(0, size)
        gamma = 10 ** rng.uniform(-1, 1)

        base_td = TdProfile(0, TaskSpec.make(size, phi, 1.0), p, w, q,
                            gamma * q * phi * size * 2, 100.0)
        half_td = TdProfile(0, TaskSpec.make(size, phi, 1.0), p / 2, w, q / 2,
                            gamma * q * phi * size * 2, 100.0)
        dec = OffloadDecision(price, bits, 0)
        u1 = td_utility(base_td, EconomicParams(gamma), dec, rate)
        u2 = td_utility(half_td, EconomicParams(2 * gamma), dec, rate)
        assert u1 == pytest.approx(u2, rel=1e-12)

        assert es_local_utility(price, q_es, gamma, phi, bits) \
            == pytest.approx(es_local_utility(price, q_es / 2, 2 * gamma, phi, bits), rel=1e-12)
        assert es_delegation_utility(price, reward, gamma, p_bs, phi, bits, rate) \
            == pytest.approx(
                es_delegation_utility(price, reward, 2 * gamma, p_bs / 2, phi, bits, rate),
                rel=1e-12)


def test_td_utility_strictly_concave_in_volume():
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 1000:
        w = 10 ** rng.uniform(-1, 4)
        phi = rng.uniform(50, 1000)
        size = 10 ** rng.uniform(4, 8)
        q = 10 ** rng.uniform(-10, -8)
        p = 10 ** rng.uniform(-2, 0)
        rate = 10 ** rng.uniform(6, 9)
        gamma = 10 ** rng.uniform(-1, 1)
        price = 10 ** rng.uniform(-9, -3)
        td = TdProfile(0, TaskSpec.make(size, phi, 1.0), p, w, q,
                       gamma * q * phi * size * 2, 100.0)
        econ = EconomicParams(gamma)
        l1, l2 = rng.uniform(0, size, size=2)
        if abs(l1 - l2) < 1e-6 * size:
            continue
        u = lambda l: td_utility(td, econ, OffloadDecision(price, l, 0), rate)
        assert u(0.5 * (l1 + l2)) > 0.5 * (u(l1) + u(l2))
        checked += 1


def test_es_local_utility_sign_matches_break_even():
    # profit is non-negative exactly when the price covers the energy cost
    for price in (1e-9, 2e-9, 3e-9):
        util = es_local_utility(price, 2e-9, 1.0, 100.0, 5000.0)
        assert (util >= 0) == (price >= 2e-9)


def test_uplink_and_relay_rate_compose_gain_and_rate():
    chan = ChannelParams(bandwidth_hz=1e6, noise_w=1.0, fading=2.0,
                         pathloss_exp=1.0, bs_power_w=4.0)
    td = _td(p=1.0, dist=4.0)       # gain 0.5, SNR 0.5
    assert uplink_rate(chan, td) == pytest.approx(1e6 * math.log2(1.5))
    ad = AdProfile(id=1, capacity_hz=1e9, bid_per_cycle=1e-9, bs_distance_m=2.0)
    assert relay_rate(chan, ad) == pytest.approx(1e6 * math.log2(5.0))  # SNR 4*1


# --------------------------------------------------------------------------
# type validation
# --------------------------------------------------------------------------

def test_taskspec_requires_exact_cycle_identity():
    with pytest.raises(ValueError):
        TaskSpec(size_bits=100.0, cycles_per_bit=10.0, total_cycles=999.0, deadline_s=1.0)
    spec = TaskSpec.make(100.0, 10.0, 1.0)
    assert spec.total_cycles == 1000.0


@pytest.mark.parametrize("kwargs", [
    dict(size=0.0), dict(phi=0.0), dict(deadline=0.0),
    dict(p=0.0), dict(w=0.0), dict(q=0.0), dict(dist=0.0),
])
def test_td_profile_rejects_nonpositive_fields(kwargs):
    with pytest.raises(ValueError):
        _td(**kwargs)


def test_channel_and_actor_validation():
    with pytest.raises(ValueError):
        ChannelParams(bandwidth_hz=0.0, noise_w=1.0, fading=1.0,
                      pathloss_exp=1.0, bs_power_w=1.0)
    with pytest.raises(ValueError):
        AdProfile(id=1, capacity_hz=0.0, bid_per_cycle=1e-9, bs_distance_m=10.0)
    with pytest.raises(ValueError):
        AdProfile(id=1, capacity_hz=1e9, bid_per_cycle=-1e-9, bs_distance_m=10.0)
    with pytest.raises(ValueError):
        EsProfile(capacity_hz=1e10, energy_per_cycle=0.0)
    with pytest.raises(ValueError):
        EconomicParams(energy_unit_cost=0.0)
    with pytest.raises(ValueError):
        OffloadDecision(price_per_cycle=1e-6, offload_bits=-1.0, location=0)
    with pytest.raises(ValueError):
        OffloadDecision(price_per_cycle=1e-6, offload_bits=1.0, location=-1)
