"""Domain types and the pure formula layer of the edge-compute market.

Three kinds of actors trade computation: task devices (TDs) that offload
data, an edge server (ES) that prices and places the offloaded work, and
auxiliary devices (ADs) that the ES can pay to process work it cannot fit.
Everything in this module is a pure function of explicit arguments, so each
formula can be checked in isolation. Monetary values are in $, data in bits,
compute in CPU cycles, rates in cycles/s or bits/s, time in seconds.

Infeasibility of a deadline (transfer alone already too slow) is expressed
as a value, ``math.inf``, rather than an exception: the allocator treats it
as "this processing location is excluded".
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InfeasibleLinkError(ValueError):
    """A radio link with zero rate was asked to carry traffic."""


# --------------------------------------------------------------------------
# Domain types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChannelParams:
    """Shared radio environment between devices and the base station.

    ``pathloss_decay`` selects the conventional decaying gain
    ``fading * d**(-pathloss_exp)``; setting it False evaluates the literal
    growing form ``fading * d**(+pathloss_exp)`` for comparison runs.
    """

    bandwidth_hz: float
    noise_w: float
    fading: float
    pathloss_exp: float
    bs_power_w: float
    pathloss_decay: bool = True

    def __post_init__(self):
        for name in ("bandwidth_hz", "noise_w", "fading", "pathloss_exp", "bs_power_w"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ChannelParams.{name} must be > 0")


@dataclass(frozen=True)
class TaskSpec:
    """One computation task: payload size, per-bit complexity, and deadline."""

    size_bits: float
    cycles_per_bit: float
    total_cycles: float
    deadline_s: float

    def __post_init__(self):
        if self.size_bits <= 0:
            raise ValueError("task size must be > 0")
        if self.cycles_per_bit <= 0:
            raise ValueError("cycles_per_bit must be > 0")
        if self.deadline_s <= 0:
            raise ValueError("deadline must be > 0")
        if self.total_cycles != self.cycles_per_bit * self.size_bits:
            raise ValueError("total_cycles must equal cycles_per_bit * size_bits")

    @classmethod
    def make(cls, size_bits: float, cycles_per_bit: float, deadline_s: float) -> "TaskSpec":
        return cls(size_bits, cycles_per_bit, cycles_per_bit * size_bits, deadline_s)


@dataclass(frozen=True)
class TdProfile:
    """A task device: owns one task and best-responds to posted prices."""

    id: int
    task: TaskSpec
    tx_power_w: float
    satisfaction: float          # $ scale of the log offloading benefit
    energy_per_cycle: float      # J/cycle of local processing
    completion_value: float      # $ value of getting the task done
    bs_distance_m: float

    def __post_init__(self):
        if self.tx_power_w <= 0:
            raise ValueError("tx_power_w must be > 0")
        if self.satisfaction <= 0:
            raise ValueError("satisfaction must be > 0")
        if self.energy_per_cycle <= 0:
            raise ValueError("energy_per_cycle must be > 0")
        if self.bs_distance_m <= 0:
            raise ValueError("bs_distance_m must be > 0")


@dataclass(frozen=True)
class AdProfile:
    """An auxiliary device offering spare cycles at a bid price per cycle."""

    id: int
    capacity_hz: float
    bid_per_cycle: float
    bs_distance_m: float

    def __post_init__(self):
        if self.capacity_hz <= 0:
            raise ValueError("capacity_hz must be > 0")
        if self.bid_per_cycle < 0:
            raise ValueError("bid_per_cycle must be >= 0")
        if self.bs_distance_m <= 0:
            raise ValueError("bs_distance_m must be > 0")


@dataclass(frozen=True)
class EsProfile:
    """The edge server: total capacity and its own energy cost per cycle.

    Scenario validation additionally requires ``energy_per_cycle`` to exceed
    every TD's energy per cycle, which is what makes the leader's pricing
    problem strictly concave.
    """

    capacity_hz: float
    energy_per_cycle: float

    def __post_init__(self):
        if self.capacity_hz <= 0:
            raise ValueError("capacity_hz must be > 0")
        if self.energy_per_cycle <= 0:
            raise ValueError("energy_per_cycle must be > 0")


@dataclass(frozen=True)
class EconomicParams:
    energy_unit_cost: float  # $ per joule

    def __post_init__(self):
        if self.energy_unit_cost <= 0:
            raise ValueError("energy_unit_cost must be > 0")


@dataclass(frozen=True)
class OffloadDecision:
    """The solved strategy for one TD: posted price, volume, and placement.

    ``location`` 0 means the edge server itself, j >= 1 means AD with id j.
    """

    price_per_cycle: float
    offload_bits: float
    location: int

    def __post_init__(self):
        if self.offload_bits < 0:
            raise ValueError("offload_bits must be >= 0")
        if self.location < 0:
            raise ValueError("location must be >= 0")


# --------------------------------------------------------------------------
# Radio formulas
# --------------------------------------------------------------------------


def channel_gain(fading: float, distance_m: float, pathloss_exp: float,
                 decay: bool = True) -> float:
    """Distance-dependent channel gain ``fading * distance**(-pathloss_exp)``.

    With ``decay=False`` the exponent is applied with a positive sign, kept
    only as a comparison switch for the non-decaying reading.
    """
    if distance_m <= 0:
        raise ValueError("distance must be > 0")
    if fading <= 0:
        raise ValueError("fading must be > 0")
    exponent = -pathloss_exp if decay else pathloss_exp
    return fading * distance_m ** exponent


def link_rate(channel: ChannelParams, tx_power_w: float, gain: float) -> float:
    """Shannon rate ``W * log2(1 + p*g/N0)`` in bits/s; zero power gives 0."""
    if tx_power_w < 0:
        raise ValueError("tx_power_w must be >= 0")
    return channel.bandwidth_hz * math.log2(1.0 + tx_power_w * gain / channel.noise_w)


def uplink_rate(channel: ChannelParams, td: TdProfile) -> float:
    """Rate from a TD up to the base station / edge server."""
    gain = channel_gain(channel.fading, td.bs_distance_m, channel.pathloss_exp,
                        decay=channel.pathloss_decay)
    return link_rate(channel, td.tx_power_w, gain)


def relay_rate(channel: ChannelParams, ad: AdProfile) -> float:
    """Rate from the base station down to an AD (the delegation relay hop)."""
    gain = channel_gain(channel.fading, ad.bs_distance_m, channel.pathloss_exp,
                        decay=channel.pathloss_decay)
    return link_rate(channel, channel.bs_power_w, gain)


# --------------------------------------------------------------------------
# Timing and resource formulas
# --------------------------------------------------------------------------


def es_transfer_time(offload_bits: float, uplink_bps: float) -> float:
    """Upload time of the offloaded bits to the edge server."""
    if uplink_bps <= 0:
        raise InfeasibleLinkError("uplink rate must be > 0")
    return offload_bits / uplink_bps


def ad_transfer_time(offload_bits: float, uplink_bps: float, relay_bps: float) -> float:
    """Two-hop transfer time: TD up to the base station, then out to an AD."""
    if uplink_bps <= 0 or relay_bps <= 0:
        raise InfeasibleLinkError("both hop rates must be > 0")
    return offload_bits / uplink_bps + offload_bits / relay_bps


def min_resources(cycles: float, deadline_s: float, transfer_s: float) -> float:
    """Smallest compute rate (cycles/s) that finishes within the deadline.

    Returns ``math.inf`` when the transfer alone exceeds the deadline and
    there is work to do: the location cannot serve this task. An empty task
    needs nothing regardless of timing.
    """
    if cycles < 0:
        raise ValueError("cycles must be >= 0")
    if cycles == 0:
        return 0.0
    if transfer_s >= deadline_s:
        return math.inf
    return cycles / (deadline_s - transfer_s)


# --------------------------------------------------------------------------
# Utility formulas
# --------------------------------------------------------------------------


def td_satisfaction(satisfaction: float, offload_bits: float) -> float:
    """Logarithmic benefit of shedding load: ``w * ln(1 + bits)``."""
    if offload_bits < 0:
        raise ValueError("offload_bits must be >= 0")
    return satisfaction * math.log1p(offload_bits)


def td_payment(price_per_cycle: float, cycles_per_bit: float, offload_bits: float) -> float:
    """Fee paid to the edge server for the offloaded cycles."""
    return price_per_cycle * cycles_per_bit * offload_bits


def td_energy_cost(td: TdProfile, econ: EconomicParams, offload_bits: float,
                   uplink_bps: float) -> float:
    """$ cost of processing the rest locally plus transmitting the offload."""
    gamma = econ.energy_unit_cost
    local = gamma * td.energy_per_cycle * td.task.cycles_per_bit * (td.task.size_bits - offload_bits)
    transmit = gamma * td.tx_power_w * offload_bits / uplink_bps
    return local + transmit


def td_utility(td: TdProfile, econ: EconomicParams, decision: OffloadDecision,
               uplink_bps: float) -> float:
    """Net utility of a TD: satisfaction + completion value - energy - fee."""
    return (
        td_satisfaction(td.satisfaction, decision.offload_bits)
        + td.completion_value
        - td_energy_cost(td, econ, decision.offload_bits, uplink_bps)
        - td_payment(decision.price_per_cycle, td.task.cycles_per_bit, decision.offload_bits)
    )


def es_local_utility(price_per_cycle: float, es_energy_per_cycle: float,
                     energy_unit_cost: float, cycles_per_bit: float,
                     offload_bits: float) -> float:
    """Edge-server profit on a task it processes itself: margin times cycles."""
    margin = price_per_cycle - energy_unit_cost * es_energy_per_cycle
    return margin * cycles_per_bit * offload_bits


def es_delegation_utility(price_per_cycle: float, reward_per_cycle: float,
                          energy_unit_cost: float, bs_power_w: float,
                          cycles_per_bit: float, offload_bits: float,
                          relay_bps: float) -> float:
    """Edge-server profit on a delegated task: revenue minus AD pay and relay energy."""
    if relay_bps <= 0:
        raise InfeasibleLinkError("relay rate must be > 0")
    revenue = price_per_cycle * cycles_per_bit * offload_bits
    reward = reward_per_cycle * cycles_per_bit * offload_bits
    relay_energy = energy_unit_cost * bs_power_w * offload_bits / relay_bps
    return revenue - reward - relay_energy


def es_total_utility(outcome) -> float:
    """Sum of the edge server's per-task profits recorded in an allocation.

    Accepts any object exposing ``decisions`` and ``es_task_utilities`` of
    equal length, one entry per TD (each task has exactly one location).
    """
    decisions = outcome.decisions
    per_task = outcome.es_task_utilities
    if len(decisions) != len(per_task):
        raise ValueError("outcome decisions and per-task utilities disagree in length")
    return sum(per_task)


def ad_utility(reward_per_cycle: float, bid_per_cycle: float, assigned_cycles: float) -> float:
    """An AD's profit: reward margin over its bid, times cycles served."""
    if assigned_cycles < 0:
        raise ValueError("assigned_cycles must be >= 0")
    return (reward_per_cycle - bid_per_cycle) * assigned_cycles
