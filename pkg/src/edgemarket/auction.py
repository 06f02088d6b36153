"""Reverse-Vickrey recruitment of auxiliary devices.

Every AD is recruited in one global step; what the auction fixes is the
per-cycle reward each AD will be paid if it later receives work. An AD's
reward is the lowest competing bid strictly above its own, which makes
truthful bidding the dominant strategy. The device(s) holding the strictly
highest bid have no such competitor and are paid their own bid, keeping the
rule total and individually rational (reward >= bid, always).

Per-task winner selection is not done here: the allocator picks among
recruited ADs by delegation utility.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from .model import AdProfile


@dataclass(frozen=True)
class RecruitedAd:
    ad: AdProfile
    reward_per_cycle: float

    def __post_init__(self):
        if self.reward_per_cycle < self.ad.bid_per_cycle:
            raise ValueError("reward below bid violates individual rationality")


def vickrey_rewards(ads: list[AdProfile]) -> list[RecruitedAd]:
    """Fix every AD's per-cycle reward at the next bid strictly above its own.

    Output order matches input order; ties and the maximum bid fall back to
    the AD's own bid. Deterministic and order-equivariant.
    """
    distinct = sorted({ad.bid_per_cycle for ad in ads})
    recruited = []
    for ad in ads:
        k = bisect_right(distinct, ad.bid_per_cycle)
        reward = distinct[k] if k < len(distinct) else ad.bid_per_cycle
        recruited.append(RecruitedAd(ad=ad, reward_per_cycle=reward))
    return recruited
