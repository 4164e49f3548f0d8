"""Probabilistic per-node scaling decisions.

Every scaling period a node estimates the average load of its neighborhood
(capacity-weighted, including itself), turns the distance from the desired
load into a ratio, and then either removes itself with probability equal to
the ratio's magnitude (when under the minimum threshold) or spawns new
services (when over the maximum threshold): the integer part of the ratio
deterministically, plus one more with probability equal to the fractional
part. Inside the dead band nothing happens. Decisions use only local and
neighbor state.
"""

import math
from collections import deque
from dataclasses import dataclass


@dataclass
class ScalerParams:
    """Thresholds and periods of the scaling loop.

    load_min/load_max/load_des are fractions of capacity; load_des defaults
    to the midpoint of the band. period is the loop interval, window the
    length of the load-monitoring timeframe, both in seconds. The period
    matches the window by default: deciding more often than the window
    refreshes means repeated Bernoulli draws against the same observation,
    which turns a single removal decision into near-certain collapse.
    """

    load_min: float = 0.6
    load_max: float = 0.8
    load_des: float = 0.7
    period: float = 3.0
    window: float = 3.0

    def validate(self):
        if not (0.0 < self.load_min < self.load_des < self.load_max <= 1.0):
            raise ValueError(
                "load thresholds must satisfy 0 < min < des < max <= 1, got "
                "min=%r des=%r max=%r"
                % (self.load_min, self.load_des, self.load_max)
            )
        if self.period <= 0 or self.window <= 0:
            raise ValueError("scaler period and window must be positive")


class LoadWindow:
    """Sliding count of request arrivals over the monitoring timeframe."""

    def __init__(self, window):
        self.window = window
        self._arrivals = deque()

    def record(self, t):
        self._arrivals.append(t)

    def load(self, now, capacity):
        """Arrival rate over the window divided by capacity; may exceed 1."""
        cutoff = now - self.window
        arrivals = self._arrivals
        while arrivals and arrivals[0] <= cutoff:
            arrivals.popleft()
        return len(arrivals) / (capacity * self.window)


def neighborhood_load(own_capacity, own_load, neighbor_hints):
    """Capacity-weighted average load over the node and its neighbors.

    ``neighbor_hints`` is an iterable of (capacity, load) pairs; an isolated
    node just sees its own load.
    """
    num = own_capacity * own_load
    den = own_capacity
    for cap, load in neighbor_hints:
        num += cap * load
        den += cap
    return num / den


def compute_ratio(load_estimate, load_des):
    """Relative distance of the load estimate from the desired load."""
    return (load_estimate - load_des) / load_des


def analyze_removal(ratio, rng):
    """Decide self-removal: True with probability |ratio| (ratio <= 0)."""
    return rng.random() < -ratio


def analyze_addition(ratio, rng):
    """Number of services to add for a positive ratio.

    floor(ratio) deterministically, plus one more with probability equal to
    the fractional part, so the expected value equals the ratio.
    """
    n = math.floor(ratio)
    if rng.random() < ratio - n:
        n += 1
    return n
