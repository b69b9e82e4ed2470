"""SI-penalized, distance-weighted per-gNB reward."""

import math
from dataclasses import dataclass


@dataclass
class RewardRecord:
    sum_rate: float             # bit/s over the gNB's UEs
    penalty_total: float        # summed distance-weighted penalties
    reward: float               # sum_rate - penalty_total


def penalty(p_si, params, ramp="db"):
    """Piecewise penalty of the SI power level.

    Zero up to theta1, omega from theta2 on, and a ramp in between. The default
    ramp interpolates the thresholds on the dB axis (they are quoted in dBm);
    ramp="linear" interpolates in watts instead.
    """
    if p_si < 0:
        raise ValueError("SI power must be non-negative")
    if p_si <= params.theta1:
        return 0.0
    if p_si >= params.theta2:
        return params.omega
    if ramp == "db":
        frac = math.log(p_si / params.theta1) / math.log(params.theta2 / params.theta1)
    elif ramp == "linear":
        frac = (p_si - params.theta1) / (params.theta2 - params.theta1)
    else:
        raise ValueError(f"unknown ramp {ramp!r}")
    return params.omega * frac


def distance_weight(d, d_max):
    """Normalized squared distance d^2/d_max^2 in (0, 1]."""
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    if d > d_max:
        raise ValueError(f"distance {d} exceeds the cell radius {d_max}")
    return (d / d_max) ** 2


def gnb_reward(rates, p_si, distances, params_list, d_max, ramp="db"):
    """Reward of one gNB: sum of UE rates minus distance-weighted SI penalties.

    Closer UEs carry a larger effective penalty (division by d^2/d_max^2).
    """
    if not (len(rates) == len(p_si) == len(distances) == len(params_list)):
        raise ValueError("per-UE inputs must have equal lengths")
    sum_rate = float(sum(rates))
    penalty_total = 0.0
    for r_si, d, params in zip(p_si, distances, params_list):
        pen = penalty(r_si, params, ramp)
        if pen:
            penalty_total += pen / distance_weight(d, d_max)
    return RewardRecord(sum_rate, penalty_total, sum_rate - penalty_total)
