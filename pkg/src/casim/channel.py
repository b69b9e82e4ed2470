"""Channel, rate and delay primitives shared by the environment."""

import math

import numpy as np


def channel_gain(ue_pos, gnb_pos):
    """Inverse-square geometric gain d^-2, with distance clamped at 0.1 m."""
    d = math.hypot(ue_pos[0] - gnb_pos[0], ue_pos[1] - gnb_pos[1])
    d = max(d, 0.1)
    return d ** -2


def rb_rate(gamma, bandwidth):
    """Shannon rate of one RB in bit/s."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return bandwidth * np.log2(1.0 + gamma)


def ue_delay_and_state(rates, q_hat, d_qos):
    """Delay q_hat/R per UE and the binary QoS state (1 = delay within budget).

    A zero rate gives an unbounded (inf) delay and state 0.
    """
    rates = np.asarray(rates, dtype=float)
    q = np.asarray(q_hat, dtype=float)
    with np.errstate(divide="ignore"):
        delays = np.where(rates > 0.0, q / np.maximum(rates, 1e-300), np.inf)
    state = (delays <= d_qos).astype(np.int8)
    return delays, state


def apply_sinr_estimation_error(sinr_db, bias_db, std_db, rng):
    """Perturb SINR (dB) with a Gaussian estimation error: value + bias + N(0, std^2)."""
    if std_db < 0:
        raise ValueError("std_db must be non-negative")
    sinr_db = np.asarray(sinr_db, dtype=float)
    noise = rng.normal(0.0, std_db, size=sinr_db.shape) if std_db > 0 else 0.0
    return sinr_db + bias_db + noise
