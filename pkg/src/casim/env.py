"""Deterministic network environment: SINR, rates, delays, QoS state and the
step that scores a joint allocation.

The channel is static inverse-square geometry scaled by the configured
reference gain; UEs of different gNBs interfere only on identical (CC, RB)
indices. Everything is a pure function of the allocation, the config and an
explicit random stream (used only for SINR estimation errors).
"""

from dataclasses import dataclass

import numpy as np

from . import si
from .alloc import allocate_rbs, per_rb_power
from .channel import apply_sinr_estimation_error, channel_gain, ue_delay_and_state
from .config import SI_SCC
from .errors import ConstraintViolation

POWER_REL_TOL = 1e-9


@dataclass
class AllocationState:
    """Joint decision for one cycle across the whole network."""
    alpha: np.ndarray           # (K, M) CC activation bits
    beta: np.ndarray            # (K, M, N) RB allocation bits
    ue_power: np.ndarray        # (K,) total transmit power, W
    per_rb_power: np.ndarray    # (K, M, N) W
    active: np.ndarray          # (K,) bool


@dataclass
class EnvStep:
    rates: np.ndarray           # (K,) bit/s as observed by the system (CSI view)
    rates_true: np.ndarray      # (K,) bit/s from the unperturbed SINR
    delays: np.ndarray          # (K,) s, inf when the rate is zero
    qos_state: np.ndarray       # (K,) int8
    p_si: np.ndarray            # (K,) W at the UE receiver input
    sinr: np.ndarray            # (K, M, N) true SINR, 0 on unallocated RBs
    rb_counts: np.ndarray       # (K, M)
    cc_power: np.ndarray        # (K, M) W


def gain_matrix(cfg):
    """Path gains (gNB, UE) including the configured reference scale."""
    g = np.empty((cfg.num_gnbs, cfg.num_ues))
    for b, gpos in enumerate(cfg.gnb_positions):
        for i, upos in enumerate(cfg.ue_positions):
            g[b, i] = cfg.path_gain_scale * channel_gain(upos, gpos)
    return g


def validate_allocation(alloc, cfg):
    """Raise ConstraintViolation naming the first violated model invariant."""
    k, m, n = alloc.beta.shape
    power_from_rbs = (alloc.beta * alloc.per_rb_power).sum(axis=(1, 2))
    for i in range(k):
        if not alloc.active[i]:
            if alloc.ue_power[i] != 0 or alloc.beta[i].any():
                raise ConstraintViolation(
                    f"inactive UE {i} holds power or RBs")
            continue
        if alloc.alpha[i, 0] != 1:
            raise ConstraintViolation(
                f"PCC always active violated: alpha[{i},0] = 0 for an active UE")
        if alloc.ue_power[i] > cfg.p_max * (1 + POWER_REL_TOL):
            raise ConstraintViolation(
                f"maximum transmit power violated: UE {i} at {alloc.ue_power[i]} W "
                f"> p_max {cfg.p_max} W")
        ref = max(alloc.ue_power[i], 1e-300)
        if abs(power_from_rbs[i] - alloc.ue_power[i]) > POWER_REL_TOL * ref:
            raise ConstraintViolation(
                f"power closure violated: UE {i} RB powers sum to "
                f"{power_from_rbs[i]} W, declared {alloc.ue_power[i]} W")
        if np.any((alloc.beta[i] == 1) & (alloc.alpha[i][:, None] == 0)):
            raise ConstraintViolation(
                f"RB on deactivated CC: UE {i} has beta=1 where alpha=0")
    serving = np.asarray(cfg.serving_gnb)
    for b in range(cfg.num_gnbs):
        mine = serving == b
        if np.any(alloc.beta[mine].sum(axis=0) > 1):
            raise ConstraintViolation(
                f"RB exclusivity violated: an RB of gNB {b} is assigned to "
                "two of its UEs")


def compute_sinr(alloc, cfg):
    """SINR tensor (K, M, N), zero on unallocated RBs.

    gamma[i,j,k] = p[i,j,k] h(b(i),i) / (sum_{i'!=i} beta[i',j,k] p[i',j,k]
    h(b(i),i') + noise); co-channel interference only on identical (CC, RB).
    """
    gains = gain_matrix(cfg)
    tx = alloc.beta * alloc.per_rb_power                    # (K, M, N)
    rx_at = np.einsum("imn,bi->bmn", tx, gains)             # total arriving per gNB
    serving = np.asarray(cfg.serving_gnb)
    own = tx * gains[serving, np.arange(cfg.num_ues)][:, None, None]
    interference = rx_at[serving] - own
    sinr = own / (interference + cfg.noise_power_ul)
    return sinr * alloc.beta


def ue_total_rate(alloc, sinr, cfg):
    """Total throughput per UE: sum of alpha * beta * B log2(1 + sinr)."""
    per_rb = cfg.rb_bandwidth * np.log2(1.0 + sinr)
    return (alloc.alpha[:, :, None] * alloc.beta * per_rb).sum(axis=(1, 2))


def self_interference(alloc, cfg, si_conflict=True):
    """Second-harmonic SI power per UE from the SI SCC's allocated power.

    The allocated power is radiated power; the tone amplitude is formed from
    the PA-input power (radiated / G) before the Table-row harmonic maths.
    """
    k = alloc.beta.shape[0]
    out = np.zeros(k)
    if not si_conflict or cfg.num_ccs <= SI_SCC:
        return out
    scc_power = (alloc.beta[:, SI_SCC] * alloc.per_rb_power[:, SI_SCC]).sum(axis=1)
    for i in range(k):
        if scc_power[i] > 0:
            out[i] = si.scc_self_interference(
                scc_power[i], cfg.pa_gain, cfg.c2, cfg.coupling_loss[i])
    return out


def env_step(alloc, cfg, si_conflict=True, csi_error=None, rng=None, csi_field=None):
    """Score one allocation: rates, delays, QoS bits and SI powers.

    With csi_error set, the SINRs driving the observed rates (and thus the
    delay/QoS state the agents react to) carry a Gaussian dB estimation error,
    either drawn from `rng` or supplied as a precomputed (K, M, N) dB field;
    rates_true keeps the unperturbed values.
    """
    validate_allocation(alloc, cfg)
    sinr = compute_sinr(alloc, cfg)
    rates_true = ue_total_rate(alloc, sinr, cfg)
    if csi_error is not None:
        sinr_db = 10.0 * np.log10(np.where(sinr > 0, sinr, 1.0))
        if csi_field is not None:
            meas_db = sinr_db + csi_field
        else:
            meas_db = apply_sinr_estimation_error(
                sinr_db, csi_error.bias_db, csi_error.std_db, rng)
        sinr_meas = np.where(sinr > 0, 10.0 ** (meas_db / 10.0), 0.0)
        rates = ue_total_rate(alloc, sinr_meas, cfg)
    else:
        rates = rates_true
    delays, qos = ue_delay_and_state(rates, cfg.q_hat, cfg.d_qos)
    qos = qos * alloc.active
    p_si = self_interference(alloc, cfg, si_conflict)
    return EnvStep(
        rates=rates,
        rates_true=rates_true,
        delays=delays,
        qos_state=qos.astype(np.int8),
        p_si=p_si,
        sinr=sinr,
        rb_counts=alloc.beta.sum(axis=2).astype(np.int32),
        cc_power=(alloc.beta * alloc.per_rb_power).sum(axis=2),
    )


def build_allocation(cfg, alpha_ext_by_gnb, powers, active=None):
    """Assemble the global AllocationState from per-gNB extended CC vectors.

    powers are the UEs' total radiated powers (W); RBs are laid out by the
    round-robin allocator and each UE's power splits uniformly over its RBs.
    """
    k, m, n = cfg.num_ues, cfg.num_ccs, cfg.rbs_per_cc
    if active is None:
        active = np.ones(k, dtype=bool)
    active = np.asarray(active, dtype=bool)
    alpha = np.zeros((k, m), dtype=np.int8)
    beta = np.zeros((k, m, n), dtype=np.int8)
    prb = np.zeros((k, m, n))
    ue_power = np.zeros(k)
    plans = {}
    for b in range(cfg.num_gnbs):
        ues = cfg.ues_of_gnb(b)
        plan = allocate_rbs(alpha_ext_by_gnb[b], cfg, ues=ues,
                            active=[active[i] for i in ues])
        plans[b] = plan
        for lu, i in enumerate(ues):
            if not active[i]:
                continue
            beta[i] = plan.beta()[lu]
            alpha[i] = (plan.rb_counts[lu] > 0).astype(np.int8)
            alpha[i, 0] = 1
            p = float(powers[i]) if plan.ue_total(lu) else 0.0
            prb[i] = per_rb_power(p, plan, lu)
            ue_power[i] = p
    return AllocationState(alpha, beta, ue_power, prb, active), plans
