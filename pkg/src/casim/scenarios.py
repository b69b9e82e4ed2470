"""Named scenario presets for every experiment family the harness reproduces."""

import math
from dataclasses import replace

from .config import (AgentHyperparams, CsiError, Event, NetworkConfig, Scenario,
                     db_to_linear, dbm_to_watts)
from .errors import ConfigError

_COUPLING_35 = db_to_linear(35.0)
_THETA1 = dbm_to_watts(-100.0)
_THETA2 = dbm_to_watts(-95.0)


def _single_ue(omega=1e7):
    return NetworkConfig(
        gnb_positions=[(0.0, 0.0)],
        ue_positions=[(25.0, 0.0)],
        serving_gnb=[0],
        coupling_loss=[_COUPLING_35],
        theta1=[_THETA1], theta2=[_THETA2], omega=[omega],
    )


def _two_ue(d1=25.0, d2=25.0, omega=(0.625e7, 0.625e7)):
    return NetworkConfig(
        gnb_positions=[(0.0, 0.0)],
        ue_positions=[(d1, 0.0), (-d2, 0.0)],
        serving_gnb=[0, 0],
        coupling_loss=[_COUPLING_35, _COUPLING_35],
        theta1=[_THETA1] * 2, theta2=[_THETA2] * 2, omega=list(omega),
    )


def _res(cfg, n_m):
    return replace(cfg, rb_resolution=n_m)


def _family(prefix, base_cfg, episodes=200):
    """The five canonical variants: No-SI, HA and soft avoidance at each resolution."""
    hp = AgentHyperparams(episodes=episodes)
    return {
        f"{prefix}_no_si": Scenario(f"{prefix}_no_si", _res(base_cfg, 1), hp, si_mode="none"),
        f"{prefix}_ha": Scenario(f"{prefix}_ha", _res(base_cfg, 1), hp, si_mode="hard_avoid"),
        f"{prefix}_sa_res50": Scenario(f"{prefix}_sa_res50", _res(base_cfg, 1), hp),
        f"{prefix}_sa_res25": Scenario(f"{prefix}_sa_res25", _res(base_cfg, 2), hp),
        f"{prefix}_sa_res10": Scenario(f"{prefix}_sa_res10", _res(base_cfg, 5), hp),
    }


def _build_registry():
    reg = {}
    reg.update(_family("single_ue", _single_ue()))
    reg.update(_family("two_ue_eq", _two_ue()))

    # non-equidistant pairs: near UE gets the softer ceiling
    neq = _two_ue(25.0, 35.0, omega=(0.5e7, 1e7))
    reg["two_ue_neq_sa_res25"] = Scenario(
        "two_ue_neq_sa_res25", _res(neq, 2), AgentHyperparams())
    far = _two_ue(15.0, 45.0, omega=(0.5e7, 1e7))
    reg["two_ue_neq_far_sa_res10"] = Scenario(
        "two_ue_neq_far_sa_res10", _res(far, 5), AgentHyperparams())

    # online adaptation: the second UE leaves after episode 50, returns after 75
    reg["two_ue_exit_rejoin"] = Scenario(
        "two_ue_exit_rejoin", _two_ue(), AgentHyperparams(), si_mode="none",
        events=[Event(51, "ue_exit", ue=1), Event(76, "ue_join", ue=1)])

    # shifted penalty thresholds (-105/-100 dBm) with two coupling losses
    for lc_db in (35, 40):
        cfg = replace(
            _two_ue(), rb_resolution=2,
            theta1=[dbm_to_watts(-105.0)] * 2, theta2=[dbm_to_watts(-100.0)] * 2,
            coupling_loss=[db_to_linear(float(lc_db))] * 2)
        name = f"penalty_shift_lc{lc_db}"
        reg[name] = Scenario(name, cfg, AgentHyperparams())

    # baseline comparison: one PCC + two SCCs, 15/45 m, no SI in the reward
    base3 = replace(_two_ue(15.0, 45.0, omega=(0.5e7, 1e7)), num_ccs=3)
    reg["baseline_compare"] = Scenario(
        "baseline_compare", base3, AgentHyperparams(), si_mode="none")

    # imperfect SINR estimation (single UE, no SI); variance 4 dB, bias 0/+1/-1
    csi_base = _single_ue()
    reg["csi_perfect"] = Scenario(
        "csi_perfect", csi_base, AgentHyperparams(), si_mode="none")
    for name, bias in (("csi_unbiased", 0.0), ("csi_bias_plus1", 1.0),
                       ("csi_bias_minus1", -1.0)):
        reg[name] = Scenario(name, csi_base, AgentHyperparams(), si_mode="none",
                             csi_error=CsiError(bias_db=bias, std_db=2.0))

    # time-varying traffic load at a far UE with a tight delay budget
    dyn_cfg = NetworkConfig(
        gnb_positions=[(0.0, 0.0)],
        ue_positions=[(750.0, 0.0)],
        serving_gnb=[0],
        cell_radius=750.0,
        d_qos=0.015,
        coupling_loss=[_COUPLING_35],
        theta1=[_THETA1], theta2=[_THETA2], omega=[1e7],
    )
    reg["dynamic_traffic"] = Scenario(
        "dynamic_traffic", dyn_cfg, AgentHyperparams(), si_mode="none",
        events=[Event(51, "set_q_hat", ue=0, value=1750.0),
                Event(111, "set_q_hat", ue=0, value=2500.0),
                Event(151, "set_q_hat", ue=0, value=1000.0)])

    # two cells sharing the spectrum
    two_cell = NetworkConfig(
        gnb_positions=[(0.0, 0.0), (100.0, 0.0)],
        ue_positions=[(25.0, 0.0), (60.0, 0.0)],
        serving_gnb=[0, 1],
        rb_resolution=2,
        coupling_loss=[_COUPLING_35] * 2,
        theta1=[_THETA1] * 2, theta2=[_THETA2] * 2, omega=[1e7, 1e7],
    )
    reg["two_cell_two_ue"] = Scenario(
        "two_cell_two_ue", two_cell, AgentHyperparams(episodes=300))

    four_ue = NetworkConfig(
        gnb_positions=[(0.0, 0.0), (100.0, 0.0)],
        ue_positions=[(10.0, 0.0), (20.0, 0.0), (85.0, 0.0), (70.0, 0.0)],
        serving_gnb=[0, 0, 1, 1],
        rb_resolution=2,
        coupling_loss=[_COUPLING_35] * 4,
        theta1=[_THETA1] * 4, theta2=[_THETA2] * 4, omega=[0.625e7] * 4,
    )
    reg["two_cell_four_ue"] = Scenario(
        "two_cell_four_ue", four_ue, AgentHyperparams(episodes=300))
    return reg


_REGISTRY = _build_registry()

_DESCRIPTIONS = {
    "single_ue": "single gNB, one UE at 25 m",
    "two_ue_eq": "single gNB, two UEs at 25 m",
    "two_ue_neq_sa_res25": "single gNB, UEs at 25/35 m, soft avoidance Res25",
    "two_ue_neq_far_sa_res10": "single gNB, UEs at 15/45 m, soft avoidance Res10",
    "two_ue_exit_rejoin": "UE2 exits after episode 50 and rejoins after 75",
    "penalty_shift_lc35": "shifted thresholds -105/-100 dBm, 35 dB coupling",
    "penalty_shift_lc40": "shifted thresholds -105/-100 dBm, 40 dB coupling",
    "baseline_compare": "UEs at 15/45 m, 3 CCs, no SI; use --baseline for ERA/DDPG",
    "csi_perfect": "single UE, no SI, perfect SINR knowledge",
    "csi_unbiased": "single UE, SINR error N(0 dB, 4 dB variance)",
    "csi_bias_plus1": "single UE, SINR error N(+1 dB, 4 dB variance)",
    "csi_bias_minus1": "single UE, SINR error N(-1 dB, 4 dB variance)",
    "dynamic_traffic": "far UE with stepped traffic load and 15 ms delay budget",
    "two_cell_two_ue": "two gNBs 100 m apart, one UE each",
    "two_cell_four_ue": "two gNBs 100 m apart, two UEs each",
}


def scenario_names():
    return sorted(_REGISTRY)


def describe(name):
    if name in _DESCRIPTIONS:
        return _DESCRIPTIONS[name]
    for prefix, text in _DESCRIPTIONS.items():
        if name.startswith(prefix):
            suffix = name[len(prefix) + 1:].replace("_", " ")
            return f"{text}, {suffix}"
    return ""


def get_scenario(name):
    """A fresh, validated copy of the named preset."""
    if name not in _REGISTRY:
        raise ConfigError(
            f"unknown scenario {name!r}; available: {', '.join(scenario_names())}")
    base = _REGISTRY[name]
    out = replace(base, network=replace(base.network,
                                        q_hat=list(base.network.q_hat),
                                        theta1=list(base.network.theta1),
                                        theta2=list(base.network.theta2),
                                        omega=list(base.network.omega),
                                        coupling_loss=list(base.network.coupling_loss)),
                  agent=replace(base.agent),
                  events=list(base.events))
    return out.validate()
