"""Scenario configuration: network layout, device model and agent hyperparameters.

All powers are carried in watts and all gains in linear scale; dB/dBm values
from the literature are converted once, at scenario-construction time.
"""

import math
from dataclasses import dataclass, field, fields, replace

import yaml

from .errors import ConfigError

SPEED_OF_LIGHT = 3.0e8          # m/s
CARRIER_FREQ_HZ = 3.5e9         # mid-band carrier all scenarios use
# Free-space reference gain (lambda/4pi)^2 at 3.5 GHz; multiplies the d^-2 geometry.
FREE_SPACE_GAIN = (SPEED_OF_LIGHT / CARRIER_FREQ_HZ / (4.0 * math.pi)) ** 2
SI_SCC = 1                      # CC index (0-based) whose 2nd harmonic lands on the DL


def dbm_to_watts(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts):
    if watts <= 0.0:
        return -math.inf
    return 10.0 * math.log10(watts * 1e3)


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


@dataclass
class PenaltyParams:
    """Piecewise SI penalty: 0 below theta1, omega above theta2, ramp between."""
    theta1: float               # W, SI power below which degradation is acceptable
    theta2: float               # W, SI power above which degradation is unacceptable
    omega: float                # penalty ceiling, commensurate with bit/s rewards

    def validate(self):
        if not self.theta1 < self.theta2:
            raise ConfigError(f"penalty needs theta1 < theta2, got {self.theta1} >= {self.theta2}")
        if self.omega <= 0:
            raise ConfigError(f"penalty needs omega > 0, got {self.omega}")


@dataclass
class NetworkConfig:
    """Immutable description of one network scenario."""
    gnb_positions: list         # [(x, y)] in meters
    ue_positions: list          # [(x, y)] in meters
    serving_gnb: list           # UE index -> gNB index
    num_ccs: int = 2            # M; CC 0 is the PCC
    rbs_per_cc: int = 50        # N_max
    rb_bandwidth: float = 180e3          # Hz per RB
    p_max: float = 0.5                   # W, 27 dBm UL cap per UE
    noise_power_ul: float = dbm_to_watts(-70.0)    # W, gNB receiver noise
    noise_power_dl: float = dbm_to_watts(-100.0)   # W, UE receiver noise floor
    pa_gain: float = 1000.0              # G, linear (30 dB)
    c2: float = 0.1417                   # 2nd-order PA coefficient
    c3: float = 0.0                      # 3rd-order PA coefficient
    coupling_loss: list = None           # per UE, linear (35 dB -> 3162.3)
    theta1: list = None                  # per UE, W
    theta2: list = None                  # per UE, W
    omega: list = None                   # per UE, dimensionless
    cell_radius: float = 50.0            # m, d_max for the distance weighting
    q_hat: list = None                   # per UE, bits per data burst
    d_qos: float = 0.15                  # s, delay budget
    rb_resolution: int = 1               # n_m: 1 (Res50), 2 (Res25), 5 (Res10)
    path_gain_scale: float = FREE_SPACE_GAIN
    penalty_ramp: str = "db"             # "db" | "linear" ramp between thresholds

    def __post_init__(self):
        k = len(self.ue_positions)
        if self.coupling_loss is None:
            self.coupling_loss = [db_to_linear(35.0)] * k
        if self.theta1 is None:
            self.theta1 = [dbm_to_watts(-100.0)] * k
        if self.theta2 is None:
            self.theta2 = [dbm_to_watts(-95.0)] * k
        if self.omega is None:
            self.omega = [1e7] * k
        if self.q_hat is None:
            self.q_hat = [1000.0] * k

    @property
    def num_ues(self):
        return len(self.ue_positions)

    @property
    def num_gnbs(self):
        return len(self.gnb_positions)

    def ues_of_gnb(self, b):
        return [i for i, g in enumerate(self.serving_gnb) if g == b]

    def penalty_params(self, ue):
        return PenaltyParams(self.theta1[ue], self.theta2[ue], self.omega[ue])

    def ue_distance(self, ue):
        """Distance from UE to its serving gNB, meters."""
        (ux, uy) = self.ue_positions[ue]
        (gx, gy) = self.gnb_positions[self.serving_gnb[ue]]
        return math.hypot(ux - gx, uy - gy)

    def validate(self):
        k = self.num_ues
        if k == 0 or self.num_gnbs == 0:
            raise ConfigError("need at least one UE and one gNB")
        if len(self.serving_gnb) != k:
            raise ConfigError("serving_gnb must map every UE")
        for i, b in enumerate(self.serving_gnb):
            if not 0 <= b < self.num_gnbs:
                raise ConfigError(f"serving_gnb[{i}]={b} out of range")
        for pos in list(self.gnb_positions) + list(self.ue_positions):
            if len(pos) != 2:
                raise ConfigError(f"positions must be 2-D points, got {pos!r}")
        for i in range(k):
            d = self.ue_distance(i)
            if d <= 0:
                raise ConfigError(f"UE {i} is at zero distance from its serving gNB")
            if d > self.cell_radius:
                raise ConfigError(
                    f"UE {i} at {d:.1f} m lies outside the cell radius {self.cell_radius} m")
        if self.p_max <= 0:
            raise ConfigError("p_max must be positive")
        if self.num_ccs < 1:
            raise ConfigError("need at least the PCC")
        if self.rb_resolution not in (1, 2, 5):
            raise ConfigError(f"rb_resolution must be 1, 2 or 5, got {self.rb_resolution}")
        if self.penalty_ramp not in ("db", "linear"):
            raise ConfigError(f"penalty_ramp must be 'db' or 'linear', got {self.penalty_ramp!r}")
        for name in ("coupling_loss", "theta1", "theta2", "omega", "q_hat"):
            if len(getattr(self, name)) != k:
                raise ConfigError(f"{name} must have one entry per UE")
        for i in range(k):
            self.penalty_params(i).validate()
            if self.coupling_loss[i] < 1.0:
                raise ConfigError(f"coupling_loss[{i}] must be >= 1 (a loss)")
        return self


@dataclass
class AgentHyperparams:
    discount: float = 0.99          # gamma
    exploration: float = 0.9        # epsilon at episode 0
    exploration_decay: float = 0.97  # per-episode multiplicative decay
    learning_rate: float = 0.01     # kappa, Adam step size for both networks
    tau: float = 0.01               # soft target-update coefficient
    batch_size: int = 32
    replay_capacity: int = 500
    cycles_per_episode: int = 100   # N_c
    episodes: int = 200             # N_ep
    train_rounds: int = 16          # critic minibatch steps per episode end
    actor_rounds: int = 1           # policy minibatch steps per episode end
    actor_warmup_episodes: int = 10  # critic-only episodes before policy updates
    init_scale: float = 0.3         # multiplies the 1/sqrt(fan_in) init bound
    reward_scale: float = 1e-7      # scales rewards entering the networks
    cc_eval: str = "reward"         # "reward" (immediate) | "critic" (Q-value)

    def validate(self):
        if not 0.0 <= self.discount <= 1.0:
            raise ConfigError("discount must lie in [0, 1]")
        if not 0.0 <= self.exploration <= 1.0:
            raise ConfigError("exploration must lie in [0, 1]")
        if self.batch_size > self.replay_capacity:
            raise ConfigError("batch_size cannot exceed replay_capacity")
        if self.cc_eval not in ("reward", "critic"):
            raise ConfigError(f"cc_eval must be 'reward' or 'critic', got {self.cc_eval!r}")
        for name in ("learning_rate", "batch_size", "cycles_per_episode",
                     "episodes", "train_rounds", "actor_rounds"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 <= self.tau <= 1.0:
            raise ConfigError("tau must lie in [0, 1]")
        return self


@dataclass
class Event:
    """Scheduled change applied before the given episode (1-based) runs."""
    episode: int
    kind: str                   # ue_exit | ue_join | set_q_hat | set_csi_error
    ue: int = None
    value: float = None         # bits for set_q_hat
    bias_db: float = None       # for set_csi_error
    std_db: float = None


@dataclass
class CsiError:
    """Gaussian SINR estimation error in dB: measured = true + bias + N(0, std^2)."""
    bias_db: float = 0.0
    std_db: float = 0.0


@dataclass
class Scenario:
    name: str
    network: NetworkConfig
    agent: AgentHyperparams = field(default_factory=AgentHyperparams)
    si_mode: str = "soft_avoid"     # none | hard_avoid | soft_avoid
    baseline: str = "ca2c"          # ca2c | era | ddpg_only | ha
    events: list = field(default_factory=list)
    csi_error: CsiError = None

    def validate(self):
        self.network.validate()
        self.agent.validate()
        if self.si_mode not in ("none", "hard_avoid", "soft_avoid"):
            raise ConfigError(f"unknown si_mode {self.si_mode!r}")
        if self.baseline not in ("ca2c", "era", "ddpg_only", "ha"):
            raise ConfigError(f"unknown baseline {self.baseline!r}")
        for ev in self.events:
            if ev.kind not in ("ue_exit", "ue_join", "set_q_hat", "set_csi_error"):
                raise ConfigError(f"unknown event kind {ev.kind!r}")
            if ev.kind in ("ue_exit", "ue_join", "set_q_hat"):
                if ev.ue is None or not 0 <= ev.ue < self.network.num_ues:
                    raise ConfigError(f"event {ev.kind} references missing UE {ev.ue}")
            if not 1 <= ev.episode <= self.agent.episodes:
                raise ConfigError(
                    f"event at episode {ev.episode} outside 1..{self.agent.episodes}")
        return self


_SECTION_TYPES = {"network": NetworkConfig, "agent": AgentHyperparams}


def load_overrides(path):
    """Read a YAML config file with `network:` / `agent:` sections.

    Unknown sections or keys are errors; values override scenario defaults.
    """
    with open(path) as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping of sections")
    overrides = {}
    for section, payload in raw.items():
        if section not in _SECTION_TYPES:
            raise ConfigError(f"{path}: unknown section {section!r}")
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: section {section!r} must be a mapping")
        known = {f.name for f in fields(_SECTION_TYPES[section])}
        for key in payload:
            if key not in known:
                raise ConfigError(f"{path}: unknown key {section}.{key}")
        overrides[section] = dict(payload)
    return overrides


def apply_overrides(scenario, overrides):
    """Return a copy of the scenario with config-file overrides applied."""
    network = replace(scenario.network, **overrides.get("network", {}))
    agent = replace(scenario.agent, **overrides.get("agent", {}))
    out = replace(scenario, network=network, agent=agent)
    out.validate()
    return out
