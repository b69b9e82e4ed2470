"""Uplink carrier-aggregation resource allocation with PA-harmonic
self-interference: deterministic network environment, compound-action
actor-critic agents, scenario harness and CLI."""

from .agent import Ca2cAgent, Experience, ReplayBuffer
from .alloc import (CcVectorSet, RbPlan, allocate_rbs, enumerate_cc_vectors,
                    per_rb_power, rb_units_per_bit, select_cc)
from .channel import (apply_sinr_estimation_error, channel_gain, rb_rate,
                      ue_delay_and_state)
from .config import (AgentHyperparams, CsiError, Event, NetworkConfig,
                     PenaltyParams, Scenario, dbm_to_watts, db_to_linear,
                     watts_to_dbm)
from .env import (AllocationState, EnvStep, build_allocation, compute_sinr,
                  env_step, ue_total_rate)
from .errors import CasimError, ConfigError, ConstraintViolation
from .harness import baseline_ddpg_only, baseline_era, run_experiment
from .nn import AdamState, Mlp, adam_step, load_mlp, save_mlp, soft_update
from .reward import RewardRecord, distance_weight, gnb_reward, penalty
from .scenarios import get_scenario, scenario_names
from .si import (PaCoefficients, ToneSpectrum, cc_input_amplitude,
                 pa_output_spectrum, second_harmonic_tx_power,
                 sensitivity_degradation, si_at_receiver, si_frequency_conflict)
from .trace import EpisodeTrace, emit_csv, parse_csv
from .svgplot import emit_plot

__version__ = "0.1.0"
