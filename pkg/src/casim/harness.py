"""Experiment orchestration: episode/cycle loop, CC selection, baselines, events.

Each cycle: agents emit per-UE powers (actor + exploration noise), each gNB
picks its CC vector by exhaustive search (immediate-reward or critic-Q
evaluator, epsilon-greedy override), RBs are laid out round-robin, one global
environment step scores the cycle, experiences are stored. Training runs at
episode end. Everything is driven by per-component random streams derived
from the master seed, so disabling one noise source leaves the others intact.
"""

from dataclasses import replace

import numpy as np

from . import env as envmod
from .agent import Ca2cAgent, Experience
from .alloc import allocate_rbs, enumerate_cc_vectors
from .config import SI_SCC, CsiError
from .errors import CasimError
from .reward import distance_weight, gnb_reward, penalty
from .si import scc_self_interference
from .trace import EpisodeTrace


def _pcc_only_vector(vset, active_locals):
    vec = np.zeros(vset.num_bits, dtype=np.int8)
    for u in active_locals:
        vec[u * vset.bits_per_ue] = 1
    return vec


def _all_on_vector(vset, active_locals):
    vec = np.zeros(vset.num_bits, dtype=np.int8)
    for u in active_locals:
        vec[u * vset.bits_per_ue:(u + 1) * vset.bits_per_ue] = 1
    return vec


class _GnbContext:
    """Per-gNB candidate machinery: vector set, plan cache, evaluators."""

    def __init__(self, b, cfg, hp, si_conflict, hard_avoid):
        self.b = b
        self.cfg = cfg
        self.hp = hp
        self.si_conflict = si_conflict
        self.hard_avoid = hard_avoid
        self.ues = cfg.ues_of_gnb(b)
        self.vset = enumerate_cc_vectors(cfg.num_ccs, len(self.ues), cfg.rb_resolution)
        self.gains = envmod.gain_matrix(cfg)
        self.distances = [cfg.ue_distance(i) for i in self.ues]
        self.params = [cfg.penalty_params(i) for i in self.ues]
        self._plan_cache = {}
        self._admissible_cache = {}

    def admissible(self, active_tuple):
        key = active_tuple
        if key not in self._admissible_cache:
            idx = self.vset.constrained(active_tuple)
            self._admissible_cache[key] = idx
        return self._admissible_cache[key]

    def plans(self, active_tuple):
        """Cached RB plans for every admissible vector under this active set."""
        key = active_tuple
        if key not in self._plan_cache:
            idx = self.admissible(active_tuple)
            plans = {}
            for i in idx:
                vec = self.vset.vectors[i]
                plans[vec.tobytes()] = allocate_rbs(
                    vec, self.cfg, ues=self.ues, active=list(active_tuple))
            self._plan_cache[key] = plans
        return self._plan_cache[key]

    def candidate_reward(self, vec, powers, active_tuple, i_ext=None, csi_field=None):
        """Immediate reward of one CC vector at the given powers.

        i_ext: per-victim interference (M, N) at this gNB from other cells'
        current allocations; csi_field: per-(UE, CC, RB) dB estimation errors.
        """
        cfg = self.cfg
        plan = self.plans(active_tuple)[vec.tobytes()]
        sum_rate = 0.0
        pen_total = 0.0
        for lu, i in enumerate(self.ues):
            if not active_tuple[lu]:
                continue
            n_tot = plan.ue_total(lu)
            if n_tot == 0 or powers[i] <= 0.0:
                continue
            p_rb = powers[i] / n_tot
            g = self.gains[self.b, i]
            if i_ext is None and csi_field is None:
                gamma = p_rb * g / cfg.noise_power_ul
                sum_rate += n_tot * cfg.rb_bandwidth * np.log2(1.0 + gamma)
            else:
                for cc in range(cfg.num_ccs):
                    start, stop = plan.chunks[lu][cc]
                    if stop <= start:
                        continue
                    noise = cfg.noise_power_ul
                    if i_ext is not None:
                        gamma = p_rb * g / (i_ext[cc, start:stop] + noise)
                    else:
                        gamma = np.full(stop - start, p_rb * g / noise)
                    if csi_field is not None:
                        gamma = gamma * 10.0 ** (csi_field[i, cc, start:stop] / 10.0)
                    sum_rate += cfg.rb_bandwidth * np.log2(1.0 + gamma).sum()
            if self.si_conflict and cfg.num_ccs > SI_SCC:
                scc_power = plan.rb_counts[lu, SI_SCC] * p_rb
                if scc_power > 0:
                    p_si = scc_self_interference(
                        scc_power, cfg.pa_gain, cfg.c2, cfg.coupling_loss[i])
                    pen = penalty(p_si, self.params[lu], cfg.penalty_ramp)
                    if pen:
                        pen_total += pen / distance_weight(
                            self.distances[lu], cfg.cell_radius)
        return sum_rate - pen_total

    def select(self, powers, active_tuple, agent, state, eps, rng,
               i_ext=None, csi_field=None, mode="reward"):
        """CC selection for this cycle: epsilon-greedy over the admissible set,
        otherwise the exhaustive argmax (immediate reward or critic Q). Ties
        break toward the latest-enumerated candidate."""
        if self.hard_avoid:
            return _pcc_only_vector(
                self.vset, [u for u in range(len(self.ues)) if active_tuple[u]])
        idx = self.admissible(active_tuple)
        if len(idx) == 0:
            raise CasimError("no admissible CC vector")
        if rng is not None and len(idx) > 1 and rng.random() < eps:
            return self.vset.vectors[idx[rng.integers(0, len(idx))]].copy()
        if mode == "critic":
            local_powers = np.array([powers[i] for i in self.ues])
            vals = agent.critic_q_batch(state, local_powers, self.vset.vectors[idx])
        else:
            vals = np.array([
                self.candidate_reward(self.vset.vectors[i], powers, active_tuple,
                                      i_ext, csi_field)
                for i in idx
            ])
        best = int(np.flatnonzero(vals >= vals.max())[-1])
        return self.vset.vectors[idx[best]].copy()


def _external_interference(cfg, gains, victim_gnb, ctx_alloc):
    """Interference (M, N) at a victim gNB from other cells' allocations.

    ctx_alloc: {gnb: (plan, {ue: p_rb})} of the most recent allocations."""
    i_ext = np.zeros((cfg.num_ccs, cfg.rbs_per_cc))
    for b, (plan, p_rb_by_ue) in ctx_alloc.items():
        if b == victim_gnb or plan is None:
            continue
        for lu, i in enumerate(cfg.ues_of_gnb(b)):
            p_rb = p_rb_by_ue.get(i, 0.0)
            if p_rb <= 0:
                continue
            for cc in range(cfg.num_ccs):
                start, stop = plan.chunks[lu][cc]
                if stop > start:
                    i_ext[cc, start:stop] += p_rb * gains[victim_gnb, i]
    return i_ext


def run_experiment(scenario, seed, episodes=None, checkpoint_dir=None):
    """Run one experiment and return its trace; deterministic given the seed."""
    scenario.validate()
    cfg = replace(scenario.network, q_hat=list(scenario.network.q_hat))
    hp = scenario.agent
    n_ep = episodes or hp.episodes
    n_g = cfg.num_gnbs
    k = cfg.num_ues
    baseline = scenario.baseline
    si_conflict = scenario.si_mode != "none"
    hard_avoid = scenario.si_mode == "hard_avoid" or baseline == "ha"
    learning = baseline in ("ca2c", "ha", "ddpg_only")

    ss = np.random.SeedSequence(seed)
    children = ss.spawn(1 + 4 * n_g)
    rng_csi = np.random.default_rng(children[0])
    rng_init = [np.random.default_rng(children[1 + 4 * b]) for b in range(n_g)]
    rng_noise = [np.random.default_rng(children[2 + 4 * b]) for b in range(n_g)]
    rng_sample = [np.random.default_rng(children[3 + 4 * b]) for b in range(n_g)]
    rng_eps = [np.random.default_rng(children[4 + 4 * b]) for b in range(n_g)]

    gnbs = [_GnbContext(b, cfg, hp, si_conflict, hard_avoid) for b in range(n_g)]
    agents = []
    if learning:
        for b in range(n_g):
            agents.append(Ca2cAgent(k, len(gnbs[b].ues), gnbs[b].vset.num_bits,
                                    hp, cfg.p_max, rng_init[b]))

    active = np.ones(k, dtype=bool)
    csi = scenario.csi_error
    trace = EpisodeTrace(scenario.name, seed)
    gains = gnbs[0].gains

    for ep in range(1, n_ep + 1):
        for ev in scenario.events:
            if ev.episode != ep:
                continue
            if ev.kind == "ue_exit":
                active[ev.ue] = False
            elif ev.kind == "ue_join":
                active[ev.ue] = True
            elif ev.kind == "set_q_hat":
                cfg.q_hat[ev.ue] = float(ev.value)
            elif ev.kind == "set_csi_error":
                csi = CsiError(ev.bias_db or 0.0, ev.std_db or 0.0)
        eps_e = hp.exploration * hp.exploration_decay ** (ep - 1)
        noise_std = eps_e * cfg.p_max / 3.0
        state = np.zeros(k, dtype=np.int8)
        prev_alpha = {}
        prev_reward = {b: 0.0 for b in range(n_g)}
        for b in range(n_g):
            act_loc = [u for u, i in enumerate(gnbs[b].ues) if active[i]]
            prev_alpha[b] = _pcc_only_vector(gnbs[b].vset, act_loc)
        ctx_alloc = {b: (None, {}) for b in range(n_g)}

        for cyc in range(1, hp.cycles_per_episode + 1):
            csi_field = None
            if csi is not None:
                csi_field = rng_csi.normal(
                    csi.bias_db, csi.std_db,
                    size=(k, cfg.num_ccs, cfg.rbs_per_cc))

            powers = np.zeros(k)
            agent_powers = {}
            for b in range(n_g):
                ues = gnbs[b].ues
                if baseline == "era":
                    p_b = np.full(len(ues), cfg.p_max)
                else:
                    p_b = agents[b].actor_act(state, prev_alpha[b], prev_reward[b],
                                              noise_std, rng_noise[b])
                for lu, i in enumerate(ues):
                    if active[i]:
                        powers[i] = p_b[lu]
                    else:
                        p_b[lu] = 0.0
                agent_powers[b] = p_b

            alpha_by_gnb = {}
            for b in range(n_g):
                gctx = gnbs[b]
                act_tuple = tuple(bool(active[i]) for i in gctx.ues)
                act_loc = [u for u in range(len(gctx.ues)) if act_tuple[u]]
                if baseline in ("era", "ddpg_only"):
                    vec = _all_on_vector(gctx.vset, act_loc)
                else:
                    i_ext = None
                    if n_g > 1:
                        i_ext = _external_interference(cfg, gains, b, ctx_alloc)
                    vec = gctx.select(powers, act_tuple,
                                      agents[b] if learning else None, state,
                                      eps_e, rng_eps[b] if learning else None,
                                      i_ext=i_ext, csi_field=csi_field,
                                      mode=hp.cc_eval)
                alpha_by_gnb[b] = vec
                plan = gctx.plans(act_tuple).get(vec.tobytes())
                if plan is None:
                    plan = allocate_rbs(vec, cfg, ues=gctx.ues, active=list(act_tuple))
                p_rb_map = {}
                for lu, i in enumerate(gctx.ues):
                    tot = plan.ue_total(lu)
                    if tot and powers[i] > 0:
                        p_rb_map[i] = powers[i] / tot
                ctx_alloc[b] = (plan, p_rb_map)

            alloc, plans = envmod.build_allocation(cfg, alpha_by_gnb, powers, active)
            step = envmod.env_step(alloc, cfg, si_conflict=si_conflict,
                                   csi_error=csi, csi_field=csi_field)

            rewards = {}
            for b in range(n_g):
                gctx = gnbs[b]
                act = [i for i in gctx.ues if active[i]]
                rec = gnb_reward(
                    [step.rates[i] for i in act],
                    [step.p_si[i] for i in act],
                    [cfg.ue_distance(i) for i in act],
                    [cfg.penalty_params(i) for i in act],
                    cfg.cell_radius, cfg.penalty_ramp)
                rewards[b] = rec.reward

            next_state = step.qos_state.copy()
            for b in range(n_g):
                if learning:
                    agents[b].store(Experience(
                        state=state.copy().astype(float),
                        action_power=agent_powers[b].copy(),
                        action_alpha=alpha_by_gnb[b].copy().astype(float),
                        reward=rewards[b],
                        next_state=next_state.copy().astype(float),
                        prev_alpha=prev_alpha[b].copy().astype(float),
                        prev_reward=prev_reward[b],
                    ))
                for i in gnbs[b].ues:
                    if not active[i]:
                        continue
                    trace.append(
                        episode=ep, cycle=cyc, gnb=b, ue=i,
                        num_cc=int((step.rb_counts[i] > 0).sum()),
                        rb_cc1=int(step.rb_counts[i, 0]),
                        rb_cc2=int(step.rb_counts[i, 1]) if cfg.num_ccs > 1 else 0,
                        rb_total=int(step.rb_counts[i].sum()),
                        p_total_w=float(alloc.ue_power[i]),
                        p_cc1_w=float(step.cc_power[i, 0]),
                        p_cc2_w=float(step.cc_power[i, 1]) if cfg.num_ccs > 1 else 0.0,
                        p_si_w=float(step.p_si[i]),
                        rate_bps=float(step.rates[i]),
                        state_bit=int(step.qos_state[i]),
                        reward=rewards[b],
                    )
                prev_alpha[b] = alpha_by_gnb[b].copy()
                prev_reward[b] = rewards[b]
            state = next_state

        if learning:
            if ep == hp.actor_warmup_episodes:
                for b in range(n_g):
                    agents[b].calibrate_value_scale()
            actor_on = ep > hp.actor_warmup_episodes
            for b in range(n_g):
                for round_i in range(hp.train_rounds):
                    batch = agents[b].sample_minibatch(rng_sample[b])
                    update_actor = actor_on and round_i < hp.actor_rounds
                    agents[b].train_step(batch, update_actor=update_actor)

    if checkpoint_dir and learning:
        for b, agent in enumerate(agents):
            agent.save(checkpoint_dir, b)
    return trace


def baseline_era(scenario, seed, episodes=None):
    """Static equal-resource allocation: all CCs on, equal RBs, full power."""
    return run_experiment(replace(scenario, baseline="era"), seed, episodes)


def baseline_ddpg_only(scenario, seed, episodes=None):
    """Continuous-only learner: CC vector pinned all-on, powers still learned."""
    return run_experiment(replace(scenario, baseline="ddpg_only"), seed, episodes)
