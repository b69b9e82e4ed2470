"""One compound-action actor-critic agent per gNB.

The actor maps (QoS state, previous CC vector, previous reward) to per-UE
transmit powers through a sigmoid scaled by p_max; the critic scores
(QoS state, powers, CC vector). Discrete CC selection happens outside the
agent (exhaustive search over the constrained vector set); the critic only
consumes the chosen vector as an input.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import CasimError
from .nn import HIDDEN_WIDTHS, AdamState, Mlp, adam_step, load_mlp, save_mlp, soft_update


@dataclass
class Experience:
    state: np.ndarray           # (K,) QoS bits seen when acting
    action_power: np.ndarray    # (K_b,) W
    action_alpha: np.ndarray    # extended CC vector bits
    reward: float               # raw gNB reward, bit/s scale
    next_state: np.ndarray      # (K,)
    prev_alpha: np.ndarray      # actor-input context when acting
    prev_reward: float


class ReplayBuffer:
    """Bounded FIFO store; sampling is uniform with replacement."""

    def __init__(self, capacity=500):
        if capacity < 1:
            raise CasimError("capacity must be positive")
        self.capacity = capacity
        self._items = []
        self._next = 0

    def __len__(self):
        return len(self._items)

    def store(self, exp):
        if len(self._items) < self.capacity:
            self._items.append(exp)
        else:
            self._items[self._next] = exp
            self._next = (self._next + 1) % self.capacity

    def sample(self, batch_size, rng):
        if not self._items:
            raise CasimError("cannot sample from an empty replay buffer")
        idx = rng.integers(0, len(self._items), size=batch_size)
        return [self._items[i] for i in idx]

    def items(self):
        return list(self._items)


class Ca2cAgent:
    """Actor/critic pair with target copies, Adam state and a replay buffer."""

    def __init__(self, num_state_bits, num_ues, num_alpha_bits, hp, p_max, rng):
        self.k = num_state_bits
        self.k_b = num_ues
        self.alpha_bits = num_alpha_bits
        self.hp = hp
        self.p_max = p_max
        actor_in = num_state_bits + num_alpha_bits + 1
        critic_in = num_state_bits + num_ues + num_alpha_bits
        sizes_a = [actor_in, *HIDDEN_WIDTHS, num_ues]
        sizes_c = [critic_in, *HIDDEN_WIDTHS, 1]
        # float32 nets: the training loop is memory-bandwidth bound. The damped
        # init keeps per-update policy moves small enough to settle on interior
        # power levels instead of slamming the sigmoid to a rail; the neutral
        # output bias starts powers mid-range so warm-up exploration straddles
        # the whole feasible power interval.
        self.actor = Mlp(sizes_a, "sigmoid", rng=rng, out_bias=0.0,
                         dtype=np.float32, init_scale=hp.init_scale)
        self.critic = Mlp(sizes_c, "identity", rng=rng,
                          dtype=np.float32, init_scale=hp.init_scale)
        self.actor_target = self.actor.copy()
        self.critic_target = self.critic.copy()
        self.actor_opt = AdamState(self.actor, hp.learning_rate)
        self.critic_opt = AdamState(self.critic, hp.learning_rate)
        self.buffer = ReplayBuffer(hp.replay_capacity)

    def _actor_input(self, state, prev_alpha, prev_reward):
        return np.concatenate([
            np.asarray(state, dtype=float).ravel(),
            np.asarray(prev_alpha, dtype=float).ravel(),
            [prev_reward * self.hp.reward_scale],
        ])

    def _critic_input(self, state, powers, alpha):
        return np.concatenate([
            np.asarray(state, dtype=float).ravel(),
            np.asarray(powers, dtype=float).ravel() / self.p_max,
            np.asarray(alpha, dtype=float).ravel(),
        ])

    def actor_act(self, state, prev_alpha, prev_reward, noise_std=0.0, rng=None):
        """Deterministic policy output, optionally with clipped Gaussian noise."""
        x = self._actor_input(state, prev_alpha, prev_reward)
        fraction, _ = self.actor.forward(x)
        powers = fraction * self.p_max
        if rng is not None:
            powers = powers + rng.normal(0.0, max(noise_std, 0.0), size=self.k_b)
        return np.clip(powers, 0.0, self.p_max)

    def critic_q(self, state, powers, alpha):
        q, _ = self.critic.forward(self._critic_input(state, powers, alpha))
        return float(q[0])

    def critic_q_batch(self, state, powers, alphas):
        """Q for many candidate CC vectors at fixed state/powers; (C,) array."""
        alphas = np.asarray(alphas, dtype=float)
        base = self._critic_input(state, powers, alphas[0])
        xs = np.tile(base, (len(alphas), 1))
        xs[:, self.k + self.k_b:] = alphas
        q, _ = self.critic.forward(xs)
        return q[:, 0]

    def store(self, exp):
        self.buffer.store(exp)

    def calibrate_value_scale(self):
        """Shift the critic's output bias to the discounted average-reward level.

        Run once when warm-up ends: with Q ~= r_bar/(1-gamma) up front, the TD
        regression spends its capacity on reward structure instead of slowly
        inflating the whole surface toward the bootstrap scale.
        """
        if not len(self.buffer):
            return
        items = self.buffer.items()
        r_bar = float(np.mean([e.reward for e in items])) * self.hp.reward_scale
        level = r_bar / max(1.0 - self.hp.discount, 1e-6)
        probe = items[:: max(len(items) // 64, 1)]
        s = np.stack([e.state for e in probe]).astype(float)
        p = np.stack([e.action_power for e in probe]).astype(float)
        a = np.stack([e.action_alpha for e in probe]).astype(float)
        q, _ = self.critic.forward(np.concatenate([s, p / self.p_max, a], axis=1))
        shift = level - float(np.mean(q))
        self.critic.biases[-1][:] += shift
        self.critic_target.biases[-1][:] += shift

    def sample_minibatch(self, rng, batch_size=None):
        return self.buffer.sample(batch_size or self.hp.batch_size, rng)

    def train_step(self, batch, update_actor=True):
        """One minibatch update of critic (descent) then actor (ascent).

        The critic regresses on y = r + gamma * Q_target(s', pi_target(s'), a);
        the actor ascends mean Q(s, pi(s), a) through the critic's power inputs.
        Both targets are then soft-updated. Rewards enter scaled by reward_scale.
        With update_actor=False (critic warm-up) the policy and its target stay
        put while the critic learns the value surface.
        """
        hp = self.hp
        b = len(batch)
        s = np.stack([e.state for e in batch]).astype(float)
        p = np.stack([e.action_power for e in batch]).astype(float)
        a = np.stack([e.action_alpha for e in batch]).astype(float)
        r = np.array([e.reward for e in batch]) * hp.reward_scale
        s2 = np.stack([e.next_state for e in batch]).astype(float)
        pa = np.stack([e.prev_alpha for e in batch]).astype(float)
        pr = np.array([e.prev_reward for e in batch]) * hp.reward_scale

        # critic target from the target networks and the stored CC vector
        f2, _ = self.actor_target.forward(np.concatenate([s2, a, r[:, None]], axis=1))
        q2, _ = self.critic_target.forward(np.concatenate([s2, f2, a], axis=1))
        y = r + hp.discount * q2[:, 0]

        xc = np.concatenate([s, p / self.p_max, a], axis=1)
        q1, cache_c = self.critic.forward(xc)
        err = q1[:, 0] - y
        critic_loss = float(np.mean(err ** 2))
        wg, bg, _ = self.critic.backward(cache_c, (2.0 * err / b)[:, None])
        adam_step(self.critic, wg, bg, self.critic_opt, "minimize")

        xa = np.concatenate([s, pa, pr[:, None]], axis=1)
        f, cache_a = self.actor.forward(xa)
        qa, cache_q = self.critic.forward(np.concatenate([s, f, a], axis=1))
        actor_obj = float(np.mean(qa))
        if update_actor:
            _, _, gin = self.critic.backward(cache_q, np.full((b, 1), 1.0 / b))
            grad_f = gin[:, self.k:self.k + self.k_b]
            awg, abg, _ = self.actor.backward(cache_a, grad_f)
            # policy ascends through its readout layer only: full-depth updates
            # at this learning rate move the sigmoid input by multiple units
            # per step and bang-bang the power to a rail (frozen random hidden
            # features keep the per-update policy motion small and bounded)
            for li in range(len(awg) - 1):
                awg[li][:] = 0.0
                abg[li][:] = 0.0
            adam_step(self.actor, awg, abg, self.actor_opt, "maximize")
            soft_update(self.actor_target, self.actor, hp.tau)

        soft_update(self.critic_target, self.critic, hp.tau)
        return critic_loss, actor_obj

    def save(self, directory, index):
        os.makedirs(directory, exist_ok=True)
        tag = f"agent{index}"
        save_mlp(self.actor, os.path.join(directory, f"{tag}_actor.nn"))
        save_mlp(self.actor_target, os.path.join(directory, f"{tag}_actor_target.nn"))
        save_mlp(self.critic, os.path.join(directory, f"{tag}_critic.nn"))
        save_mlp(self.critic_target, os.path.join(directory, f"{tag}_critic_target.nn"))
        np.savez(
            os.path.join(directory, f"{tag}_optim.npz"),
            actor_t=self.actor_opt.step_count,
            critic_t=self.critic_opt.step_count,
            **{f"am{i}": m for i, m in enumerate(self.actor_opt.m)},
            **{f"av{i}": v for i, v in enumerate(self.actor_opt.v)},
            **{f"cm{i}": m for i, m in enumerate(self.critic_opt.m)},
            **{f"cv{i}": v for i, v in enumerate(self.critic_opt.v)},
        )

    def load(self, directory, index):
        tag = f"agent{index}"
        self.actor = load_mlp(os.path.join(directory, f"{tag}_actor.nn"))
        self.actor_target = load_mlp(os.path.join(directory, f"{tag}_actor_target.nn"))
        self.critic = load_mlp(os.path.join(directory, f"{tag}_critic.nn"))
        self.critic_target = load_mlp(os.path.join(directory, f"{tag}_critic_target.nn"))
        data = np.load(os.path.join(directory, f"{tag}_optim.npz"))
        self.actor_opt = AdamState(self.actor, self.hp.learning_rate)
        self.critic_opt = AdamState(self.critic, self.hp.learning_rate)
        self.actor_opt.step_count = int(data["actor_t"])
        self.critic_opt.step_count = int(data["critic_t"])
        self.actor_opt.m = [data[f"am{i}"] for i in range(len(self.actor_opt.m))]
        self.actor_opt.v = [data[f"av{i}"] for i in range(len(self.actor_opt.v))]
        self.critic_opt.m = [data[f"cm{i}"] for i in range(len(self.critic_opt.m))]
        self.critic_opt.v = [data[f"cv{i}"] for i in range(len(self.critic_opt.v))]
