"""Actor-critic agents that optimize the beamforming action online.

The main agent is DDPG with target networks, a replay buffer, soft
updates and decaying Gaussian exploration noise; a twin-critic TD3
variant and two comparison baselines (fixed RIS phases, half-duplex)
share the same episode loop. States are standardized with running
statistics before entering any network.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .env import RunningStats, SecrecyEnv, decode_action
from .linkbudget import Action
from .nets import AdamState, adam_step, backward, forward, init_uniform, \
    load_mlp, save_mlp, soft_update


@dataclass(frozen=True)
class AgentConfig:
    discount: float = 0.9
    actor_lr: float = 5e-4
    critic_lr: float = 1e-3
    actor_blend: float = 0.005      # target soft-update rate, policy side
    critic_blend: float = 0.005     # target soft-update rate, value side
    batch_size: int = 128
    replay_capacity: int = 100_000
    steps_per_episode: int = 20_000
    noise_sigma: float = 0.1
    noise_decay: float = 0.9995
    noise_floor: float = 0.001
    hidden: int = 128
    clear_buffer_each_episode: bool = True

    def __post_init__(self):
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if self.batch_size > self.replay_capacity:
            raise ValueError("batch size cannot exceed replay capacity")
        if self.steps_per_episode < 1:
            raise ValueError("steps_per_episode must be >= 1")


class ReplayBuffer:
    """Fixed-capacity ring of (s, a, r, s') transitions."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        self.capacity = capacity
        self._s = np.empty((capacity, state_dim))
        self._a = np.empty((capacity, action_dim))
        self._r = np.empty(capacity)
        self._s2 = np.empty((capacity, state_dim))
        self._size = 0
        self._cursor = 0

    def __len__(self) -> int:
        return self._size

    def clear(self) -> None:
        self._size = 0
        self._cursor = 0

    def push(self, s, a, r, s2) -> None:
        i = self._cursor
        self._s[i] = s
        self._a[i] = a
        self._r[i] = r
        self._s2[i] = s2
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch: int, rng: np.random.Generator):
        idx = rng.integers(0, self._size, size=batch)
        return self._s[idx], self._a[idx], self._r[idx], self._s2[idx]


class _AgentCore:
    """State whitening, exploration schedule and replay shared by agents."""

    def __init__(self, state_dim: int, action_dim: int, config: AgentConfig):
        self.state_dim = state_dim
        self.action_dim = action_dim
        self.config = config
        self.stats = RunningStats(state_dim)
        self.buffer = ReplayBuffer(config.replay_capacity, state_dim,
                                   action_dim)
        self.sigma = config.noise_sigma

    def observe(self, state: np.ndarray) -> None:
        """Fold one freshly observed state into the whitening statistics."""
        self.stats.update(state)

    def reset_noise(self) -> None:
        self.sigma = self.config.noise_sigma

    def decay_noise(self) -> None:
        self.sigma = max(self.config.noise_floor,
                         self.sigma * self.config.noise_decay)


class DdpgAgent(_AgentCore):
    """Deterministic policy gradient with target networks and soft updates."""

    def __init__(self, state_dim: int, action_dim: int, config: AgentConfig,
                 rng: np.random.Generator):
        super().__init__(state_dim, action_dim, config)
        h = config.hidden
        self.actor = init_uniform(rng, (state_dim, h, h, h, action_dim),
                                  ("relu", "relu", "relu", "tanh"))
        self.critic = init_uniform(rng, (state_dim + action_dim, h, h, 1),
                                   ("relu", "relu", "linear"))
        self.actor_target = self.actor.clone()
        self.critic_target = self.critic.clone()
        self.actor_adam = AdamState.for_net(self.actor)
        self.critic_adam = AdamState.for_net(self.critic)

    def act(self, state: np.ndarray, explore: bool,
            rng: np.random.Generator) -> np.ndarray:
        x = self.stats.apply(state)
        a, _ = forward(self.actor, x)
        if explore:
            a = a + rng.normal(0.0, self.sigma, size=a.shape)
            a = np.clip(a, -1.0, 1.0)
        return a

    def train_step(self, rng: np.random.Generator):
        """One minibatch update of critic then actor; returns the losses.

        Returns None while the buffer holds fewer transitions than one
        batch.
        """
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return None
        s, a, r, s2 = self.buffer.sample(cfg.batch_size, rng)
        sw = self.stats.apply(s)
        s2w = self.stats.apply(s2)

        a2, _ = forward(self.actor_target, s2w)
        q2, _ = forward(self.critic_target, np.hstack([s2w, a2]))
        y = r + cfg.discount * q2[:, 0]

        q, cache = forward(self.critic, np.hstack([sw, a]))
        err = q[:, 0] - y
        critic_loss = float(np.mean(err ** 2))
        grads, _ = backward(self.critic, cache, (2.0 / len(err)) * err[:, None],
                            need_input_grad=False)
        adam_step(self.critic, grads, self.critic_adam, cfg.critic_lr)

        # Policy ascent on Q(s, pi(s)): chain the critic's input gradient
        # (action slice) back through the actor.
        a_pi, actor_cache = forward(self.actor, sw)
        q_pi, critic_cache = forward(self.critic, np.hstack([sw, a_pi]))
        upstream = np.full((len(err), 1), -1.0 / len(err))
        _, dx = backward(self.critic, critic_cache, upstream)
        actor_grads, _ = backward(self.actor, actor_cache,
                                  dx[:, self.state_dim:],
                                  need_input_grad=False)
        adam_step(self.actor, actor_grads, self.actor_adam, cfg.actor_lr)

        soft_update(self.actor_target, self.actor, cfg.actor_blend)
        soft_update(self.critic_target, self.critic, cfg.critic_blend)
        return critic_loss, float(np.mean(q_pi))

    _CHECKPOINT_PARTS = ("actor", "critic", "actor_target", "critic_target")

    def save(self, directory: str) -> None:
        """Write all four networks as checkpoint files under a directory."""
        os.makedirs(directory, exist_ok=True)
        for name in self._CHECKPOINT_PARTS:
            save_mlp(os.path.join(directory, f"{name}.json"),
                     getattr(self, name))

    def load(self, directory: str) -> None:
        for name in self._CHECKPOINT_PARTS:
            setattr(self, name,
                    load_mlp(os.path.join(directory, f"{name}.json")))


class Td3Agent(_AgentCore):
    """Twin critics with min targets, smoothed target policy, delayed actor."""

    def __init__(self, state_dim: int, action_dim: int, config: AgentConfig,
                 rng: np.random.Generator, policy_delay: int = 2,
                 smooth_sigma: float = 0.2, smooth_clip: float = 0.5):
        super().__init__(state_dim, action_dim, config)
        h = config.hidden
        self.actor = init_uniform(rng, (state_dim, h, h, h, action_dim),
                                  ("relu", "relu", "relu", "tanh"))
        critic_sizes = (state_dim + action_dim, h, h, 1)
        critic_act = ("relu", "relu", "linear")
        self.critic1 = init_uniform(rng, critic_sizes, critic_act)
        self.critic2 = init_uniform(rng, critic_sizes, critic_act)
        self.actor_target = self.actor.clone()
        self.critic1_target = self.critic1.clone()
        self.critic2_target = self.critic2.clone()
        self.actor_adam = AdamState.for_net(self.actor)
        self.critic1_adam = AdamState.for_net(self.critic1)
        self.critic2_adam = AdamState.for_net(self.critic2)
        self.policy_delay = policy_delay
        self.smooth_sigma = smooth_sigma
        self.smooth_clip = smooth_clip
        self.critic_updates = 0
        self.actor_updates = 0

    act = DdpgAgent.act

    def train_step(self, rng: np.random.Generator):
        cfg = self.config
        if len(self.buffer) < cfg.batch_size:
            return None
        s, a, r, s2 = self.buffer.sample(cfg.batch_size, rng)
        sw = self.stats.apply(s)
        s2w = self.stats.apply(s2)

        a2, _ = forward(self.actor_target, s2w)
        smoothing = np.clip(rng.normal(0.0, self.smooth_sigma, size=a2.shape),
                            -self.smooth_clip, self.smooth_clip)
        a2 = np.clip(a2 + smoothing, -1.0, 1.0)
        x2 = np.hstack([s2w, a2])
        q1t, _ = forward(self.critic1_target, x2)
        q2t, _ = forward(self.critic2_target, x2)
        y = r + cfg.discount * np.minimum(q1t[:, 0], q2t[:, 0])

        x = np.hstack([sw, a])
        losses = []
        for critic, adam in ((self.critic1, self.critic1_adam),
                             (self.critic2, self.critic2_adam)):
            q, cache = forward(critic, x)
            err = q[:, 0] - y
            losses.append(float(np.mean(err ** 2)))
            grads, _ = backward(critic, cache, (2.0 / len(err)) * err[:, None],
                                need_input_grad=False)
            adam_step(critic, grads, adam, cfg.critic_lr)
        self.critic_updates += 1

        actor_obj = math.nan
        if self.critic_updates % self.policy_delay == 0:
            a_pi, actor_cache = forward(self.actor, sw)
            q_pi, critic_cache = forward(self.critic1, np.hstack([sw, a_pi]))
            upstream = np.full((len(y), 1), -1.0 / len(y))
            _, dx = backward(self.critic1, critic_cache, upstream)
            actor_grads, _ = backward(self.actor, actor_cache,
                                      dx[:, self.state_dim:],
                                      need_input_grad=False)
            adam_step(self.actor, actor_grads, self.actor_adam, cfg.actor_lr)
            soft_update(self.actor_target, self.actor, cfg.actor_blend)
            soft_update(self.critic1_target, self.critic1, cfg.critic_blend)
            soft_update(self.critic2_target, self.critic2, cfg.critic_blend)
            self.actor_updates += 1
        return sum(losses) / 2.0, actor_obj


class RandomAgent(_AgentCore):
    """Uniform random actions; the no-learning reference scheme."""

    def act(self, state, explore, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, size=self.action_dim)

    def train_step(self, rng):
        return None


@dataclass
class EpisodeLog:
    """Per-step rewards and the best action found in one episode."""

    instant: np.ndarray
    average: np.ndarray
    best_reward: float
    best_action: Action
    critic_losses: np.ndarray | None = None


def average_reward(instant, smoothing: float) -> np.ndarray:
    """Exponentially smoothed reward stream, seeded with the first value."""
    if not 0.0 <= smoothing <= 1.0:
        raise ValueError("smoothing must lie in [0, 1]")
    instant = np.asarray(instant, dtype=np.float64)
    out = np.empty_like(instant)
    if instant.size == 0:
        return out
    out[0] = instant[0]
    for t in range(1, instant.size):
        out[t] = smoothing * out[t - 1] + (1.0 - smoothing) * instant[t]
    return out


def fixed_phase_map(m: int):
    """Adapter appending frozen zero-phase RIS entries to a precoder action."""
    pairs = np.tile([1.0, 0.0], m)

    def expand(partial: np.ndarray) -> np.ndarray:
        return np.concatenate([partial, pairs])
    return expand


def run_episode(agent, env: SecrecyEnv, rng: np.random.Generator,
                smoothing: float = 0.995, channels=None, start_action=None,
                action_map=None, track_losses: bool = False) -> EpisodeLog:
    """One training episode: act, reward, store, update, decay.

    ``action_map`` lifts a restricted agent action into the full
    environment action space (used by the fixed-phase baseline).
    """
    cfg = agent.config
    if cfg.clear_buffer_each_episode:
        agent.buffer.clear()
    agent.reset_noise()
    state = env.reset(channels=channels, start_action=start_action)
    agent.observe(state)

    steps = cfg.steps_per_episode
    instant = np.empty(steps)
    losses = np.full(steps, np.nan) if track_losses else None
    best_reward = -math.inf
    best_flat = None
    for t in range(steps):
        a = agent.act(state, explore=True, rng=rng)
        flat = action_map(a) if action_map is not None else a
        result = env.step(flat)
        instant[t] = result.reward
        if result.reward > best_reward:
            best_reward = result.reward
            best_flat = flat
        agent.buffer.push(state, a, result.reward, result.next_state)
        update = agent.train_step(rng)
        if track_losses and update is not None:
            losses[t] = update[0]
        agent.decay_noise()
        agent.observe(result.next_state)
        state = result.next_state

    best_action = decode_action(best_flat, env.config.p_max, env.config.sizes)
    return EpisodeLog(instant=instant,
                      average=average_reward(instant, smoothing),
                      best_reward=best_reward, best_action=best_action,
                      critic_losses=losses)


def baseline_fixed_phase(env: SecrecyEnv, config: AgentConfig,
                         rng: np.random.Generator,
                         smoothing: float = 0.995) -> EpisodeLog:
    """DDPG over the precoder only, RIS phases frozen at zero."""
    sizes = env.config.sizes
    init_rng, run_rng = rng.spawn(2)
    agent = DdpgAgent(env.config.state_dim, 2 * sizes.n_tx * sizes.k_users,
                      config, init_rng)
    return run_episode(agent, env, run_rng, smoothing=smoothing,
                       action_map=fixed_phase_map(sizes.m))


def baseline_hd(env_config):
    """Half-duplex variant: users stop transmitting entirely."""
    return replace(env_config,
                   user_powers=(0.0,) * env_config.sizes.k_users)
