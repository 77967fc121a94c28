"""MDP wrapper around the physical layer.

One environment episode corresponds to one channel realization: the
agent repeatedly proposes a precoder + RIS phase configuration for that
realization and is rewarded with the sum secrecy rate. RIS phase noise
is (by default) redrawn every step and exposed in the observation, so
the policy can counteract the error of the upcoming slot.

Observation layout (length ``EnvConfig.state_dim``):

  [ 4 rate sums | cascaded channels re/im | M phase-noise entries |
    previous action (flat) | 2K transmit-power entries |
    2K received-power entries ]

The rate block holds (sum downlink rate, sum uplink rate, sum of each
user's strongest interception rate, sum secrecy rate) from the previous
evaluation. Cascaded channel blocks appear in the order BS-users,
BS-eavesdroppers, users-BS, users-eavesdroppers, each as all real parts
then all imaginary parts, row-major. The power blocks follow the
squared-real/squared-imaginary split of each user's precoder inner
product and of its own effective downlink channel entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channels import (ChannelParams, ChannelSet, Geometry, SystemSizes,
                       random_geometry, sample_channel_set,
                       sample_phase_noise)
from .linkbudget import (Action, CascadedChannels, HwiConfig, LinkBudget,
                         NoiseConfig, cascaded_channels, evaluate_links)


@dataclass(frozen=True)
class EnvConfig:
    """Everything needed to instantiate the physical layer and its MDP."""

    sizes: SystemSizes
    hwi: HwiConfig
    noise: NoiseConfig
    channel_params: ChannelParams
    p_max: float = 0.1                       # watts
    user_powers: tuple[float, ...] = (0.1, 0.1)
    geometry: Geometry | None = None         # None: drawn fresh per episode
    phase_noise_per_step: bool = True
    redraw_channels_each_episode: bool = True

    def __post_init__(self):
        if self.p_max <= 0:
            raise ValueError("p_max must be > 0")
        if len(self.user_powers) != self.sizes.k_users:
            raise ValueError("need one transmit power per user")
        if any(p < 0 for p in self.user_powers):
            raise ValueError("user powers must be >= 0")
        if len(self.hwi.kappa_tx_user) != self.sizes.k_users:
            raise ValueError("HWI config does not match the user count")

    @classmethod
    def build(cls, sizes: SystemSizes, p_max: float = 0.1,
              user_power: float = 0.1, kappa: float = 0.01,
              rho_si: float = 1.0, thermal_noise: float = 3.981071705534969e-14,
              channel_params: ChannelParams | None = None,
              **kwargs) -> "EnvConfig":
        """Convenience constructor with uniform impairments and powers."""
        return cls(sizes=sizes,
                   hwi=HwiConfig.uniform(kappa, sizes.k_users, rho_si),
                   noise=NoiseConfig.from_thermal(thermal_noise),
                   channel_params=channel_params or ChannelParams(),
                   p_max=p_max,
                   user_powers=(user_power,) * sizes.k_users,
                   **kwargs)

    @property
    def state_dim(self) -> int:
        s = self.sizes
        return (4 + 2 * s.k_users ** 2 + 4 * s.l_eves * s.k_users
                + 2 * s.n_rx * s.k_users + 4 * s.k_users + 3 * s.m
                + 2 * s.n_tx * s.k_users)

    @property
    def action_dim(self) -> int:
        return 2 * self.sizes.m + 2 * self.sizes.n_tx * self.sizes.k_users


@dataclass
class StepResult:
    next_state: np.ndarray
    reward: float
    budget: LinkBudget


@dataclass
class RunningStats:
    """Per-coordinate running mean/variance (Welford)."""

    dim: int
    count: int = 0
    mean: np.ndarray = field(default=None)
    _m2: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.mean is None:
            self.mean = np.zeros(self.dim)
        if self._m2 is None:
            self._m2 = np.zeros(self.dim)

    def update(self, x: np.ndarray) -> None:
        x = np.asarray(x, dtype=np.float64)
        self.count += 1
        delta = x - self.mean
        self.mean += delta / self.count
        self._m2 += delta * (x - self.mean)

    @property
    def std(self) -> np.ndarray:
        if self.count == 0:
            return np.zeros(self.dim)
        return np.sqrt(self._m2 / self.count)

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Standardize without touching the statistics."""
        return (np.asarray(x, dtype=np.float64) - self.mean) \
            / np.maximum(self.std, 1e-8)


def whiten(state: np.ndarray, stats: RunningStats) -> np.ndarray:
    """Fold the state into the running statistics, then standardize it."""
    stats.update(state)
    return stats.apply(state)


def decode_action(flat: np.ndarray, p_max: float, sizes: SystemSizes) -> Action:
    """Reform a flat real vector into a feasible precoder + phase action."""
    return Action.from_flat(flat, p_max, sizes)


def initial_action(sizes: SystemSizes, p_max: float) -> Action:
    """Identity-column precoder at full budget, all phases zero."""
    w = np.eye(sizes.n_tx, sizes.k_users, dtype=np.complex128)
    trace = np.sum(np.abs(w) ** 2)
    w *= math.sqrt(p_max / trace)
    return Action(w=w, theta_phases=np.zeros(sizes.m))


def build_state(budget: LinkBudget, state_cascade: CascadedChannels,
                received_gains: np.ndarray, phase_noise: np.ndarray,
                prev_action_flat: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Assemble the observation vector; see the module docstring for layout.

    ``received_gains`` are the users' own effective downlink channel
    entries from the evaluation that produced ``budget``.
    """
    rates = np.array([budget.rate_down.sum(), budget.rate_up.sum(),
                      budget.rate_eve.max(axis=1).sum(), budget.ssr])
    blocks = [rates]
    for mat in (state_cascade.bs_to_users, state_cascade.bs_to_eves,
                state_cascade.users_to_bs, state_cascade.users_to_eves):
        blocks.append(mat.real.ravel())
        blocks.append(mat.imag.ravel())
    blocks.append(np.asarray(phase_noise, dtype=np.float64))
    blocks.append(np.asarray(prev_action_flat, dtype=np.float64))

    tx = np.einsum("nk,nk->k", w.conj(), w)
    tx_block = np.empty(2 * w.shape[1])
    tx_block[0::2] = tx.real ** 2
    tx_block[1::2] = tx.imag ** 2
    blocks.append(tx_block)

    rx = np.asarray(received_gains)
    rx_block = np.empty(2 * rx.size)
    rx_block[0::2] = rx.real ** 2
    rx_block[1::2] = rx.imag ** 2
    blocks.append(rx_block)
    return np.concatenate(blocks)


class SecrecyEnv:
    """Step/reset interface over one channel realization per episode."""

    def __init__(self, config: EnvConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.channels: ChannelSet | None = None
        self.geometry: Geometry | None = None
        self._phase_noise: np.ndarray | None = None
        self._ready = False

    def _draw_channels(self) -> ChannelSet:
        geometry = self.config.geometry
        if geometry is None:
            geometry = random_geometry(self.rng, self.config.sizes.k_users,
                                       self.config.sizes.l_eves)
        self.geometry = geometry
        return sample_channel_set(self.rng, geometry,
                                  self.config.channel_params,
                                  self.config.sizes)

    def reset(self, channels: ChannelSet | None = None,
              start_action: Action | None = None) -> np.ndarray:
        """Begin an episode; returns the first observation.

        ``channels`` replays a stored realization instead of drawing a
        fresh one; ``start_action`` overrides the identity initializer.
        """
        if channels is not None:
            self.channels = channels
            self.geometry = self.config.geometry
        elif self.channels is None or self.config.redraw_channels_each_episode:
            self.channels = self._draw_channels()
        self._phase_noise = self.channels.phase_noise
        action = start_action or initial_action(self.config.sizes,
                                                self.config.p_max)
        self._ready = True
        state, _ = self._advance(action)
        return state

    def step(self, flat_action: np.ndarray) -> StepResult:
        """Apply one action under the phase noise announced in the state."""
        if not self._ready:
            raise RuntimeError("step() called before reset()")
        action = decode_action(flat_action, self.config.p_max,
                               self.config.sizes)
        state, budget = self._advance(action)
        return StepResult(next_state=state, reward=budget.ssr, budget=budget)

    def _advance(self, action: Action) -> tuple[np.ndarray, LinkBudget]:
        channels = replace(self.channels, phase_noise=self._phase_noise)
        budget, cascade = evaluate_links(channels, action, self.config.hwi,
                                         self.config.noise,
                                         self.config.user_powers)
        if self.config.phase_noise_per_step:
            self._phase_noise = sample_phase_noise(self.rng,
                                                   self.config.sizes.m)
            upcoming = replace(self.channels, phase_noise=self._phase_noise)
            state_cascade = cascaded_channels(upcoming, action.w,
                                              action.theta_phases)
        else:
            state_cascade = cascade
        state = build_state(budget, state_cascade,
                            np.diag(cascade.bs_to_users),
                            self._phase_noise, action.to_flat(), action.w)
        return state, budget
