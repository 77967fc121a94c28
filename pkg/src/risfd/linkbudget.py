"""Closed-form link budget for the RIS-reflected full-duplex system.

Everything here is a deterministic function of one channel realization,
one action (transmit precoder + RIS phase configuration), the hardware
impairment severities and the noise levels. Powers are in watts, rates
in bits/s/Hz.

Impairment model: every transmitter adds Gaussian distortion whose
power is a fraction (kappa) of the signal power it emits, per antenna;
every legitimate receiver adds Gaussian distortion whose power is a
fraction of its total pre-distortion received power. Eavesdroppers are
treated as impairment-free (worst case). The RIS contributes per-element
phase noise, carried in the channel realization.

Residual loop interference at each full-duplex user is folded into an
effective noise floor (``user_effective`` in :class:`NoiseConfig`), and
the base station is assumed to cancel its own loop and RIS-reflected
self-interference, leaving white residual noise per receive antenna.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet, SystemSizes
from .numerics import CMat, frob_norm


@dataclass(frozen=True)
class HwiConfig:
    """Transceiver impairment severities and self-interference coefficient."""

    kappa_tx_bs: float
    kappa_rx_bs: float
    kappa_tx_user: tuple[float, ...]   # one per user (their transmitters)
    kappa_rx_user: tuple[float, ...]   # one per user (their receivers)
    rho_si: float = 1.0                # residual RIS-reflected self-interference

    def __post_init__(self):
        if min(self.kappa_tx_bs, self.kappa_rx_bs) < 0:
            raise ValueError("kappa factors must be >= 0")
        if any(k < 0 for k in self.kappa_tx_user + self.kappa_rx_user):
            raise ValueError("kappa factors must be >= 0")
        if not 0.0 <= self.rho_si <= 1.0:
            raise ValueError("rho_si must lie in [0, 1]")

    @classmethod
    def uniform(cls, kappa: float, k_users: int, rho_si: float = 1.0) -> "HwiConfig":
        """Same severity everywhere, the usual simulation setting."""
        return cls(kappa_tx_bs=kappa, kappa_rx_bs=kappa,
                   kappa_tx_user=(kappa,) * k_users,
                   kappa_rx_user=(kappa,) * k_users,
                   rho_si=rho_si)


@dataclass(frozen=True)
class NoiseConfig:
    """Noise variances in watts at every receiver."""

    user_thermal: float     # thermal floor at each user
    user_effective: float   # thermal + residual loop interference at each user
    bs_residual: float      # per-antenna residual after BS self-interference cancellation
    eve_down: float         # eavesdropper noise, downlink interception
    eve_up: float           # eavesdropper noise, uplink interception

    def __post_init__(self):
        for name in ("user_thermal", "user_effective", "bs_residual",
                     "eve_down", "eve_up"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")

    @classmethod
    def from_thermal(cls, thermal_w: float, user_li_factor: float = 1.1,
                     bs_residual_factor: float = 1.1) -> "NoiseConfig":
        """Derive all floors from one thermal power.

        The 1.1 factors model the residual interference left by
        imperfect loop/self-interference cancellation; eavesdroppers
        see the plain thermal floor.
        """
        return cls(user_thermal=thermal_w,
                   user_effective=user_li_factor * thermal_w,
                   bs_residual=bs_residual_factor * thermal_w,
                   eve_down=thermal_w, eve_up=thermal_w)


@dataclass(frozen=True)
class Action:
    """Transmit precoder (N_t x K) plus RIS phase shifts (M,), radians.

    Reflection amplitudes are fixed at one, so the RIS configuration is
    fully described by its phases.
    """

    w: CMat
    theta_phases: np.ndarray

    def theta_matrix(self) -> CMat:
        return build_theta(self.theta_phases)

    def to_flat(self) -> np.ndarray:
        """Flatten to [Re w_1, Im w_1, ..., Re w_K, Im w_K, (re, im) per element]."""
        parts = []
        for k in range(self.w.shape[1]):
            parts.append(self.w[:, k].real)
            parts.append(self.w[:, k].imag)
        pairs = np.empty(2 * self.theta_phases.size)
        pairs[0::2] = np.cos(self.theta_phases)
        pairs[1::2] = np.sin(self.theta_phases)
        parts.append(pairs)
        return np.concatenate(parts)

    @classmethod
    def from_flat(cls, flat: np.ndarray, p_max: float, sizes: SystemSizes) -> "Action":
        """Inverse of :meth:`to_flat` with the power projection applied.

        The trailing (re, im) pair of each RIS element is reduced to its
        angle; a (0, 0) pair maps to phase 0.
        """
        n_t, k, m = sizes.n_tx, sizes.k_users, sizes.m
        expected = 2 * n_t * k + 2 * m
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (expected,):
            raise ValueError(f"expected flat action of length {expected}, "
                             f"got {flat.shape}")
        w = np.empty((n_t, k), dtype=np.complex128)
        for j in range(k):
            block = flat[2 * n_t * j: 2 * n_t * (j + 1)]
            w[:, j] = block[:n_t] + 1j * block[n_t:]
        w = project_precoder(w, p_max)
        pairs = flat[2 * n_t * k:]
        phases = np.arctan2(pairs[1::2], pairs[0::2])
        return cls(w=w, theta_phases=phases)


@dataclass(frozen=True)
class CascadedChannels:
    """End-to-end effective channels through the RIS for one action.

    ``bs_to_users`` is K x K (entry [k, i]: user k's reception of the
    stream meant for user i), ``bs_to_eves`` is L x K, ``users_to_bs``
    is N_r x K (column i: user i's uplink at the BS array) and
    ``users_to_eves`` is L x K.
    """

    bs_to_users: CMat
    bs_to_eves: CMat
    users_to_bs: CMat
    users_to_eves: CMat


@dataclass(frozen=True)
class LinkBudget:
    """All SINRs and rates for one (channels, action) evaluation."""

    sinr_down: np.ndarray       # (K,) at the users
    sinr_up: np.ndarray         # (K,) at the BS after combining
    sinr_eve_down: np.ndarray   # (K, L) interceptions of the downlink
    sinr_eve_up: np.ndarray     # (K, L) interceptions of the uplink
    rate_down: np.ndarray       # (K,)
    rate_up: np.ndarray         # (K,)
    rate_eve: np.ndarray        # (K, L) both directions combined
    secrecy: np.ndarray         # (K,) clamped at zero
    ssr: float                  # sum secrecy rate


def project_precoder(w: CMat, p_max: float) -> CMat:
    """Scale the precoder onto the transmit power budget if it exceeds it."""
    if p_max <= 0:
        raise ValueError("p_max must be > 0")
    power = frob_norm(w) ** 2
    if power <= p_max:
        return w
    scaled = w * (math.sqrt(p_max) / math.sqrt(power))
    # rounding can leave the trace a few ulps over budget; deflate until
    # the constraint holds exactly (converges in at most a few passes)
    for _ in range(8):
        excess = np.sum(np.abs(scaled) ** 2)
        if excess <= p_max:
            break
        scaled *= math.sqrt(p_max / excess) * (1.0 - 1e-15)
    return scaled


def build_theta(phases: np.ndarray) -> CMat:
    """Diagonal unit-modulus reflection matrix from per-element phases."""
    return np.diag(np.exp(1j * np.asarray(phases, dtype=np.float64)))


def _reflection(channels: ChannelSet, theta_phases: np.ndarray) -> np.ndarray:
    """Combined per-element reflection coefficients exp(j(theta + noise))."""
    return np.exp(1j * (np.asarray(theta_phases, dtype=np.float64)
                        + channels.phase_noise))


def combiner(channels: ChannelSet, theta_phases: np.ndarray) -> CMat:
    """Matched-filter receive combiner at the BS, one unit-norm column per user.

    Column k points along user k's effective uplink channel through the
    RIS; a degenerate all-zero channel falls back to the first standard
    basis vector.
    """
    t = _reflection(channels, theta_phases)
    h_up = np.hstack(channels.user_to_ris)              # (M, K)
    a = channels.ris_to_bs.conj().T @ (t[:, None] * h_up)   # (N_r, K)
    f = np.zeros_like(a)
    for k in range(a.shape[1]):
        norm = np.linalg.norm(a[:, k])
        if norm == 0.0:
            f[0, k] = 1.0
        else:
            f[:, k] = a[:, k] / norm
    return f


class _Effective:
    """Shared per-evaluation intermediates for the SINR formulas."""

    def __init__(self, channels: ChannelSet, w: CMat, theta_phases: np.ndarray):
        t = _reflection(channels, theta_phases)
        h_down = np.hstack(channels.ris_to_user)        # (M, K)
        h_up = np.hstack(channels.user_to_ris)          # (M, K)
        g_down = np.hstack(channels.ris_to_eve_down)    # (M, L)
        g_up = np.hstack(channels.ris_to_eve_up)        # (M, L)

        refl_down = (h_down.conj() * t[:, None]).T      # rows: h_k^H diag(t)
        refl_eve = (g_down.conj() * t[:, None]).T

        self.w = w
        self.bs_rows_users = refl_down @ channels.bs_to_ris   # (K, N_t)
        self.bs_rows_eves = refl_eve @ channels.bs_to_ris     # (L, N_t)
        self.bs_to_users = self.bs_rows_users @ w             # (K, K)
        self.bs_to_eves = self.bs_rows_eves @ w               # (L, K)
        self.user_to_user = refl_down @ h_up                  # (K, K)
        self.users_to_bs = channels.ris_to_bs.conj().T @ (t[:, None] * h_up)
        self.users_to_eves = (g_up.conj() * t[:, None]).T @ h_up  # (L, K)
        self.per_antenna_tx = np.sum(np.abs(w) ** 2, axis=1)  # (N_t,)

    def cascades(self) -> CascadedChannels:
        return CascadedChannels(bs_to_users=self.bs_to_users,
                                bs_to_eves=self.bs_to_eves,
                                users_to_bs=self.users_to_bs,
                                users_to_eves=self.users_to_eves)

    def mrc_combiner(self) -> CMat:
        f = np.zeros_like(self.users_to_bs)
        for k in range(f.shape[1]):
            norm = np.linalg.norm(self.users_to_bs[:, k])
            if norm == 0.0:
                f[0, k] = 1.0
            else:
                f[:, k] = self.users_to_bs[:, k] / norm
        return f


def cascaded_channels(channels: ChannelSet, w: CMat,
                      theta_phases: np.ndarray) -> CascadedChannels:
    """Effective channels for a given precoder and phase configuration."""
    return _Effective(channels, w, theta_phases).cascades()


def _downlink_terms(eff: _Effective, hwi: HwiConfig, noise: NoiseConfig,
                    user_powers: np.ndarray):
    """Desired powers and interference floors at every user."""
    k_users = eff.bs_to_users.shape[0]
    gains = np.abs(eff.bs_to_users) ** 2                     # (K, K)
    desired = np.diag(gains).copy()
    mui = gains.sum(axis=1) - desired
    tx_dist = hwi.kappa_tx_bs * (np.abs(eff.bs_rows_users) ** 2
                                 @ eff.per_antenna_tx)
    kappa_up = np.asarray(hwi.kappa_tx_user)
    # Uplink transmissions leak back to every user's receiver through the
    # RIS; a user's own stream is attenuated by the self-interference
    # coefficient, other users' streams arrive at full strength.
    rho = np.full((k_users, k_users), 1.0)
    np.fill_diagonal(rho, hwi.rho_si)
    leak = ((1.0 + kappa_up)[None, :] * rho * user_powers[None, :]
            * np.abs(eff.user_to_user) ** 2).sum(axis=1)
    floor = mui + tx_dist + noise.user_effective + leak
    return desired, floor


def _uplink_terms(eff: _Effective, hwi: HwiConfig, noise: NoiseConfig,
                  user_powers: np.ndarray):
    """Desired powers, interference floors and receiver-distortion power."""
    f = eff.mrc_combiner()
    fa = np.abs(f.conj().T @ eff.users_to_bs) ** 2           # (K, K)
    kappa_up = np.asarray(hwi.kappa_tx_user)
    desired = user_powers * np.diag(fa)
    mui = (user_powers[None, :] * fa).sum(axis=1) - desired
    tx_dist = (kappa_up * user_powers * fa).sum(axis=1)
    f_norm2 = np.sum(np.abs(f) ** 2, axis=0)
    floor = mui + tx_dist + f_norm2 * noise.bs_residual
    # BS receiver distortion: per-antenna powers of the pre-distortion
    # signal (all uplink streams with their transmit distortion, plus the
    # residual noise) scaled by the receiver severity.
    per_antenna = ((1.0 + kappa_up)[None, :] * user_powers[None, :]
                   * np.abs(eff.users_to_bs) ** 2).sum(axis=1) + noise.bs_residual
    rx_dist = hwi.kappa_rx_bs * (np.abs(f) ** 2 * per_antenna[:, None]).sum(axis=0)
    return desired, floor, rx_dist


def _eve_terms(eff: _Effective, hwi: HwiConfig, user_powers: np.ndarray):
    """Interference floors at the eavesdroppers for both directions.

    Returns (down_pow LxK, up_pow LxK, floor_down LxK, floor_up LxK)
    where floors exclude thermal noise.
    """
    kappa_up = np.asarray(hwi.kappa_tx_user)
    down_pow = np.abs(eff.bs_to_eves) ** 2                    # (L, K)
    up_pow = user_powers[None, :] * np.abs(eff.users_to_eves) ** 2
    tx_dist = hwi.kappa_tx_bs * (np.abs(eff.bs_rows_eves) ** 2
                                 @ eff.per_antenna_tx)        # (L,)
    up_all = ((1.0 + kappa_up)[None, :] * up_pow).sum(axis=1)  # (L,)
    up_hwi = (kappa_up[None, :] * up_pow).sum(axis=1)
    down_all = down_pow.sum(axis=1)
    floor_down = (up_all[:, None] + (down_all[:, None] - down_pow)
                  + tx_dist[:, None])
    floor_up = ((up_pow.sum(axis=1)[:, None] - up_pow) + up_hwi[:, None]
                + down_all[:, None] + tx_dist[:, None])
    return down_pow, up_pow, floor_down, floor_up


def downlink_interference(k: int, w: CMat, theta_phases: np.ndarray,
                          channels: ChannelSet, hwi: HwiConfig,
                          noise: NoiseConfig, user_powers) -> float:
    """Total non-desired power at user k, excluding its receiver distortion."""
    eff = _Effective(channels, w, theta_phases)
    _, floor = _downlink_terms(eff, hwi, noise, np.asarray(user_powers, float))
    return float(floor[k])


def downlink_sinr(k: int, w: CMat, theta_phases: np.ndarray,
                  channels: ChannelSet, hwi: HwiConfig,
                  noise: NoiseConfig, user_powers) -> float:
    eff = _Effective(channels, w, theta_phases)
    desired, floor = _downlink_terms(eff, hwi, noise,
                                     np.asarray(user_powers, float))
    rx = hwi.kappa_rx_user[k] * (desired[k] + floor[k])
    return float(desired[k] / (floor[k] + rx))


def uplink_interference(k: int, w: CMat, theta_phases: np.ndarray,
                        channels: ChannelSet, hwi: HwiConfig,
                        noise: NoiseConfig, user_powers) -> float:
    eff = _Effective(channels, w, theta_phases)
    _, floor, _ = _uplink_terms(eff, hwi, noise, np.asarray(user_powers, float))
    return float(floor[k])


def uplink_sinr(k: int, w: CMat, theta_phases: np.ndarray,
                channels: ChannelSet, hwi: HwiConfig,
                noise: NoiseConfig, user_powers) -> float:
    eff = _Effective(channels, w, theta_phases)
    desired, floor, rx = _uplink_terms(eff, hwi, noise,
                                       np.asarray(user_powers, float))
    return float(desired[k] / (floor[k] + rx[k]))


def eve_interference_down(k: int, ell: int, w: CMat, theta_phases: np.ndarray,
                          channels: ChannelSet, hwi: HwiConfig,
                          user_powers) -> float:
    eff = _Effective(channels, w, theta_phases)
    _, _, floor_down, _ = _eve_terms(eff, hwi, np.asarray(user_powers, float))
    return float(floor_down[ell, k])


def eve_interference_up(k: int, ell: int, w: CMat, theta_phases: np.ndarray,
                        channels: ChannelSet, hwi: HwiConfig,
                        user_powers) -> float:
    eff = _Effective(channels, w, theta_phases)
    _, _, _, floor_up = _eve_terms(eff, hwi, np.asarray(user_powers, float))
    return float(floor_up[ell, k])


def eve_sinr(k: int, ell: int, w: CMat, theta_phases: np.ndarray,
             channels: ChannelSet, hwi: HwiConfig, noise: NoiseConfig,
             user_powers) -> tuple[float, float]:
    """(downlink, uplink) interception SINRs at eavesdropper ell for user k."""
    eff = _Effective(channels, w, theta_phases)
    down_pow, up_pow, floor_down, floor_up = _eve_terms(
        eff, hwi, np.asarray(user_powers, float))
    sd = down_pow[ell, k] / (floor_down[ell, k] + noise.eve_down)
    su = up_pow[ell, k] / (floor_up[ell, k] + noise.eve_up)
    return float(sd), float(su)


def secrecy_rate(rate_down_k: float, rate_up_k: float, eve_rates_k) -> float:
    """Two-way secrecy rate of one user against the strongest eavesdropper."""
    eve_rates_k = np.asarray(eve_rates_k, dtype=np.float64)
    return max(0.0, rate_down_k + rate_up_k - float(eve_rates_k.max()))


def ssr(secrecy_rates) -> float:
    """Sum secrecy rate over users."""
    return float(np.sum(np.asarray(secrecy_rates, dtype=np.float64)))


def evaluate_links(channels: ChannelSet, action: Action, hwi: HwiConfig,
                   noise: NoiseConfig,
                   user_powers) -> tuple[LinkBudget, CascadedChannels]:
    """Full link budget plus the cascaded channels for one action."""
    user_powers = np.asarray(user_powers, dtype=np.float64)
    eff = _Effective(channels, action.w, action.theta_phases)

    des_d, floor_d = _downlink_terms(eff, hwi, noise, user_powers)
    rx_d = np.asarray(hwi.kappa_rx_user) * (des_d + floor_d)
    sinr_down = des_d / (floor_d + rx_d)

    des_u, floor_u, rx_u = _uplink_terms(eff, hwi, noise, user_powers)
    sinr_up = des_u / (floor_u + rx_u)

    down_pow, up_pow, efloor_d, efloor_u = _eve_terms(eff, hwi, user_powers)
    sinr_eve_down = (down_pow / (efloor_d + noise.eve_down)).T   # (K, L)
    sinr_eve_up = (up_pow / (efloor_u + noise.eve_up)).T

    rate_down = np.log2(1.0 + sinr_down)
    rate_up = np.log2(1.0 + sinr_up)
    rate_eve = np.log2(1.0 + sinr_eve_down) + np.log2(1.0 + sinr_eve_up)
    secrecy = np.maximum(0.0, rate_down + rate_up - rate_eve.max(axis=1))

    budget = LinkBudget(sinr_down=sinr_down, sinr_up=sinr_up,
                        sinr_eve_down=sinr_eve_down, sinr_eve_up=sinr_eve_up,
                        rate_down=rate_down, rate_up=rate_up,
                        rate_eve=rate_eve, secrecy=secrecy,
                        ssr=float(secrecy.sum()))
    return budget, eff.cascades()
