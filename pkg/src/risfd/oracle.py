"""Monte Carlo cross-check of the closed-form link budget.

Instead of analytic expectations, this module draws random information
symbols and Gaussian distortion noises, pushes them through the literal
received-signal expressions at every receiver, and averages term powers.
It shares only the raw channel realization and the action with the
closed-form path, so agreement between the two is a meaningful check.

Used by the test suite; not needed on the training hot path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet
from .linkbudget import Action, HwiConfig, NoiseConfig


@dataclass(frozen=True)
class OracleEstimate:
    """Empirical powers (watts) and SINRs from symbol-level simulation."""

    # downlink, one entry per user
    down_desired: np.ndarray
    down_mui: np.ndarray
    down_tx_distortion: np.ndarray
    down_uplink_leak: np.ndarray
    down_li_noise: np.ndarray
    down_interference: np.ndarray    # all non-desired terms combined
    down_total: np.ndarray           # pre-distortion received power
    sinr_down: np.ndarray
    # uplink, one entry per user
    up_desired: np.ndarray
    up_interference: np.ndarray
    up_rx_distortion: np.ndarray
    sinr_up: np.ndarray
    # eavesdroppers, (K, L)
    sinr_eve_down: np.ndarray
    sinr_eve_up: np.ndarray
    draws: int


def _cn(rng, size, var):
    """Circularly-symmetric complex Gaussian with the given variance."""
    scale = np.sqrt(np.asarray(var, dtype=np.float64) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def mc_oracle(channels: ChannelSet, action: Action, hwi: HwiConfig,
              noise: NoiseConfig, user_powers, draws: int,
              rng: np.random.Generator, chunk: int = 100_000) -> OracleEstimate:
    """Estimate every SINR by simulating ``draws`` symbol periods."""
    if draws < 1:
        raise ValueError("draws must be >= 1")
    p = np.asarray(user_powers, dtype=np.float64)
    w = action.w
    n_t, k_users = w.shape
    l_eves = len(channels.ris_to_eve_down)
    kappa_up = np.asarray(hwi.kappa_tx_user)

    t = np.exp(1j * (action.theta_phases + channels.phase_noise))

    # Effective scalars straight from the signal-path definitions.
    def through_ris(rx_col):
        return (rx_col[:, 0].conj() * t)  # row of rx^H diag(t)

    bs_rows_user = np.array([through_ris(h) @ channels.bs_to_ris
                             for h in channels.ris_to_user])      # (K, N_t)
    v = bs_rows_user @ w                                          # (K, K)
    user_leak = np.array([[through_ris(channels.ris_to_user[k])
                           @ channels.user_to_ris[i][:, 0]
                           for i in range(k_users)]
                          for k in range(k_users)])               # (K, K)
    a_up = np.array([channels.ris_to_bs.conj().T @ (t * h[:, 0])
                     for h in channels.user_to_ris]).T            # (N_r, K)
    bs_rows_eve = np.array([through_ris(g) @ channels.bs_to_ris
                            for g in channels.ris_to_eve_down])   # (L, N_t)
    de = bs_rows_eve @ w                                          # (L, K)
    ue = np.array([[through_ris(channels.ris_to_eve_up[ell])
                    @ channels.user_to_ris[i][:, 0]
                    for i in range(k_users)]
                   for ell in range(l_eves)])                     # (L, K)

    # Matched-filter combiner (same receive design as the system under test).
    f = np.zeros_like(a_up)
    for k in range(k_users):
        norm = np.linalg.norm(a_up[:, k])
        if norm == 0.0:
            f[0, k] = 1.0
        else:
            f[:, k] = a_up[:, k] / norm

    per_antenna_tx = np.sum(np.abs(w) ** 2, axis=1)
    sqrt_p = np.sqrt(p)
    rho = np.full((k_users, k_users), 1.0)
    np.fill_diagonal(rho, hwi.rho_si)

    acc = {name: np.zeros(k_users) for name in
           ("d_des", "d_mui", "d_tx", "d_leak", "d_li", "d_rest", "d_tot",
            "u_des", "u_rest")}
    per_antenna_rx = np.zeros(a_up.shape[0])
    e_des_d = np.zeros((l_eves, k_users))
    e_rest_d = np.zeros((l_eves, k_users))
    e_des_u = np.zeros((l_eves, k_users))
    e_rest_u = np.zeros((l_eves, k_users))

    done = 0
    while done < draws:
        c = min(chunk, draws - done)
        s_d = _cn(rng, (c, k_users), 1.0)
        eta_bs = _cn(rng, (c, n_t), hwi.kappa_tx_bs * per_antenna_tx)
        s_u = _cn(rng, (c, k_users), 1.0)
        eta_user = _cn(rng, (c, k_users), kappa_up)

        # --- each user's downlink reception ---
        for k in range(k_users):
            des = s_d[:, k] * v[k, k]
            mui = s_d @ v[k, :] - des
            tx = eta_bs @ bs_rows_user[k]
            leak = ((s_u + eta_user)
                    * (np.sqrt(rho[k] * p) * user_leak[k])[None, :]).sum(axis=1)
            li = _cn(rng, c, noise.user_effective)
            rest = mui + tx + leak + li
            acc["d_des"][k] += np.sum(np.abs(des) ** 2)
            acc["d_mui"][k] += np.sum(np.abs(mui) ** 2)
            acc["d_tx"][k] += np.sum(np.abs(tx) ** 2)
            acc["d_leak"][k] += np.sum(np.abs(leak) ** 2)
            acc["d_li"][k] += np.sum(np.abs(li) ** 2)
            acc["d_rest"][k] += np.sum(np.abs(rest) ** 2)
            acc["d_tot"][k] += np.sum(np.abs(des + rest) ** 2)

        # --- uplink reception at the BS array ---
        streams = (s_u + eta_user) * sqrt_p[None, :]          # (c, K)
        y_up = streams @ a_up.T + _cn(rng, (c, a_up.shape[0]),
                                      noise.bs_residual)
        per_antenna_rx += np.sum(np.abs(y_up) ** 2, axis=0)
        for k in range(k_users):
            des = (sqrt_p[k] * s_u[:, k]) * (f[:, k].conj() @ a_up[:, k])
            total = y_up @ f[:, k].conj()
            acc["u_des"][k] += np.sum(np.abs(des) ** 2)
            acc["u_rest"][k] += np.sum(np.abs(total - des) ** 2)

        # --- eavesdropper receptions ---
        for ell in range(l_eves):
            up_sig = s_u * (sqrt_p * ue[ell])[None, :]
            up_sig_tot = up_sig.sum(axis=1)
            up_hwi = (eta_user * (sqrt_p * ue[ell])[None, :]).sum(axis=1)
            down_sig = s_d * de[ell][None, :]
            down_sig_tot = down_sig.sum(axis=1)
            down_hwi = eta_bs @ bs_rows_eve[ell]
            n_down = _cn(rng, c, noise.eve_down)
            n_up = _cn(rng, c, noise.eve_up)
            for k in range(k_users):
                rest_d = (up_sig_tot + up_hwi + (down_sig_tot - down_sig[:, k])
                          + down_hwi + n_down)
                rest_u = ((up_sig_tot - up_sig[:, k]) + up_hwi + down_sig_tot
                          + down_hwi + n_up)
                e_des_d[ell, k] += np.sum(np.abs(down_sig[:, k]) ** 2)
                e_rest_d[ell, k] += np.sum(np.abs(rest_d) ** 2)
                e_des_u[ell, k] += np.sum(np.abs(up_sig[:, k]) ** 2)
                e_rest_u[ell, k] += np.sum(np.abs(rest_u) ** 2)
        done += c

    n = float(draws)
    for key in acc:
        acc[key] /= n
    per_antenna_rx /= n
    kappa_rx_user = np.asarray(hwi.kappa_rx_user)
    rx_dist_user = kappa_rx_user * acc["d_tot"]
    sinr_down = acc["d_des"] / (acc["d_rest"] + rx_dist_user)

    rx_dist_bs = hwi.kappa_rx_bs * (np.abs(f) ** 2
                                    * per_antenna_rx[:, None]).sum(axis=0)
    sinr_up = acc["u_des"] / (acc["u_rest"] + rx_dist_bs)

    sinr_eve_down = (e_des_d / n) / (e_rest_d / n)
    sinr_eve_up = (e_des_u / n) / (e_rest_u / n)

    return OracleEstimate(
        down_desired=acc["d_des"], down_mui=acc["d_mui"],
        down_tx_distortion=acc["d_tx"], down_uplink_leak=acc["d_leak"],
        down_li_noise=acc["d_li"], down_interference=acc["d_rest"],
        down_total=acc["d_tot"], sinr_down=sinr_down,
        up_desired=acc["u_des"], up_interference=acc["u_rest"],
        up_rx_distortion=rx_dist_bs, sinr_up=sinr_up,
        sinr_eve_down=sinr_eve_down.T, sinr_eve_up=sinr_eve_up.T,
        draws=draws,
    )
