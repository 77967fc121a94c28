"""Rician fading channel generation for the RIS-reflected links.

The system has no direct base-station/user paths: every signal travels
through the RIS. One :class:`ChannelSet` holds a single realization of
the six reflect-link channel groups plus a fresh RIS phase-noise draw.

Geometry is a 2-D plane in meters. Large-scale gain follows
``PL = PL0 - 10*alpha*log10(d/1m)`` in dB, applied per hop (BS-RIS for
the base-station links, RIS-node for user and eavesdropper links).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import CMat


@dataclass(frozen=True)
class Geometry:
    """Node positions in meters on a 2-D plane."""

    bs_pos: tuple[float, float]
    ris_pos: tuple[float, float]
    user_positions: tuple[tuple[float, float], ...]
    eve_positions: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.user_positions) < 1 or len(self.eve_positions) < 1:
            raise ValueError("need at least one user and one eavesdropper")
        for p in (self.bs_pos, *self.user_positions, *self.eve_positions):
            if distance(self.ris_pos, p) <= 0.0:
                raise ValueError(f"node at {p} coincides with the RIS")

    @property
    def num_users(self) -> int:
        return len(self.user_positions)

    @property
    def num_eves(self) -> int:
        return len(self.eve_positions)


@dataclass(frozen=True)
class ChannelParams:
    """Large/small-scale fading parameters shared by all links."""

    path_loss_exponent: float = 2.0
    pl0_db: float = -30.0          # gain at the 1 m reference distance
    rician_factor: float = 10.0
    element_spacing: float = 0.5   # inter-element spacing over wavelength

    def __post_init__(self):
        if self.path_loss_exponent < 0:
            raise ValueError("path_loss_exponent must be >= 0")
        if self.rician_factor < 0:
            raise ValueError("rician_factor must be >= 0")
        if self.element_spacing <= 0:
            raise ValueError("element_spacing must be > 0")


@dataclass(frozen=True)
class SystemSizes:
    """Array sizes: RIS elements, BS tx/rx antennas, users, eavesdroppers."""

    m: int = 8
    n_tx: int = 4
    n_rx: int = 4
    k_users: int = 2
    l_eves: int = 2

    def __post_init__(self):
        for name in ("m", "n_tx", "n_rx", "k_users", "l_eves"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


@dataclass(frozen=True)
class ChannelSet:
    """One realization of all reflect-link channels and RIS phase noise.

    Shapes: ``bs_to_ris`` is M x N_t, ``ris_to_bs`` is M x N_r (stored
    from the RIS side, so its conjugate transpose maps RIS output to the
    BS receive array). User/eavesdropper links are M x 1 columns, one
    per node. ``phase_noise`` holds M phase errors in radians.
    """

    bs_to_ris: CMat                      # downlink hop into the RIS
    ris_to_bs: CMat                      # uplink hop out of the RIS
    ris_to_user: tuple[CMat, ...]        # K downlink user links
    user_to_ris: tuple[CMat, ...]        # K uplink user links
    ris_to_eve_down: tuple[CMat, ...]    # L links carrying downlink leakage
    ris_to_eve_up: tuple[CMat, ...]      # L links carrying uplink leakage
    phase_noise: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = self.bs_to_ris.shape[0]
        if self.ris_to_bs.shape[0] != m:
            raise ValueError("RIS dimension mismatch between BS hops")
        for group in (self.ris_to_user, self.user_to_ris,
                      self.ris_to_eve_down, self.ris_to_eve_up):
            for h in group:
                if h.shape != (m, 1):
                    raise ValueError(f"expected ({m}, 1) link, got {h.shape}")
        if self.phase_noise.shape != (m,):
            raise ValueError("phase_noise must have one entry per element")
        if np.any(np.abs(self.phase_noise) > math.pi / 2 + 1e-12):
            raise ValueError("phase noise outside [-pi/2, pi/2]")

    @property
    def num_elements(self) -> int:
        return self.bs_to_ris.shape[0]

    @property
    def num_users(self) -> int:
        return len(self.ris_to_user)

    @property
    def num_eves(self) -> int:
        return len(self.ris_to_eve_down)


def distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def path_loss_linear(d: float, params: ChannelParams) -> float:
    """Linear power gain at distance ``d`` meters (reference 1 m)."""
    if d <= 0:
        raise ValueError("distance must be > 0")
    pl_db = params.pl0_db - 10.0 * params.path_loss_exponent * math.log10(d)
    return 10.0 ** (pl_db / 10.0)


def steering(count: int, angle: float, spacing: float) -> CMat:
    """ULA array response: unit-modulus column of length ``count``."""
    if count < 1:
        raise ValueError("element count must be >= 1")
    idx = np.arange(count)
    phase = 2.0 * math.pi * spacing * idx * math.sin(angle)
    return np.exp(1j * phase).reshape(count, 1)


def los_component(rx_count: int, tx_count: int, aoa: float, aod: float,
                  spacing: float) -> CMat:
    """Rank-1 line-of-sight matrix: rx response times conjugated tx response."""
    a_rx = steering(rx_count, aoa, spacing)
    a_tx = steering(tx_count, aod, spacing)
    return a_rx @ a_tx.conj().T


def sample_rician(rng: np.random.Generator, shape: tuple[int, int],
                  gain: float, rician_factor: float, aoa: float, aod: float,
                  spacing: float) -> CMat:
    """Draw one Rician channel: scaled blend of LoS and i.i.d. scattering.

    The scattered part has unit-variance circularly-symmetric complex
    Gaussian entries; ``gain`` is the linear large-scale power gain.
    """
    if gain < 0 or rician_factor < 0:
        raise ValueError("gain and rician_factor must be >= 0")
    rx, tx = shape
    los = los_component(rx, tx, aoa, aod, spacing)
    nlos = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) \
        / math.sqrt(2.0)
    w_los = math.sqrt(rician_factor / (rician_factor + 1.0))
    w_nlos = math.sqrt(1.0 / (rician_factor + 1.0))
    return math.sqrt(gain) * (w_los * los + w_nlos * nlos)


def sample_phase_noise(rng: np.random.Generator, m: int) -> np.ndarray:
    """M i.i.d. uniform phase errors on [-pi/2, pi/2]."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return rng.uniform(-math.pi / 2, math.pi / 2, size=m)


def random_geometry(rng: np.random.Generator, k_users: int, l_eves: int,
                    bs_pos=(0.0, 0.0), ris_pos=(20.0, 100.0),
                    box_x=(100.0, 200.0), box_y=(0.0, 100.0)) -> Geometry:
    """BS and RIS at fixed posts; users then eavesdroppers uniform in a box."""
    def draw(n):
        return tuple(
            (float(rng.uniform(*box_x)), float(rng.uniform(*box_y)))
            for _ in range(n)
        )
    users = draw(k_users)
    eves = draw(l_eves)
    return Geometry(bs_pos=bs_pos, ris_pos=ris_pos,
                    user_positions=users, eve_positions=eves)


def _link(rng, shape, d, params):
    aoa = rng.uniform(-math.pi / 2, math.pi / 2)
    aod = rng.uniform(-math.pi / 2, math.pi / 2)
    gain = path_loss_linear(d, params)
    return sample_rician(rng, shape, gain, params.rician_factor, aoa, aod,
                         params.element_spacing)


def sample_channel_set(rng: np.random.Generator, geometry: Geometry,
                       params: ChannelParams, sizes: SystemSizes) -> ChannelSet:
    """Draw one full channel realization.

    Every link gets independent AoA/AoD (uniform on [-pi/2, pi/2]) and
    an independent scattering draw; the two BS-RIS hops are sampled
    separately (no reciprocity). Draw order is fixed: BS hops, user
    links (down then up, per user), eavesdropper links (down then up,
    per eavesdropper), then phase noise, so a given generator state
    reproduces the set bit-exactly.
    """
    if geometry.num_users != sizes.k_users or geometry.num_eves != sizes.l_eves:
        raise ValueError("geometry does not match sizes")
    d_bs = distance(geometry.bs_pos, geometry.ris_pos)
    bs_to_ris = _link(rng, (sizes.m, sizes.n_tx), d_bs, params)
    ris_to_bs = _link(rng, (sizes.m, sizes.n_rx), d_bs, params)

    ris_to_user, user_to_ris = [], []
    for pos in geometry.user_positions:
        d = distance(geometry.ris_pos, pos)
        ris_to_user.append(_link(rng, (sizes.m, 1), d, params))
        user_to_ris.append(_link(rng, (sizes.m, 1), d, params))

    eve_down, eve_up = [], []
    for pos in geometry.eve_positions:
        d = distance(geometry.ris_pos, pos)
        eve_down.append(_link(rng, (sizes.m, 1), d, params))
        eve_up.append(_link(rng, (sizes.m, 1), d, params))

    return ChannelSet(
        bs_to_ris=bs_to_ris,
        ris_to_bs=ris_to_bs,
        ris_to_user=tuple(ris_to_user),
        user_to_ris=tuple(user_to_ris),
        ris_to_eve_down=tuple(eve_down),
        ris_to_eve_up=tuple(eve_up),
        phase_noise=sample_phase_noise(rng, sizes.m),
    )


def _mat_to_pairs(a: CMat) -> list:
    return [[float(x.real), float(x.imag)] for x in a.ravel()]


def _pairs_to_mat(pairs, shape) -> CMat:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    return flat.reshape(shape)


def save_channel_set(path: str, channels: ChannelSet) -> None:
    """Dump one realization as self-describing JSON of (re, im) pairs."""
    def group(mats):
        return [{"shape": list(m.shape), "entries": _mat_to_pairs(m)}
                for m in mats]
    doc = {
        "format": "risfd-channel-set",
        "version": 1,
        "bs_to_ris": group([channels.bs_to_ris])[0],
        "ris_to_bs": group([channels.ris_to_bs])[0],
        "ris_to_user": group(channels.ris_to_user),
        "user_to_ris": group(channels.user_to_ris),
        "ris_to_eve_down": group(channels.ris_to_eve_down),
        "ris_to_eve_up": group(channels.ris_to_eve_up),
        "phase_noise": [float(x) for x in channels.phase_noise],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_channel_set(path: str) -> ChannelSet:
    """Round-trip-exact inverse of :func:`save_channel_set`."""
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != "risfd-channel-set":
        raise ValueError(f"{path} is not a channel dump")

    def mat(rec):
        return _pairs_to_mat(rec["entries"], tuple(rec["shape"]))

    return ChannelSet(
        bs_to_ris=mat(doc["bs_to_ris"]),
        ris_to_bs=mat(doc["ris_to_bs"]),
        ris_to_user=tuple(mat(r) for r in doc["ris_to_user"]),
        user_to_ris=tuple(mat(r) for r in doc["user_to_ris"]),
        ris_to_eve_down=tuple(mat(r) for r in doc["ris_to_eve_down"]),
        ris_to_eve_up=tuple(mat(r) for r in doc["ris_to_eve_up"]),
        phase_noise=np.array(doc["phase_noise"], dtype=np.float64),
    )
