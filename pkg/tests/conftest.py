"""Shared helpers for the test suite."""

import numpy as np

from risfd.channels import ChannelParams, Geometry, SystemSizes, \
    sample_channel_set
from risfd.linkbudget import Action


def fixed_geometry(k=2, l=2):
    """Deterministic node placement inside the user box."""
    users = tuple((150.0 + 10 * i, 40.0 + 5 * i) for i in range(k))
    eves = tuple((120.0 + 10 * i, 70.0 + 5 * i) for i in range(l))
    return Geometry(bs_pos=(0.0, 0.0), ris_pos=(20.0, 100.0),
                    user_positions=users, eve_positions=eves)


def make_channels(seed=0, sizes=None, k=None, l=None):
    """One seeded channel realization (returns channels, sizes)."""
    sizes = sizes or SystemSizes()
    if k is not None:
        sizes = SystemSizes(m=sizes.m, n_tx=sizes.n_tx, n_rx=sizes.n_rx,
                            k_users=k, l_eves=l)
    geometry = fixed_geometry(sizes.k_users, sizes.l_eves)
    channels = sample_channel_set(np.random.default_rng(seed), geometry,
                                  ChannelParams(), sizes)
    return channels, sizes


def random_action(rng, sizes, p_max=0.1):
    flat = rng.uniform(-1, 1, 2 * sizes.n_tx * sizes.k_users + 2 * sizes.m)
    return Action.from_flat(flat, p_max, sizes)
