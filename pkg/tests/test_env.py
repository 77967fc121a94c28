import numpy as np
import pytest

from conftest import make_channels
from risfd.channels import SystemSizes
from risfd.env import (EnvConfig, RunningStats, SecrecyEnv, decode_action,
                       initial_action, whiten)
from risfd.linkbudget import evaluate_links


def make_env(seed=0, sizes=None, **kwargs):
    cfg = EnvConfig.build(sizes or SystemSizes(), **kwargs)
    return SecrecyEnv(cfg, np.random.default_rng(seed)), cfg


# --- dimensions ---

def test_default_state_length_is_92():
    _, cfg = make_env()
    assert cfg.state_dim == 92
    env, _ = make_env()
    assert env.reset().shape == (92,)


def test_default_action_length_is_32():
    _, cfg = make_env()
    assert cfg.action_dim == 32


@pytest.mark.parametrize("trial", range(12))
def test_state_length_formula_random_sizes(trial):
    rng = np.random.default_rng(100 + trial)
    sizes = SystemSizes(m=int(rng.integers(1, 9)), n_tx=int(rng.integers(1, 9)),
                        n_rx=int(rng.integers(1, 9)),
                        k_users=int(rng.integers(1, 9)),
                        l_eves=int(rng.integers(1, 9)))
    cfg = EnvConfig.build(sizes, user_power=0.1)
    expected = (4 + 2 * sizes.k_users ** 2 + 4 * sizes.l_eves * sizes.k_users
                + 2 * sizes.n_rx * sizes.k_users + 4 * sizes.k_users
                + 3 * sizes.m + 2 * sizes.n_tx * sizes.k_users)
    assert cfg.state_dim == expected
    env = SecrecyEnv(cfg, np.random.default_rng(trial))
    state = env.reset()
    assert state.shape == (expected,)
    assert np.all(np.isfinite(state))
    result = env.step(np.random.default_rng(trial + 1)
                      .uniform(-1, 1, cfg.action_dim))
    assert result.next_state.shape == (expected,)
    assert result.reward >= 0.0


# --- reset ---

def test_reset_seed_determinism():
    env_a, _ = make_env(seed=7)
    env_b, _ = make_env(seed=7)
    np.testing.assert_array_equal(env_a.reset(), env_b.reset())


def test_reset_initial_reflection_is_identity():
    sizes = SystemSizes()
    act = initial_action(sizes, p_max=0.1)
    np.testing.assert_array_equal(np.diag(act.theta_matrix()),
                                  np.ones(sizes.m))
    assert np.sum(np.abs(act.w) ** 2) == pytest.approx(0.1)
    # identity columns
    assert np.count_nonzero(act.w) == min(sizes.n_tx, sizes.k_users)


def test_reset_with_replayed_channels():
    channels, sizes = make_channels(30)
    env, _ = make_env(seed=1, sizes=sizes)
    s1 = env.reset(channels=channels)
    env2, _ = make_env(seed=99, sizes=sizes)   # different env rng
    s2 = env2.reset(channels=channels)
    # identical channels and initial action: the rate block must agree
    np.testing.assert_allclose(s1[:4], s2[:4])


# --- decode ---

def test_decode_action_constraints_hold():
    _, cfg = make_env()
    rng = np.random.default_rng(31)
    for _ in range(50):
        act = decode_action(rng.uniform(-1, 1, cfg.action_dim), cfg.p_max,
                            cfg.sizes)
        assert np.sum(np.abs(act.w) ** 2) <= cfg.p_max + 1e-9
        assert np.max(np.abs(np.abs(np.diag(act.theta_matrix())) - 1.0)) <= 1e-9


def test_decode_encode_identity():
    _, cfg = make_env()
    rng = np.random.default_rng(32)
    act = decode_action(rng.uniform(-1, 1, cfg.action_dim), cfg.p_max,
                        cfg.sizes)
    back = decode_action(act.to_flat(), cfg.p_max, cfg.sizes)
    np.testing.assert_allclose(back.w, act.w, atol=1e-12)
    np.testing.assert_allclose(np.exp(1j * back.theta_phases),
                               np.exp(1j * act.theta_phases), atol=1e-12)


# --- whitening ---

def test_whiten_constant_coordinate_is_zero():
    stats = RunningStats(3)
    for _ in range(5):
        out = whiten(np.array([2.0, -1.0, 0.5]), stats)
        np.testing.assert_array_equal(out, np.zeros(3))


def test_whiten_standardizes_gaussian_stream():
    rng = np.random.default_rng(33)
    stats = RunningStats(4)
    outs = np.array([whiten(rng.standard_normal(4) * 3.0 + 5.0, stats)
                     for _ in range(10_000)])
    tail = outs[100:]
    assert np.all(np.abs(tail.mean(axis=0)) < 0.05)
    assert np.all(tail.std(axis=0) > 0.9) and np.all(tail.std(axis=0) < 1.1)


def test_whiten_monotone_per_coordinate():
    stats = RunningStats(1)
    for x in (0.0, 1.0, 2.0, 5.0):
        whiten(np.array([x]), stats)
    lo = stats.apply(np.array([1.0]))
    hi = stats.apply(np.array([3.0]))
    assert hi[0] > lo[0]


# --- stepping ---

def test_step_before_reset_raises():
    env, cfg = make_env()
    with pytest.raises(RuntimeError):
        env.step(np.zeros(cfg.action_dim))


def test_step_reward_matches_link_budget():
    env, cfg = make_env(seed=40)
    env.reset()
    phase_noise = env._phase_noise.copy()
    channels = env.channels
    rng = np.random.default_rng(41)
    flat = rng.uniform(-1, 1, cfg.action_dim)
    result = env.step(flat)
    from dataclasses import replace
    act = decode_action(flat, cfg.p_max, cfg.sizes)
    budget, _ = evaluate_links(replace(channels, phase_noise=phase_noise),
                               act, cfg.hwi, cfg.noise, cfg.user_powers)
    assert result.reward == budget.ssr
    assert result.reward == result.budget.ssr


def test_step_deterministic_given_seed():
    results = []
    for _ in range(2):
        env, cfg = make_env(seed=42)
        env.reset()
        rng = np.random.default_rng(43)
        results.append(env.step(rng.uniform(-1, 1, cfg.action_dim)))
    np.testing.assert_array_equal(results[0].next_state,
                                  results[1].next_state)
    assert results[0].reward == results[1].reward


def test_step_fixed_phase_noise_repeatable_reward():
    env, cfg = make_env(seed=44, phase_noise_per_step=False)
    env.reset()
    rng = np.random.default_rng(45)
    flat = rng.uniform(-1, 1, cfg.action_dim)
    r1 = env.step(flat).reward
    r2 = env.step(flat).reward
    assert r1 == r2


def test_reward_nonnegative_over_random_rollout():
    env, cfg = make_env(seed=46)
    env.reset()
    rng = np.random.default_rng(47)
    for _ in range(40):
        assert env.step(rng.uniform(-1, 1, cfg.action_dim)).reward >= 0.0


# --- state layout ---

def test_state_rate_block_has_four_entries():
    env, cfg = make_env(seed=48)
    env.reset()
    rng = np.random.default_rng(49)
    result = env.step(rng.uniform(-1, 1, cfg.action_dim))
    budget = result.budget
    expected = np.array([budget.rate_down.sum(), budget.rate_up.sum(),
                         budget.rate_eve.max(axis=1).sum(), budget.ssr])
    np.testing.assert_allclose(result.next_state[:4], expected)


def test_state_zero_precoder_zeroes_bs_cascade_blocks():
    env, cfg = make_env(seed=50)
    env.reset()
    flat = np.zeros(cfg.action_dim)
    result = env.step(flat)
    k, l = cfg.sizes.k_users, cfg.sizes.l_eves
    start = 4
    bs_users = result.next_state[start:start + 2 * k * k]
    bs_eves = result.next_state[start + 2 * k * k:
                                start + 2 * k * k + 2 * l * k]
    np.testing.assert_array_equal(bs_users, 0.0)
    np.testing.assert_array_equal(bs_eves, 0.0)


def test_state_eve_permutation_moves_only_eve_blocks():
    channels, sizes = make_channels(51)
    cfg = EnvConfig.build(sizes)
    env = SecrecyEnv(cfg, np.random.default_rng(52))
    s1 = env.reset(channels=channels)

    swapped = type(channels)(
        bs_to_ris=channels.bs_to_ris, ris_to_bs=channels.ris_to_bs,
        ris_to_user=channels.ris_to_user, user_to_ris=channels.user_to_ris,
        ris_to_eve_down=channels.ris_to_eve_down[::-1],
        ris_to_eve_up=channels.ris_to_eve_up[::-1],
        phase_noise=channels.phase_noise)
    env2 = SecrecyEnv(cfg, np.random.default_rng(52))
    s2 = env2.reset(channels=swapped)

    k, l, m = sizes.k_users, sizes.l_eves, sizes.m
    i0 = 4
    i1 = i0 + 2 * k * k                  # start of BS->eves block
    i2 = i1 + 2 * l * k                  # start of users->BS block
    i3 = i2 + 2 * sizes.n_rx * k         # start of users->eves block
    i4 = i3 + 2 * l * k
    np.testing.assert_allclose(s1[i0:i1], s2[i0:i1])       # user block same
    np.testing.assert_allclose(s1[i2:i3], s2[i2:i3])       # uplink block same
    # eve blocks are row-permuted: same multiset of entries
    for a, b in ((s1[i1:i2], s2[i1:i2]), (s1[i3:i4], s2[i3:i4])):
        re_a = np.sort(a.reshape(2, l, k)[0].ravel())
        re_b = np.sort(b.reshape(2, l, k)[0].ravel())
        np.testing.assert_allclose(re_a, re_b)
    # rates are eve-permutation invariant
    np.testing.assert_allclose(s1[:4], s2[:4])


def test_build_state_prev_action_slot():
    env, cfg = make_env(seed=53)
    env.reset()
    rng = np.random.default_rng(54)
    flat = rng.uniform(-1, 1, cfg.action_dim)
    result = env.step(flat)
    act = decode_action(flat, cfg.p_max, cfg.sizes)
    s = cfg.sizes
    start = (4 + 2 * s.k_users ** 2 + 4 * s.l_eves * s.k_users
             + 2 * s.n_rx * s.k_users + s.m)
    block = result.next_state[start:start + cfg.action_dim]
    np.testing.assert_allclose(block, act.to_flat())
