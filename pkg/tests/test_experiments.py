import hashlib
import os

import numpy as np
import pytest

from risfd.cli import main
from risfd.experiments import (ConfigError, ExperimentSpec, convergence_step,
                               load_config, make_agent_config,
                               make_env_config, moving_average,
                               parse_config_file, resolve_spec_config,
                               run_scenario, summarize, thermal_noise_watts)

TINY = (("agent.steps", "40"), ("agent.batch_size", "8"),
        ("agent.replay_capacity", "64"))


def sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


# --- configuration ---

def test_defaults_match_reference_settings():
    cfg = load_config()
    assert cfg["env.k_users"] == 2 and cfg["env.l_eves"] == 2
    assert cfg["env.m_elements"] == 8
    assert cfg["env.n_tx"] == 4 and cfg["env.n_rx"] == 4
    assert cfg["env.user_power"] == pytest.approx(0.1)       # 100 mW
    assert cfg["env.path_loss_exponent"] == 2.0
    assert cfg["env.rician_factor"] == 10.0
    assert cfg["env.bandwidth_hz"] == 1e7
    assert cfg["env.noise_density_dbm_per_hz"] == -174.0
    assert cfg["env.rho_si"] == 1.0
    assert cfg["env.kappa"] == 0.01
    assert cfg["agent.discount"] == 0.9
    assert cfg["agent.actor_lr"] == 0.0005
    assert cfg["agent.critic_lr"] == 0.001
    assert cfg["agent.batch_size"] == 128
    assert cfg["agent.replay_capacity"] == 100_000
    assert cfg["agent.steps"] == 20_000


def test_noise_power_from_defaults():
    cfg = load_config()
    watts = thermal_noise_watts(cfg)
    # -174 dBm/Hz over 10 MHz: -104 dBm, i.e. about 3.98e-11 mW
    assert watts * 1000.0 == pytest.approx(3.981e-11, rel=1e-3)


def test_dbm_parsing_for_power_keys():
    cfg = load_config(overrides={"env.p_max": "20dBm"})
    assert cfg["env.p_max"] == pytest.approx(0.1)
    cfg = load_config(overrides={"env.p_max": "0.25"})
    assert cfg["env.p_max"] == pytest.approx(0.25)


def test_unknown_key_is_fatal_with_key_name():
    with pytest.raises(ConfigError, match="env.bogus"):
        load_config(overrides={"env.bogus": "1"})


def test_out_of_range_value_is_fatal_with_range():
    with pytest.raises(ConfigError, match=r"\[0, 1\]"):
        load_config(overrides={"agent.discount": "1.5"})


def test_unparseable_value_is_fatal():
    with pytest.raises(ConfigError, match="agent.batch_size"):
        load_config(overrides={"agent.batch_size": "many"})


def test_config_file_parsing(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# comment\nenv.kappa = 0.05\nagent.steps = 10\n")
    values = parse_config_file(str(path))
    cfg = load_config(file_values=values)
    assert cfg["env.kappa"] == 0.05
    assert cfg["agent.steps"] == 10


def test_config_file_missing():
    with pytest.raises(ConfigError, match="not found"):
        parse_config_file("/nonexistent/path.cfg")


def test_env_and_agent_config_construction():
    cfg = load_config(overrides={"env.p_max": "30dBm"})
    env_cfg = make_env_config(cfg)
    assert env_cfg.p_max == pytest.approx(1.0)
    assert env_cfg.sizes.m == 8
    assert env_cfg.state_dim == 92
    agent_cfg = make_agent_config(cfg)
    assert agent_cfg.steps_per_episode == 20_000


def test_spec_rejects_unknown_scenario():
    with pytest.raises(ConfigError, match="unknown scenario"):
        ExperimentSpec(scenario="nope", seeds=(0,), outdir="/tmp/x")


def test_spec_rejects_empty_seeds():
    with pytest.raises(ConfigError, match="seed list"):
        ExperimentSpec(scenario="convergence", seeds=(), outdir="/tmp/x")


def test_spec_rejects_unknown_scheme():
    with pytest.raises(ConfigError, match="unknown scheme"):
        ExperimentSpec(scenario="convergence", seeds=(0,), outdir="/tmp/x",
                       schemes=("sgd",))


def test_scenario_desk_defaults_apply_and_yield_to_overrides():
    spec = ExperimentSpec(scenario="ssr_vs_pmax", seeds=(0,), outdir="/tmp/x")
    cfg = resolve_spec_config(spec)
    assert cfg["agent.steps"] == 4000
    spec = ExperimentSpec(scenario="ssr_vs_pmax", seeds=(0,), outdir="/tmp/x",
                          overrides=(("agent.steps", "123"),))
    assert resolve_spec_config(spec)["agent.steps"] == 123


# --- scenario runs (tiny) ---

def test_convergence_rows_and_header(tmp_path):
    spec = ExperimentSpec(scenario="convergence", seeds=(0, 1),
                          outdir=str(tmp_path), overrides=TINY)
    files = run_scenario(spec)
    assert len(files) == 1
    with open(files[0]) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# scenario=convergence")
    assert "seeds=0,1" in lines[0]
    assert lines[1] == "seed,step,instant_reward,average_reward"
    assert len(lines) == 2 + 2 * 40     # one row per (seed, step)


def test_sweep_pmax_points(tmp_path):
    spec = ExperimentSpec(scenario="ssr_vs_pmax", seeds=(0,),
                          outdir=str(tmp_path), overrides=TINY,
                          schemes=("ddpg_fd",))
    files = run_scenario(spec)
    with open(files[0]) as fh:
        lines = [l for l in fh.read().splitlines() if l and not
                 l.startswith("#")]
    assert lines[0] == "seed,sweep_param,sweep_value,scheme,best_ssr"
    assert len(lines) - 1 == 4          # 10, 20, 30, 40 dBm
    values = [float(l.split(",")[2]) for l in lines[1:]]
    assert values == [10.0, 20.0, 30.0, 40.0]


def test_sweep_reruns_are_byte_identical(tmp_path):
    hashes = []
    for sub in ("a", "b"):
        spec = ExperimentSpec(scenario="ssr_vs_kappa", seeds=(0,),
                              outdir=str(tmp_path / sub), overrides=TINY,
                              schemes=("ddpg_fd",))
        files = run_scenario(spec)
        hashes.append([sha(f) for f in files])
    assert hashes[0] == hashes[1]


def test_worker_count_does_not_change_bytes(tmp_path):
    specs = [ExperimentSpec(scenario="ssr_vs_M", seeds=(0, 1),
                            outdir=str(tmp_path / sub), overrides=TINY,
                            schemes=("ddpg_fd",), workers=w)
             for sub, w in (("w1", 1), ("w2", 2))]
    hashes = [[sha(f) for f in run_scenario(s)] for s in specs]
    assert hashes[0] == hashes[1]


def test_schemes_run_all_variants(tmp_path):
    spec = ExperimentSpec(
        scenario="ssr_vs_pmax", seeds=(0,), outdir=str(tmp_path),
        overrides=TINY + (("run.pmax_sweep_dbm", "20"),),
        schemes=("ddpg_fd", "ddpg_hd", "td3_fd", "td3_hd", "fixed_phase_fd",
                 "fixed_phase_hd", "random"))
    files = run_scenario(spec)
    with open(files[0]) as fh:
        rows = [l for l in fh.read().splitlines()
                if l and not l.startswith("#")][1:]
    assert len(rows) == 7
    schemes = {r.split(",")[3] for r in rows}
    assert len(schemes) == 7


def test_init_robustness_shares_channels(tmp_path):
    spec = ExperimentSpec(scenario="init_robustness", seeds=(0, 1),
                          outdir=str(tmp_path), overrides=TINY)
    files = run_scenario(spec)
    assert any(f.endswith("channels.json") for f in files)
    from risfd.channels import load_channel_set
    dump = [f for f in files if f.endswith("channels.json")][0]
    channels = load_channel_set(dump)
    assert channels.bs_to_ris.shape == (8, 4)


def test_cdf_scenario_emits_one_file_per_setting(tmp_path):
    spec = ExperimentSpec(scenario="cdf", seeds=(0,), outdir=str(tmp_path),
                          overrides=TINY)
    files = run_scenario(spec)
    names = sorted(os.path.basename(f) for f in files)
    assert names == ["rewards_ddpg_fd_nt2nr2m8p10.csv",
                     "rewards_ddpg_fd_nt4nr4m8p10.csv"]


def test_lr_and_gamma_sweeps_emit_labeled_files(tmp_path):
    spec = ExperimentSpec(scenario="lr_sweep", seeds=(0,),
                          outdir=str(tmp_path / "lr"),
                          overrides=TINY + (("run.lr_sweep", "0.01,0.001"),))
    files = run_scenario(spec)
    assert sorted(os.path.basename(f) for f in files) == \
        ["rewards_ddpg_fd_lr0.001.csv", "rewards_ddpg_fd_lr0.01.csv"]
    spec = ExperimentSpec(scenario="gamma_sweep", seeds=(0,),
                          outdir=str(tmp_path / "g"),
                          overrides=TINY + (("run.gamma_sweep", "0.5,0.9"),))
    files = run_scenario(spec)
    assert sorted(os.path.basename(f) for f in files) == \
        ["rewards_ddpg_fd_gamma0.5.csv", "rewards_ddpg_fd_gamma0.9.csv"]


# --- summarize ---

def test_summarize_sweep_stats(tmp_path):
    path = tmp_path / "sweep.csv"
    path.write_text("# config\n"
                    "seed,sweep_param,sweep_value,scheme,best_ssr\n"
                    "0,p_max_dbm,20.0,ddpg_fd,4.0\n"
                    "1,p_max_dbm,20.0,ddpg_fd,6.0\n"
                    "0,p_max_dbm,30.0,ddpg_fd,7.0\n")
    out = summarize([str(path)], str(tmp_path / "summary.csv"))
    lines = open(out).read().splitlines()
    row20 = [l for l in lines if ",20.0," in l][0].split(",")
    assert float(row20[7]) == pytest.approx(5.0)      # mean
    assert float(row20[8]) == pytest.approx(1.0)      # std
    assert float(row20[9]) == 4.0 and float(row20[10]) == 6.0
    row30 = [l for l in lines if ",30.0," in l][0].split(",")
    assert float(row30[7]) == 7.0
    assert float(row30[8]) == 0.0                     # single seed


def test_summarize_reward_file(tmp_path):
    rng = np.random.default_rng(0)
    steps = 700
    rewards = np.concatenate([np.zeros(300), np.ones(steps - 300)])
    path = tmp_path / "rewards.csv"
    with open(path, "w") as fh:
        fh.write("# config\nseed,step,instant_reward,average_reward\n")
        for t, r in enumerate(rewards):
            fh.write(f"0,{t},{r},{r}\n")
    out = summarize([str(path)], str(tmp_path / "summary.csv"))
    lines = open(out).read().splitlines()
    row = [l for l in lines if ",reward," in l][0].split(",")
    step = int(row[13])
    assert step <= steps
    ma = moving_average(rewards, 500)
    assert step == convergence_step(rewards)
    assert ma[step - 499] >= 0.95 * ma[-1]


def test_summarize_malformed_csv(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("seed,step,instant_reward,average_reward\n"
                    "0,0,1.0,1.0\n"
                    "0,1,not_a_number,1.0\n")
    with pytest.raises(ConfigError, match="bad.csv:3"):
        summarize([str(path)], str(tmp_path / "out.csv"))


def test_convergence_step_bounded():
    rng = np.random.default_rng(1)
    inst = rng.uniform(0, 1, 2000)
    assert convergence_step(inst) <= 1999


# --- CLI ---

def test_cli_run_and_summarize(tmp_path, capsys):
    out = tmp_path / "cli"
    code = main(["run", "--scenario", "convergence", "--seeds", "0",
                 "--outdir", str(out), "--set", "agent.steps=30",
                 "--set", "agent.batch_size=8",
                 "--set", "agent.replay_capacity=32"])
    assert code == 0
    reward_csv = out / "rewards_ddpg_fd.csv"
    assert reward_csv.exists()
    code = main(["summarize", "--out", str(out / "summary.csv"),
                 str(reward_csv)])
    assert code == 0
    assert (out / "summary.csv").exists()


def test_cli_reports_unknown_key(tmp_path, capsys):
    code = main(["run", "--scenario", "convergence", "--seeds", "0",
                 "--outdir", str(tmp_path), "--set", "bad.key=1"])
    assert code == 1
    assert "bad.key" in capsys.readouterr().err


def test_cli_uses_outdir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("RISFD_OUTDIR", str(tmp_path / "envdir"))
    code = main(["run", "--scenario", "convergence", "--seeds", "0",
                 "--set", "agent.steps=25", "--set", "agent.batch_size=8",
                 "--set", "agent.replay_capacity=32"])
    assert code == 0
    assert (tmp_path / "envdir" / "rewards_ddpg_fd.csv").exists()


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("agent.steps = 20\nagent.batch_size = 8\n"
                   "agent.replay_capacity = 32\n")
    code = main(["run", "--scenario", "convergence", "--seeds", "0",
                 "--outdir", str(tmp_path / "out"), "--config", str(cfg)])
    assert code == 0
