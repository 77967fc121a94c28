"""Scenario orchestration: seeded runs, sweeps and CSV emission.

A scenario is a grid of (scheme, sweep value, seed) points. Every point
trains one agent for one episode and reports either its per-step reward
trace or its best sum secrecy rate. Results are deterministic functions
of the resolved configuration and the seed; reruns produce byte-identical
files.

Two CSV schemas are used:

  reward files:  seed,step,instant_reward,average_reward
  sweep files:   seed,sweep_param,sweep_value,scheme,best_ssr

Each file opens with a ``#`` comment recording the resolved
configuration and the seed list.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .agents import (AgentConfig, DdpgAgent, RandomAgent, Td3Agent,
                     baseline_hd, fixed_phase_map, run_episode)
from .channels import ChannelParams, SystemSizes, sample_channel_set, \
    random_geometry, save_channel_set
from .env import EnvConfig, SecrecyEnv, decode_action
from .linkbudget import HwiConfig, NoiseConfig

SCHEMES = ("ddpg_fd", "ddpg_hd", "td3_fd", "td3_hd",
           "fixed_phase_fd", "fixed_phase_hd", "random")


class ConfigError(Exception):
    """Raised for unknown configuration keys or out-of-range values."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts * 1000.0)


def _parse_power(text: str) -> float:
    """Watts, or a dBm-suffixed string like ``20dBm``."""
    text = text.strip()
    match = re.fullmatch(r"(-?\d+(?:\.\d+)?)\s*dbm", text, re.IGNORECASE)
    if match:
        return dbm_to_watts(float(match.group(1)))
    return float(text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(item_parser):
    def parse(text: str):
        return tuple(item_parser(part.strip())
                     for part in text.split(",") if part.strip())
    return parse


def _in_range(lo=None, hi=None):
    def check(v):
        if lo is not None and v < lo:
            return False
        if hi is not None and v > hi:
            return False
        return True
    return check


# key -> (parser, validator, human-readable range)
_CONFIG_SCHEMA = {
    "env.k_users": (int, _in_range(1, 8), "integer in [1, 8]"),
    "env.l_eves": (int, _in_range(1, 8), "integer in [1, 8]"),
    "env.m_elements": (int, _in_range(1, 64), "integer in [1, 64]"),
    "env.n_tx": (int, _in_range(1, 16), "integer in [1, 16]"),
    "env.n_rx": (int, _in_range(1, 16), "integer in [1, 16]"),
    "env.p_max": (_parse_power, _in_range(lo=1e-12), "power > 0 (watts or dBm)"),
    "env.user_power": (_parse_power, _in_range(lo=0.0), "power >= 0 (watts or dBm)"),
    "env.kappa": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "env.rho_si": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "env.path_loss_exponent": (float, _in_range(0.0, 8.0), "float in [0, 8]"),
    "env.pl0_db": (float, _in_range(-200.0, 0.0), "dB in [-200, 0]"),
    "env.rician_factor": (float, _in_range(lo=0.0), "float >= 0"),
    "env.element_spacing": (float, _in_range(lo=1e-6), "float > 0"),
    "env.bandwidth_hz": (float, _in_range(lo=1.0), "Hz >= 1"),
    "env.noise_density_dbm_per_hz": (float, _in_range(-300.0, 0.0),
                                     "dBm/Hz in [-300, 0]"),
    "env.phase_noise_per_step": (_parse_bool, lambda v: True, "boolean"),
    "agent.discount": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "agent.actor_lr": (float, _in_range(lo=1e-12), "float > 0"),
    "agent.critic_lr": (float, _in_range(lo=1e-12), "float > 0"),
    "agent.actor_blend": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "agent.critic_blend": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "agent.batch_size": (int, _in_range(lo=1), "integer >= 1"),
    "agent.replay_capacity": (int, _in_range(lo=1), "integer >= 1"),
    "agent.steps": (int, _in_range(lo=1), "integer >= 1"),
    "agent.noise_sigma": (float, _in_range(lo=0.0), "float >= 0"),
    "agent.noise_decay": (float, _in_range(1e-6, 1.0), "float in (0, 1]"),
    "agent.noise_floor": (float, _in_range(lo=0.0), "float >= 0"),
    "run.smoothing": (float, _in_range(0.0, 1.0), "float in [0, 1]"),
    "run.pmax_sweep_dbm": (_parse_list(float), lambda v: len(v) > 0,
                           "comma-separated dBm values"),
    "run.kappa_sweep": (_parse_list(float), lambda v: len(v) > 0,
                        "comma-separated kappa values"),
    "run.m_sweep": (_parse_list(int), lambda v: len(v) > 0,
                    "comma-separated element counts"),
    "run.alpha_sweep": (_parse_list(float), lambda v: len(v) > 0,
                        "comma-separated exponents"),
    "run.lr_sweep": (_parse_list(float), lambda v: len(v) > 0,
                     "comma-separated learning rates"),
    "run.gamma_sweep": (_parse_list(float), lambda v: len(v) > 0,
                        "comma-separated discount factors"),
    "run.cdf_settings": (_parse_list(str), lambda v: len(v) > 0,
                         "comma-separated n_tx:n_rx:m:p_dbm tuples"),
}

DEFAULTS = {
    "env.k_users": "2",
    "env.l_eves": "2",
    "env.m_elements": "8",
    "env.n_tx": "4",
    "env.n_rx": "4",
    "env.p_max": "20dBm",
    "env.user_power": "0.1",
    "env.kappa": "0.01",
    "env.rho_si": "1.0",
    "env.path_loss_exponent": "2.0",
    "env.pl0_db": "-30.0",
    "env.rician_factor": "10.0",
    "env.element_spacing": "0.5",
    "env.bandwidth_hz": "1e7",
    "env.noise_density_dbm_per_hz": "-174.0",
    "env.phase_noise_per_step": "true",
    "agent.discount": "0.9",
    "agent.actor_lr": "0.0005",
    "agent.critic_lr": "0.001",
    "agent.actor_blend": "0.005",
    "agent.critic_blend": "0.005",
    "agent.batch_size": "128",
    "agent.replay_capacity": "100000",
    "agent.steps": "20000",
    "agent.noise_sigma": "0.1",
    "agent.noise_decay": "0.9995",
    "agent.noise_floor": "0.001",
    "run.smoothing": "0.995",
    "run.pmax_sweep_dbm": "10,20,30,40",
    "run.kappa_sweep": "0.01,0.05,0.1",
    "run.m_sweep": "8,16",
    "run.alpha_sweep": "2.0,2.4,2.8",
    "run.lr_sweep": "0.01,0.001,0.0001",
    "run.gamma_sweep": "0.3,0.5,0.7,0.9",
    "run.cdf_settings": "2:2:8:10,4:4:8:10",
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One reproducible scenario invocation."""

    scenario: str
    seeds: tuple[int, ...]
    outdir: str
    overrides: tuple[tuple[str, str], ...] = ()
    schemes: tuple[str, ...] | None = None
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario: {self.scenario!r} "
                              f"(known: {', '.join(sorted(SCENARIOS))})")
        if not self.seeds:
            raise ConfigError("seed list must not be empty")
        for scheme in self.schemes or ():
            if scheme not in SCHEMES:
                raise ConfigError(f"unknown scheme: {scheme!r} "
                                  f"(known: {', '.join(SCHEMES)})")


def parse_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` comments and blanks ignored."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def load_config(file_values: dict[str, str] | None = None,
                overrides: dict[str, str] | None = None) -> dict:
    """Resolve defaults, then a config file, then explicit overrides."""
    raw = dict(DEFAULTS)
    for source in (file_values or {}, overrides or {}):
        for key, value in source.items():
            if key not in _CONFIG_SCHEMA:
                raise ConfigError(f"unknown config key: {key}")
            raw[key] = value
    resolved = {}
    for key, text in raw.items():
        parser, check, expected = _CONFIG_SCHEMA[key]
        try:
            value = parser(text)
        except (ValueError, TypeError):
            raise ConfigError(
                f"{key}={text!r} could not be parsed: expected {expected}")
        if not check(value):
            raise ConfigError(f"{key}={text!r} out of range: expected {expected}")
        resolved[key] = value
    return resolved


def thermal_noise_watts(cfg: dict) -> float:
    dbm = cfg["env.noise_density_dbm_per_hz"] \
        + 10.0 * math.log10(cfg["env.bandwidth_hz"])
    return dbm_to_watts(dbm)


def make_env_config(cfg: dict) -> EnvConfig:
    sizes = SystemSizes(m=cfg["env.m_elements"], n_tx=cfg["env.n_tx"],
                        n_rx=cfg["env.n_rx"], k_users=cfg["env.k_users"],
                        l_eves=cfg["env.l_eves"])
    params = ChannelParams(
        path_loss_exponent=cfg["env.path_loss_exponent"],
        pl0_db=cfg["env.pl0_db"],
        rician_factor=cfg["env.rician_factor"],
        element_spacing=cfg["env.element_spacing"])
    return EnvConfig(
        sizes=sizes,
        hwi=HwiConfig.uniform(cfg["env.kappa"], sizes.k_users,
                              cfg["env.rho_si"]),
        noise=NoiseConfig.from_thermal(thermal_noise_watts(cfg)),
        channel_params=params,
        p_max=cfg["env.p_max"],
        user_powers=(cfg["env.user_power"],) * sizes.k_users,
        phase_noise_per_step=cfg["env.phase_noise_per_step"])


def make_agent_config(cfg: dict) -> AgentConfig:
    return AgentConfig(
        discount=cfg["agent.discount"],
        actor_lr=cfg["agent.actor_lr"],
        critic_lr=cfg["agent.critic_lr"],
        actor_blend=cfg["agent.actor_blend"],
        critic_blend=cfg["agent.critic_blend"],
        batch_size=cfg["agent.batch_size"],
        replay_capacity=cfg["agent.replay_capacity"],
        steps_per_episode=cfg["agent.steps"],
        noise_sigma=cfg["agent.noise_sigma"],
        noise_decay=cfg["agent.noise_decay"],
        noise_floor=cfg["agent.noise_floor"])


def _build_agent(scheme: str, env_config: EnvConfig, agent_config: AgentConfig,
                 rng: np.random.Generator):
    """Agent plus the adapter lifting its action into the env action space."""
    state_dim = env_config.state_dim
    action_dim = env_config.action_dim
    if scheme.startswith("fixed_phase"):
        restricted = 2 * env_config.sizes.n_tx * env_config.sizes.k_users
        agent = DdpgAgent(state_dim, restricted, agent_config, rng)
        return agent, fixed_phase_map(env_config.sizes.m)
    if scheme.startswith("td3"):
        return Td3Agent(state_dim, action_dim, agent_config, rng), None
    if scheme == "random":
        return RandomAgent(state_dim, action_dim, agent_config), None
    return DdpgAgent(state_dim, action_dim, agent_config, rng), None


def _run_point(point: dict) -> dict:
    """Train one (scheme, sweep value, seed) grid point."""
    cfg = point["config"]
    scheme = point["scheme"]
    seed = point["seed"]
    env_rng_seq, init_seq, run_seq, extra_seq = \
        np.random.SeedSequence(seed).spawn(4)

    env_config = make_env_config(cfg)
    if scheme.endswith("_hd"):
        env_config = baseline_hd(env_config)
    agent_config = make_agent_config(cfg)

    env = SecrecyEnv(env_config, np.random.default_rng(env_rng_seq))
    agent, action_map = _build_agent(scheme, env_config, agent_config,
                                     np.random.default_rng(init_seq))

    start_action = None
    if point.get("random_start"):
        extra_rng = np.random.default_rng(extra_seq)
        flat = extra_rng.uniform(-1.0, 1.0, size=env_config.action_dim)
        start_action = decode_action(flat, env_config.p_max, env_config.sizes)

    log = run_episode(agent, env, np.random.default_rng(run_seq),
                      smoothing=cfg["run.smoothing"],
                      channels=point.get("channels"),
                      start_action=start_action,
                      action_map=action_map)
    return {
        "scheme": scheme,
        "seed": seed,
        "sweep_param": point.get("sweep_param"),
        "sweep_value": point.get("sweep_value"),
        "label": point.get("label"),
        "instant": log.instant,
        "average": log.average,
        "best_ssr": log.best_reward,
    }


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _config_comment(spec: ExperimentSpec, cfg: dict) -> str:
    items = " ".join(f"{k}={_fmt(v) if not isinstance(v, tuple) else ','.join(_fmt(i) for i in v)}"
                     for k, v in sorted(cfg.items()))
    seeds = ",".join(str(s) for s in spec.seeds)
    return f"# scenario={spec.scenario} seeds={seeds} {items}"


def _write_reward_csv(path: str, comment: str, results: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(comment + "\n")
        fh.write("seed,step,instant_reward,average_reward\n")
        for res in results:
            seed = res["seed"]
            for step, (inst, avg) in enumerate(zip(res["instant"],
                                                   res["average"])):
                fh.write(f"{seed},{step},{_fmt(float(inst))},"
                         f"{_fmt(float(avg))}\n")


def _write_sweep_csv(path: str, comment: str, results: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(comment + "\n")
        fh.write("seed,sweep_param,sweep_value,scheme,best_ssr\n")
        for res in results:
            fh.write(f"{res['seed']},{res['sweep_param']},"
                     f"{_fmt(res['sweep_value'])},{res['scheme']},"
                     f"{_fmt(float(res['best_ssr']))}\n")


def _apply(cfg: dict, **updates) -> dict:
    out = dict(cfg)
    out.update(updates)
    return out


def _points_for(spec: ExperimentSpec, cfg: dict, schemes):
    """Build the grid of run points for the scenario."""
    scenario = spec.scenario
    points = []
    if scenario in ("convergence",):
        for scheme in schemes:
            for seed in spec.seeds:
                points.append({"scheme": scheme, "seed": seed, "config": cfg,
                               "label": scheme})
    elif scenario == "ssr_vs_pmax":
        for value in cfg["run.pmax_sweep_dbm"]:
            run_cfg = _apply(cfg, **{"env.p_max": dbm_to_watts(value)})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "sweep_param": "p_max_dbm",
                                   "sweep_value": value})
    elif scenario == "ssr_vs_kappa":
        for value in cfg["run.kappa_sweep"]:
            run_cfg = _apply(cfg, **{"env.kappa": value})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg, "sweep_param": "kappa",
                                   "sweep_value": value})
    elif scenario == "ssr_vs_M":
        for value in cfg["run.m_sweep"]:
            run_cfg = _apply(cfg, **{"env.m_elements": value})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "sweep_param": "m_elements",
                                   "sweep_value": value})
    elif scenario == "ssr_vs_alpha":
        for value in cfg["run.alpha_sweep"]:
            run_cfg = _apply(cfg, **{"env.path_loss_exponent": value})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "sweep_param": "path_loss_exponent",
                                   "sweep_value": value})
    elif scenario == "cdf":
        for setting in cfg["run.cdf_settings"]:
            try:
                n_tx, n_rx, m, p_dbm = (float(x) for x in setting.split(":"))
            except ValueError:
                raise ConfigError(f"run.cdf_settings entry {setting!r} is not "
                                  "n_tx:n_rx:m:p_dbm")
            label = f"nt{int(n_tx)}nr{int(n_rx)}m{int(m)}p{int(p_dbm)}"
            run_cfg = _apply(cfg, **{"env.n_tx": int(n_tx),
                                     "env.n_rx": int(n_rx),
                                     "env.m_elements": int(m),
                                     "env.p_max": dbm_to_watts(p_dbm)})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "label": f"{scheme}_{label}"})
    elif scenario == "lr_sweep":
        for value in cfg["run.lr_sweep"]:
            run_cfg = _apply(cfg, **{"agent.critic_lr": value})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "label": f"{scheme}_lr{_fmt(value)}"})
    elif scenario == "gamma_sweep":
        for value in cfg["run.gamma_sweep"]:
            run_cfg = _apply(cfg, **{"agent.discount": value})
            for scheme in schemes:
                for seed in spec.seeds:
                    points.append({"scheme": scheme, "seed": seed,
                                   "config": run_cfg,
                                   "label": f"{scheme}_gamma{_fmt(value)}"})
    elif scenario == "init_robustness":
        env_config = make_env_config(cfg)
        channel_rng = np.random.default_rng(
            np.random.SeedSequence((spec.seeds[0], 0xC0FFEE)))
        geometry = random_geometry(channel_rng, env_config.sizes.k_users,
                                   env_config.sizes.l_eves)
        channels = sample_channel_set(channel_rng, geometry,
                                      env_config.channel_params,
                                      env_config.sizes)
        os.makedirs(spec.outdir, exist_ok=True)
        save_channel_set(os.path.join(spec.outdir, "channels.json"), channels)
        for scheme in schemes:
            for seed in spec.seeds:
                points.append({"scheme": scheme, "seed": seed, "config": cfg,
                               "label": f"{scheme}_init", "channels": channels,
                               "random_start": True})
    else:  # pragma: no cover - guarded by ExperimentSpec validation
        raise ConfigError(f"unknown scenario: {scenario!r}")
    return points


# scenario -> (default schemes, desk-scale overrides)
SCENARIOS = {
    "convergence": (("ddpg_fd",), {}),
    "ssr_vs_pmax": (("ddpg_fd", "fixed_phase_fd"), {"agent.steps": "4000"}),
    "ssr_vs_kappa": (("ddpg_fd", "ddpg_hd"),
                     {"agent.steps": "4000", "env.p_max": "30dBm"}),
    "ssr_vs_M": (("ddpg_fd",), {"agent.steps": "4000", "env.p_max": "10dBm"}),
    "ssr_vs_alpha": (("ddpg_fd",),
                     {"agent.steps": "4000", "env.p_max": "10dBm"}),
    "cdf": (("ddpg_fd",), {"agent.steps": "8000"}),
    "lr_sweep": (("ddpg_fd",), {"agent.steps": "8000"}),
    "gamma_sweep": (("ddpg_fd",), {"agent.steps": "8000"}),
    "init_robustness": (("ddpg_fd",), {"agent.steps": "12000"}),
}

_REWARD_SCENARIOS = ("convergence", "cdf", "lr_sweep", "gamma_sweep",
                     "init_robustness")

_SWEEP_FILES = {
    "ssr_vs_pmax": "sweep_pmax.csv",
    "ssr_vs_kappa": "sweep_kappa.csv",
    "ssr_vs_M": "sweep_m.csv",
    "ssr_vs_alpha": "sweep_alpha.csv",
}


def resolve_spec_config(spec: ExperimentSpec,
                        file_values: dict[str, str] | None = None) -> dict:
    """Defaults, then scenario desk-scale settings, then user overrides."""
    _, scenario_overrides = SCENARIOS[spec.scenario]
    merged = dict(scenario_overrides)
    merged.update(file_values or {})
    merged.update(dict(spec.overrides))
    return load_config(file_values=None, overrides=merged)


def run_scenario(spec: ExperimentSpec,
                 file_values: dict[str, str] | None = None) -> list[str]:
    """Execute the scenario grid and write its CSV files."""
    cfg = resolve_spec_config(spec, file_values)
    schemes = spec.schemes or SCENARIOS[spec.scenario][0]
    points = _points_for(spec, cfg, schemes)

    if spec.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_point, points))
    else:
        results = [_run_point(p) for p in points]

    os.makedirs(spec.outdir, exist_ok=True)
    comment = _config_comment(spec, cfg)
    written = []
    if spec.scenario in _REWARD_SCENARIOS:
        by_label: dict[str, list[dict]] = {}
        for res in results:
            by_label.setdefault(res["label"], []).append(res)
        for label in sorted(by_label):
            group = sorted(by_label[label], key=lambda r: r["seed"])
            path = os.path.join(spec.outdir, f"rewards_{label}.csv")
            _write_reward_csv(path, comment, group)
            written.append(path)
        if spec.scenario == "init_robustness":
            written.append(os.path.join(spec.outdir, "channels.json"))
    else:
        ordered = sorted(results, key=lambda r: (r["sweep_param"],
                                                 r["sweep_value"],
                                                 r["scheme"], r["seed"]))
        path = os.path.join(spec.outdir, _SWEEP_FILES[spec.scenario])
        _write_sweep_csv(path, comment, ordered)
        written.append(path)
    return written


def _read_csv(path: str):
    """Returns (header, rows) skipping leading comment lines."""
    if not os.path.exists(path):
        raise ConfigError(f"no such file: {path}")
    header = None
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ConfigError(f"{path}:{lineno}: malformed row "
                                  f"({len(parts)} fields, expected {len(header)})")
            rows.append((lineno, parts))
    if header is None:
        raise ConfigError(f"{path}: empty CSV")
    return header, rows


def moving_average(values: np.ndarray, window: int) -> np.ndarray:
    """Trailing mean over ``window`` samples; starts at index window-1."""
    kernel = np.full(window, 1.0 / window)
    return np.convolve(values, kernel, mode="valid")


def convergence_step(instant: np.ndarray, window: int = 500,
                     fraction: float = 0.95) -> int:
    """First step whose trailing moving average reaches the given
    fraction of the final moving average."""
    if instant.size < window:
        return instant.size - 1
    ma = moving_average(instant, window)
    target = fraction * ma[-1]
    hits = np.nonzero(ma >= target)[0]
    first = int(hits[0]) if hits.size else ma.size - 1
    return first + window - 1


def _float_field(path, lineno, name, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"{path}:{lineno}: malformed {name}: {text!r}")


def summarize(paths: list[str], out_path: str) -> str:
    """Aggregate reward/sweep CSVs into one summary CSV."""
    lines = ["source,kind,sweep_param,sweep_value,scheme,seed,n_seeds,"
             "mean_best_ssr,std_best_ssr,min_best_ssr,max_best_ssr,"
             "final_average,best_instant,convergence_step"]
    for path in paths:
        header, rows = _read_csv(path)
        name = os.path.basename(path)
        if header == ["seed", "step", "instant_reward", "average_reward"]:
            by_seed: dict[str, list] = {}
            for lineno, parts in rows:
                by_seed.setdefault(parts[0], []).append(
                    (int(parts[1]),
                     _float_field(path, lineno, "instant_reward", parts[2]),
                     _float_field(path, lineno, "average_reward", parts[3])))
            for seed in sorted(by_seed, key=int):
                entries = sorted(by_seed[seed])
                instant = np.array([e[1] for e in entries])
                final_avg = entries[-1][2]
                step = convergence_step(instant)
                lines.append(f"{name},reward,,,,{seed},,,,,,"
                             f"{_fmt(final_avg)},{_fmt(float(instant.max()))},"
                             f"{step}")
        elif header == ["seed", "sweep_param", "sweep_value", "scheme",
                        "best_ssr"]:
            groups: dict[tuple, list[float]] = {}
            for lineno, parts in rows:
                key = (parts[1], parts[2], parts[3])
                groups.setdefault(key, []).append(
                    _float_field(path, lineno, "best_ssr", parts[4]))
            for key in sorted(groups):
                vals = np.array(groups[key])
                lines.append(
                    f"{name},sweep,{key[0]},{key[1]},{key[2]},,{vals.size},"
                    f"{_fmt(float(vals.mean()))},{_fmt(float(vals.std()))},"
                    f"{_fmt(float(vals.min()))},{_fmt(float(vals.max()))},,,")
        else:
            raise ConfigError(f"{path}: unrecognized CSV schema: {header}")
    with open(out_path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return out_path
