"""RIS-aided multiuser full-duplex secrecy simulator and DDPG trainer."""

from .channels import (ChannelParams, ChannelSet, Geometry, SystemSizes,
                       load_channel_set, path_loss_linear, random_geometry,
                       sample_channel_set, sample_phase_noise,
                       save_channel_set, steering)
from .linkbudget import (Action, CascadedChannels, HwiConfig, LinkBudget,
                         NoiseConfig, build_theta, cascaded_channels,
                         combiner, evaluate_links, project_precoder,
                         secrecy_rate, ssr)
from .oracle import OracleEstimate, mc_oracle
from .env import EnvConfig, RunningStats, SecrecyEnv, StepResult, \
    decode_action, whiten
from .agents import (AgentConfig, DdpgAgent, EpisodeLog, RandomAgent,
                     ReplayBuffer, Td3Agent, average_reward, baseline_hd,
                     baseline_fixed_phase, run_episode)
from .experiments import ExperimentSpec, load_config, run_scenario, summarize

__version__ = "0.1.0"

__all__ = [
    "Action", "AgentConfig", "CascadedChannels", "ChannelParams",
    "ChannelSet", "DdpgAgent", "EnvConfig", "EpisodeLog", "ExperimentSpec",
    "Geometry", "HwiConfig", "LinkBudget", "NoiseConfig", "OracleEstimate",
    "RandomAgent", "ReplayBuffer", "RunningStats", "SecrecyEnv", "StepResult",
    "SystemSizes", "Td3Agent", "average_reward", "baseline_fixed_phase",
    "baseline_hd", "build_theta", "cascaded_channels", "combiner",
    "decode_action", "evaluate_links", "load_channel_set", "load_config",
    "mc_oracle", "path_loss_linear", "project_precoder", "random_geometry",
    "run_episode", "run_scenario", "sample_channel_set", "sample_phase_noise",
    "save_channel_set", "secrecy_rate", "ssr", "steering", "summarize",
    "whiten",
]
