"""
Learning agents: policies-as-arms bandits, PSRL and warm-started PSRL.
"""
from .base import Agent, PolicyArmsAgent
from .empirical import EmpiricalModel, extended_observe
from .bandits import (
    ArmStats,
    BetaBelief,
    ConstantBeta,
    FixedPolicyAgent,
    InverseLogBeta,
    PThompsonAgent,
    PUCBAgent,
    RandomAgent,
    pthompson_select,
    pthompson_update,
    pucb_select,
    pucb_update,
    random_baseline,
)
from .psrl import PsrlAgent, PsrlState, psrl_episode, sample_transitions
from .warm_psrl import warm_psrl
from .registry import beta_schedule, build_agent, execute_agent_block

__all__ = [
    "Agent",
    "ArmStats",
    "BetaBelief",
    "ConstantBeta",
    "EmpiricalModel",
    "FixedPolicyAgent",
    "InverseLogBeta",
    "PThompsonAgent",
    "PUCBAgent",
    "PolicyArmsAgent",
    "PsrlAgent",
    "PsrlState",
    "RandomAgent",
    "beta_schedule",
    "build_agent",
    "execute_agent_block",
    "extended_observe",
    "psrl_episode",
    "pthompson_select",
    "pthompson_update",
    "pucb_select",
    "pucb_update",
    "random_baseline",
    "sample_transitions",
    "warm_psrl",
]
