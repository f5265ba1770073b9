"""
Turn an agent config block into a running agent on an environment instance.
"""
import logging
from typing import Optional, Sequence

from ..config import AgentBlock, BetaBlock, tau_value
from ..core.planning import best_structured_policy
from ..environments.base import EnvironmentInstance
from ..errors import ConfigError
from ..simulator import RandomSource, RunTrace, run_agent
from .bandits import BetaSchedule, ConstantBeta, FixedPolicyAgent, InverseLogBeta, PThompsonAgent, PUCBAgent, RandomAgent
from .base import Agent
from .psrl import PsrlAgent, PsrlState
from .warm_psrl import warm_psrl

logger = logging.getLogger(__name__)


def beta_schedule(block: BetaBlock) -> BetaSchedule:
    if block.kind == "inverse_log":
        return InverseLogBeta(block.value)
    return ConstantBeta(block.value)


def build_agent(block: AgentBlock, env: EnvironmentInstance) -> Agent:
    """Construct a single-phase agent; warm_psrl is a two-phase run, see ``execute_agent_block``."""
    algorithm = block.algorithm
    if algorithm == "pucb":
        return PUCBAgent(env.family, beta=beta_schedule(block.beta))
    if algorithm == "pthompson":
        return PThompsonAgent(env.family)
    if algorithm == "random":
        return RandomAgent(env.family)
    if algorithm == "fixed":
        arm = block.arm
        if arm is None:
            arm, gain = best_structured_policy(env.mdp, env.family)
            logger.info(f"Fixed agent plays the best structured policy {arm} (gain {gain:.6f})")
        elif arm >= len(env.family):
            raise ConfigError(f"fixed arm {arm} outside the family of {len(env.family)} policies")
        return FixedPolicyAgent(env.family, arm)
    if algorithm == "psrl":
        state = PsrlState.initial(
            env.mdp.actions,
            support=env.support,
            episode_length=block.psrl_episode_len,
            planner=block.planner,
        )
        return PsrlAgent(state)
    raise ConfigError(f"algorithm {algorithm!r} cannot be built as a single agent")


def execute_agent_block(
    block: AgentBlock,
    env: EnvironmentInstance,
    horizon: int,
    tau: float,
    rng: RandomSource,
    checkpoints: Sequence[int] = (),
    s_start: Optional[int] = None,
) -> RunTrace:
    """Run one agent block for ``horizon`` rounds; a block-level tau overrides the experiment's."""
    if block.tau is not None:
        tau = tau_value(block.tau)
    s_start = env.s_start if s_start is None else s_start
    if block.algorithm == "warm_psrl":
        return warm_psrl(
            env.mdp,
            env.family,
            horizon,
            s_start,
            tau,
            block.t_switch,
            rng,
            inner=block.inner,
            beta=beta_schedule(block.beta),
            support=env.support,
            episode_length=block.psrl_episode_len,
            planner=block.planner,
            checkpoints=checkpoints,
        )
    return run_agent(env.mdp, build_agent(block, env), horizon, s_start, tau, rng, checkpoints=checkpoints)
