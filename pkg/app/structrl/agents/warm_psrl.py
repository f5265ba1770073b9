"""
Warm-started PSRL: a policies-as-arms bandit explores for ``t_switch`` rounds
while recording transitions, then PSRL continues from the recorded counts.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from ..core.mdp import DeterministicPolicy, TabularMDP
from ..errors import ContractViolation
from ..simulator import RandomSource, RunTrace, run_agent
from .bandits import BetaSchedule, ConstantBeta, PThompsonAgent, PUCBAgent
from .empirical import EmpiricalModel
from .psrl import PsrlAgent, PsrlState

logger = logging.getLogger(__name__)

INNER_ALGORITHMS = ("pucb", "pthompson")


def _concatenate(first: RunTrace, second: RunTrace, offset: int) -> RunTrace:
    return RunTrace(
        episodes=first.episodes + second.episodes,
        total_steps=first.total_steps + second.total_steps,
        cumulative_reward=first.cumulative_reward + second.cumulative_reward,
        checkpoints=first.checkpoints + tuple(c + offset for c in second.checkpoints),
        checkpoint_rewards=first.checkpoint_rewards
        + [first.cumulative_reward + cr for cr in second.checkpoint_rewards],
        partial_steps=first.partial_steps + second.partial_steps,
        partial_reward=first.partial_reward + second.partial_reward,
        step_log=first.step_log + [(t + offset, *rest) for t, *rest in second.step_log],
        rng_draws=first.rng_draws + second.rng_draws,
        teleports=second.teleports,
    )


def warm_psrl(
    mdp: TabularMDP,
    family: Sequence[DeterministicPolicy],
    horizon: int,
    s_start: int,
    tau: float,
    t_switch: int,
    rng: RandomSource,
    inner: str = "pthompson",
    beta: BetaSchedule = ConstantBeta(1.0),
    support: Optional[np.ndarray] = None,
    episode_length: Optional[int] = None,
    planner: str = "rvi",
    checkpoints: Sequence[int] = (),
) -> RunTrace:
    """Run the inner "-Extended" bandit for ``t_switch`` rounds, then PSRL for the rest.

    PSRL's Dirichlet concentrations start at prior + phase-one counts and its
    reward estimates at the phase-one empirical means.
    """
    if not 0 < t_switch < horizon:
        raise ContractViolation(f"t_switch must lie in (0, {horizon}), got {t_switch}")
    if inner not in INNER_ALGORITHMS:
        raise ContractViolation(f"inner algorithm must be one of {INNER_ALGORITHMS}, got {inner!r}")

    model = EmpiricalModel.empty(mdp.num_states, mdp.num_actions)
    if inner == "pucb":
        explorer = PUCBAgent(family, beta=beta, model=model)
    else:
        explorer = PThompsonAgent(family, model=model)
    first = run_agent(
        mdp, explorer, t_switch, s_start, tau, rng,
        checkpoints=[c for c in checkpoints if c <= t_switch],
    )
    logger.info(
        f"warmPSRL switching to PSRL after {t_switch} rounds "
        f"({len(first.episodes)} {inner} episodes, CR={first.cumulative_reward:.3f})"
    )

    state = PsrlState.initial(
        mdp.actions, support=support, episode_length=episode_length, model=model, planner=planner
    )
    second = run_agent(
        mdp, PsrlAgent(state), horizon - t_switch, s_start, tau, rng,
        checkpoints=[c - t_switch for c in checkpoints if c > t_switch],
    )
    return _concatenate(first, second, t_switch)
