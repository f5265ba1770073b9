"""
Posterior sampling for reinforcement learning (PSRL) on average-reward MDPs.

The transition posterior of every (state, action) pair is a Dirichlet over
the successors the environment structure permits; rewards use empirical
means with an optimistic default for unseen transitions.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..constants import DIRICHLET_PRIOR, PSRL_EPISODE_FACTOR, PSRL_PLANNING_TOLERANCE
from ..core.mdp import DeterministicPolicy, TabularMDP
from ..core.planning import average_reward_optimal, average_reward_policy_iteration
from ..errors import ContractViolation
from ..simulator import EpisodeScheme, RandomSource
from .base import Agent
from .empirical import EmpiricalModel, extended_observe

logger = logging.getLogger(__name__)

PLANNERS = ("rvi", "policy_iteration")


def full_support(actions: Sequence[Sequence[int]], num_actions: int) -> np.ndarray:
    num_states = len(actions)
    support = np.zeros((num_states, num_actions, num_states), dtype=bool)
    for s, acts in enumerate(actions):
        support[s, list(acts), :] = True
    return support


@dataclass
class PsrlState:
    """Dirichlet posterior (prior + exact transition counts) and planning state."""

    actions: Tuple[Tuple[int, ...], ...]
    prior: np.ndarray  # (N, A, N), positive exactly on the permitted successors
    model: EmpiricalModel
    episode_length: int
    planner: str = "rvi"
    tolerance: float = PSRL_PLANNING_TOLERANCE
    current_policy: Optional[DeterministicPolicy] = None
    bias: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def initial(
        cls,
        actions: Sequence[Sequence[int]],
        support: Optional[np.ndarray] = None,
        episode_length: Optional[int] = None,
        model: Optional[EmpiricalModel] = None,
        planner: str = "rvi",
        prior_weight: float = DIRICHLET_PRIOR,
    ) -> "PsrlState":
        actions = tuple(tuple(acts) for acts in actions)
        num_states = len(actions)
        num_actions = 1 + max(max(acts) for acts in actions)
        if support is None:
            support = full_support(actions, num_actions)
        if support.shape != (num_states, num_actions, num_states):
            raise ContractViolation(f"support shape {support.shape} does not match the MDP")
        for s, acts in enumerate(actions):
            for a in acts:
                if not support[s, a].any():
                    raise ContractViolation(f"pair ({s}, {a}) has no permitted successor")
        if planner not in PLANNERS:
            raise ContractViolation(f"unknown planner {planner!r}")
        if model is None:
            model = EmpiricalModel.empty(num_states, num_actions)
        return cls(
            actions=actions,
            prior=np.where(support, prior_weight, 0.0),
            model=model,
            episode_length=episode_length or PSRL_EPISODE_FACTOR * num_states,
            planner=planner,
        )

    @property
    def num_states(self) -> int:
        return len(self.actions)

    def concentrations(self) -> np.ndarray:
        return self.prior + self.model.transition_counts


def sample_transitions(psrl: PsrlState, rng: RandomSource) -> np.ndarray:
    """One Dirichlet row per (state, action), via normalized Gamma variates."""
    gammas = rng.standard_gamma(psrl.concentrations())
    totals = gammas.sum(axis=2, keepdims=True)
    return np.divide(gammas, totals, out=np.zeros_like(gammas), where=totals > 0)


def psrl_episode(psrl: PsrlState, rng: RandomSource) -> DeterministicPolicy:
    """Sample an MDP from the posterior and return its gain-optimal policy."""
    sampled = TabularMDP.from_arrays(sample_transitions(psrl, rng), psrl.model.reward_estimate(), psrl.actions)
    if psrl.planner == "rvi":
        result = average_reward_optimal(sampled, tolerance=psrl.tolerance, initial_bias=psrl.bias, verify=False)
    else:
        result = average_reward_policy_iteration(sampled, initial_policy=psrl.current_policy)
    psrl.bias = result.bias
    psrl.current_policy = result.policy
    logger.debug(f"PSRL sampled MDP solved in {result.iterations} iterations, gain {result.gain:.6f}")
    return result.policy


class PsrlAgent(Agent):
    """Fixed-length episodes of L rounds, each starting from ``s_start``.

    The reset to ``s_start`` at every episode start is a capability granted
    by the simulator; runs report it through ``RunTrace.teleports``.
    """

    name = "psrl"
    records_transitions = True

    def __init__(self, state: PsrlState):
        self.state = state

    @property
    def num_arms(self) -> int:
        return 1

    def episode_scheme(self, s_start: int, tau: float) -> EpisodeScheme:
        return EpisodeScheme(
            s_start=s_start,
            tau=min(self.state.episode_length, tau),
            renewal=False,
            reset_to_start=True,
        )

    def select_arm(self, t: int, rng: RandomSource) -> int:
        psrl_episode(self.state, rng)
        return 0

    def policy_for(self, arm: int) -> DeterministicPolicy:
        return self.state.current_policy

    def observe(self, state: int, action: int, next_state: int, reward: float) -> None:
        extended_observe(self.state.model, state, action, next_state, reward)
