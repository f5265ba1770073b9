"""
Episode-callback interface shared by every learning agent.
"""
from abc import ABC, abstractmethod
from typing import Optional, Sequence

from ..core.mdp import DeterministicPolicy
from ..errors import ContractViolation
from ..simulator import EpisodeRecord, EpisodeScheme, RandomSource
from .empirical import EmpiricalModel, extended_observe


class Agent(ABC):
    """An agent picks an arm at every episode boundary and learns from finished episodes."""

    name = "agent"
    records_transitions = False

    @property
    @abstractmethod
    def num_arms(self) -> int:
        ...

    def episode_scheme(self, s_start: int, tau: float) -> EpisodeScheme:
        return EpisodeScheme(s_start=s_start, tau=tau)

    @abstractmethod
    def select_arm(self, t: int, rng: RandomSource) -> int:
        """Arm for the episode that starts at round ``t``."""

    def end_episode(self, episode: EpisodeRecord) -> None:
        """Called with every completed episode, never with the horizon-truncated one."""

    @abstractmethod
    def policy_for(self, arm: int) -> DeterministicPolicy:
        ...

    def observe(self, state: int, action: int, next_state: int, reward: float) -> None:
        """Per-step hook, only called when ``records_transitions`` is set."""


class PolicyArmsAgent(Agent):
    """Base for agents whose arms are the policies of a fixed family.

    Given an empirical ``model`` the agent also records every transition it
    sees: the "-Extended" variants used by warm-started PSRL.
    """

    def __init__(self, family: Sequence[DeterministicPolicy], model: Optional[EmpiricalModel] = None):
        if not family:
            raise ContractViolation("policy family is empty")
        self.family = tuple(family)
        self.model = model
        self.records_transitions = model is not None

    @property
    def num_arms(self) -> int:
        return len(self.family)

    def policy_for(self, arm: int) -> DeterministicPolicy:
        return self.family[arm]

    def observe(self, state: int, action: int, next_state: int, reward: float) -> None:
        extended_observe(self.model, state, action, next_state, reward)
