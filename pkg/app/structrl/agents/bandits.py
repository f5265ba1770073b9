"""
Policies-as-arms bandit agents: pUCB, pThompson, a uniform random baseline
and a fixed-arm oracle.

Each arm is a deterministic policy; one pull is one renewal episode and
the arm's payoff estimate is the ratio of total reward to total rounds.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ..core.mdp import DeterministicPolicy
from ..errors import ContractViolation
from ..simulator import EpisodeRecord, RandomSource
from .base import PolicyArmsAgent
from .empirical import EmpiricalModel

BetaSchedule = Callable[[int], float]


@dataclass(frozen=True)
class ConstantBeta:
    value: float = 1.0

    def __call__(self, t: int) -> float:
        return self.value


@dataclass(frozen=True)
class InverseLogBeta:
    """beta(t) = scale / max(1, ln t): exploration decays with time."""

    scale: float = 1.0

    def __call__(self, t: int) -> float:
        return self.scale / max(1.0, math.log(t))


@dataclass(frozen=True)
class ArmStats:
    rho_hat: float = 1.0  # optimistic until the arm has been played
    pulls: int = 0
    reward_total: float = 0.0
    rounds_total: int = 0


@dataclass(frozen=True)
class BetaBelief:
    successes: float = 0.0
    failures: float = 0.0

    @property
    def mean(self) -> float:
        total = self.successes + self.failures
        return self.successes / total if total > 0 else 0.5


def _check_episode(episode: EpisodeRecord) -> None:
    if episode.reward_sum > episode.duration or episode.reward_sum < 0:
        raise ContractViolation(
            f"episode reward {episode.reward_sum} outside [0, {episode.duration}]; rewards must lie in [0, 1]"
        )


def pucb_update(stats: ArmStats, episode: EpisodeRecord) -> ArmStats:
    """Ratio of sums, not mean of ratios: the renewal-reward estimator."""
    _check_episode(episode)
    reward_total = stats.reward_total + episode.reward_sum
    rounds_total = stats.rounds_total + episode.duration
    return ArmStats(
        rho_hat=reward_total / rounds_total,
        pulls=stats.pulls + 1,
        reward_total=reward_total,
        rounds_total=rounds_total,
    )


def pucb_bonus(pulls: np.ndarray, t: float, beta_t: float) -> np.ndarray:
    """beta_t * sqrt(2 ln t / n(j)); +inf for arms never played."""
    if t < 1:
        raise ContractViolation(f"round index must be >= 1, got {t}")
    pulls = np.asarray(pulls, dtype=float)
    played = pulls > 0
    bonus = np.full(len(pulls), np.inf)
    bonus[played] = beta_t * np.sqrt(2.0 * math.log(t) / pulls[played])
    return bonus


def pucb_index(rho_hat: np.ndarray, pulls: np.ndarray, t: int, beta_t: float) -> int:
    """argmax_j rho_hat(j) + bonus(j); np.argmax keeps the lowest index on ties."""
    return int(np.argmax(rho_hat + pucb_bonus(pulls, t, beta_t)))


def pucb_select(stats: Sequence[ArmStats], t: int, beta_t: float) -> int:
    rho_hat = np.array([s.rho_hat for s in stats])
    pulls = np.array([s.pulls for s in stats], dtype=float)
    return pucb_index(rho_hat, pulls, t, beta_t)


def pthompson_update(belief: BetaBelief, episode: EpisodeRecord) -> BetaBelief:
    _check_episode(episode)
    return BetaBelief(
        successes=belief.successes + episode.reward_sum,
        failures=belief.failures + (episode.duration - episode.reward_sum),
    )


def thompson_index(successes: np.ndarray, failures: np.ndarray, rng: RandomSource) -> int:
    """Draw theta(k) ~ Beta(S(k) + 1, F(k) + 1) for every arm and return the argmax."""
    theta = rng.beta(successes + 1.0, failures + 1.0)
    return int(np.argmax(theta))


def pthompson_select(beliefs: Sequence[BetaBelief], rng: RandomSource) -> int:
    successes = np.array([b.successes for b in beliefs])
    failures = np.array([b.failures for b in beliefs])
    return thompson_index(successes, failures, rng)


def random_baseline(num_arms: int, rng: RandomSource) -> int:
    return rng.integers(num_arms)


class PUCBAgent(PolicyArmsAgent):
    name = "pucb"

    def __init__(
        self,
        family: Sequence[DeterministicPolicy],
        beta: BetaSchedule = ConstantBeta(1.0),
        model: Optional[EmpiricalModel] = None,
    ):
        super().__init__(family, model=model)
        self.beta = beta
        self.stats = [ArmStats() for _ in self.family]
        self._rho_hat = np.ones(self.num_arms)
        self._pulls = np.zeros(self.num_arms)

    def select_arm(self, t: int, rng: RandomSource) -> int:
        return pucb_index(self._rho_hat, self._pulls, t, self.beta(t))

    def end_episode(self, episode: EpisodeRecord) -> None:
        k = episode.policy_index
        self.stats[k] = updated = pucb_update(self.stats[k], episode)
        self._rho_hat[k] = updated.rho_hat
        self._pulls[k] = updated.pulls


class PThompsonAgent(PolicyArmsAgent):
    name = "pthompson"

    def __init__(self, family: Sequence[DeterministicPolicy], model: Optional[EmpiricalModel] = None):
        super().__init__(family, model=model)
        self.beliefs = [BetaBelief() for _ in self.family]
        self._successes = np.zeros(self.num_arms)
        self._failures = np.zeros(self.num_arms)

    def select_arm(self, t: int, rng: RandomSource) -> int:
        return thompson_index(self._successes, self._failures, rng)

    def end_episode(self, episode: EpisodeRecord) -> None:
        k = episode.policy_index
        self.beliefs[k] = updated = pthompson_update(self.beliefs[k], episode)
        self._successes[k] = updated.successes
        self._failures[k] = updated.failures


class RandomAgent(PolicyArmsAgent):
    name = "random"

    def select_arm(self, t: int, rng: RandomSource) -> int:
        return random_baseline(self.num_arms, rng)


class FixedPolicyAgent(PolicyArmsAgent):
    name = "fixed"

    def __init__(self, family: Sequence[DeterministicPolicy], arm: int):
        super().__init__(family)
        if not 0 <= arm < self.num_arms:
            raise ContractViolation(f"arm {arm} outside [0, {self.num_arms})")
        self.arm = arm

    def select_arm(self, t: int, rng: RandomSource) -> int:
        return self.arm
