"""
Empirical transition and reward bookkeeping for the "-Extended" agents and PSRL.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..constants import OPTIMISTIC_REWARD


@dataclass
class EmpiricalModel:
    transition_counts: np.ndarray  # (N, A, N) int64
    reward_sums: np.ndarray  # (N, A, N) float

    @classmethod
    def empty(cls, num_states: int, num_actions: int) -> "EmpiricalModel":
        shape = (num_states, num_actions, num_states)
        return cls(np.zeros(shape, dtype=np.int64), np.zeros(shape))

    @property
    def reward_counts(self) -> np.ndarray:
        # every observed transition carries exactly one reward sample
        return self.transition_counts

    def visits(self) -> np.ndarray:
        return self.transition_counts.sum(axis=2)

    def reward_estimate(self, default: float = OPTIMISTIC_REWARD) -> np.ndarray:
        counts = self.transition_counts
        means = np.divide(self.reward_sums, counts, out=np.zeros_like(self.reward_sums), where=counts > 0)
        return np.where(counts > 0, means, default)

    def estimates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Point estimates (P_hat, R_hat); rows of unvisited pairs are NaN."""
        visits = self.visits()[..., None]
        p_hat = np.divide(
            self.transition_counts,
            visits,
            out=np.full(self.transition_counts.shape, np.nan),
            where=visits > 0,
        )
        return p_hat, self.reward_estimate()


def extended_observe(model: EmpiricalModel, state: int, action: int, next_state: int, reward: float) -> EmpiricalModel:
    """Record one transition sample in place and return the model."""
    model.transition_counts[state, action, next_state] += 1
    model.reward_sums[state, action, next_state] += reward
    return model
