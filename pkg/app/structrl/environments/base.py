"""
Shared environment types: structured policy families and built instances.
"""
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from ..core.mdp import DeterministicPolicy, TabularMDP


@dataclass(frozen=True)
class ThresholdPolicyFamily:
    """Policies indexed by an ordered threshold; arm k plays ``policies[k]``."""

    thresholds: Tuple[int, ...]
    policies: Tuple[DeterministicPolicy, ...]

    def __len__(self) -> int:
        return len(self.policies)

    def __getitem__(self, index: int) -> DeterministicPolicy:
        return self.policies[index]

    def __iter__(self) -> Iterator[DeterministicPolicy]:
        return iter(self.policies)


@dataclass(frozen=True, eq=False)
class EnvironmentInstance:
    """A benchmark MDP with its policy family, anchor state and permitted successors."""

    name: str
    mdp: TabularMDP
    family: ThresholdPolicyFamily
    s_start: int
    support: np.ndarray  # (N, A, N) successors PSRL's posterior may put mass on
