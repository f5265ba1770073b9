"""
Machine replacement: a machine deteriorates through states 0 (new) .. n-1
(worst). Each round the operator either continues (C), paying the operating
cost g(i), or maintains (PM), paying R + g(0) and resetting the machine to 0.

Costs are turned into rewards in [0, 1] by ``reward = 1 - cost / C_max``.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import (
    MACHINE_REPLACEMENT_C_MAX,
    MACHINE_REPLACEMENT_C_MIN,
    MACHINE_REPLACEMENT_ENV_SEED,
    MACHINE_REPLACEMENT_G_MAX,
    MACHINE_REPLACEMENT_GAMMA,
    MACHINE_REPLACEMENT_REPAIR_COST,
    ROW_SUM_TOLERANCE,
)
from ..core.mdp import DeterministicPolicy, TabularMDP
from ..errors import ConstructionError
from .base import EnvironmentInstance, ThresholdPolicyFamily

logger = logging.getLogger(__name__)

CONTINUE, MAINTAIN = 0, 1


def cost_vector_generator(n: int, g_max: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` sorted uniform draws in [0, g_max]: a nondecreasing operating-cost vector."""
    if g_max <= 0:
        raise ConstructionError(f"g_max must be positive, got {g_max}")
    return np.sort(rng.uniform(0.0, g_max, size=n))


@dataclass(frozen=True)
class MachineReplacementConfig:
    n: int
    repair_cost: float = MACHINE_REPLACEMENT_REPAIR_COST
    gamma: float = MACHINE_REPLACEMENT_GAMMA
    c_min: float = MACHINE_REPLACEMENT_C_MIN
    c_max: float = MACHINE_REPLACEMENT_C_MAX
    g_max: float = MACHINE_REPLACEMENT_G_MAX
    env_seed: int = MACHINE_REPLACEMENT_ENV_SEED
    costs: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if self.n < 2:
            raise ConstructionError(f"machine replacement needs n >= 2 states, got {self.n}")
        if self.repair_cost <= 0:
            raise ConstructionError(f"repair cost must be positive, got {self.repair_cost}")
        if self.gamma <= 0:
            raise ConstructionError(f"deterioration ratio gamma must be positive, got {self.gamma}")
        if not 0 < self.c_min < self.c_max <= 1:
            raise ConstructionError(f"need 0 < c_min < c_max <= 1, got c_min={self.c_min}, c_max={self.c_max}")
        if self.costs is not None:
            costs = tuple(float(c) for c in self.costs)
            if len(costs) != self.n:
                raise ConstructionError(f"expected {self.n} operating costs, got {len(costs)}")
            if min(costs) < 0:
                raise ConstructionError("operating costs must be non-negative")
            if any(a > b for a, b in zip(costs, costs[1:])):
                raise ConstructionError("operating costs must be nondecreasing in the machine state")
            object.__setattr__(self, "costs", costs)

    def operating_costs(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        if self.costs is not None:
            return np.array(self.costs)
        rng = rng if rng is not None else np.random.default_rng(self.env_seed)
        return cost_vector_generator(self.n, self.g_max, rng)


def deterioration_weights(n: int, gamma: float) -> np.ndarray:
    """b_d over jump sizes d = 1..n-1, geometric with ratio gamma, summing to one; b_0 = 0."""
    weights = np.zeros(n)
    weights[1:] = gamma ** np.arange(n - 1)
    weights[1:] /= weights[1:].sum()
    return weights


def deterioration_rates(n: int, c_min: float, c_max: float) -> np.ndarray:
    return c_min + (c_max - c_min) * np.arange(n) / (n - 1)


def build_machine_replacement(config: MachineReplacementConfig, rng: Optional[np.random.Generator] = None) -> TabularMDP:
    """Separable deterioration p_ij(C) = c_i * b_(j-i) for j > i; maintenance jumps to state 0.

    Weights are indexed by the size of the jump, so a worn machine keeps
    deteriorating at the rate c_i instead of freezing in place.
    """
    n = config.n
    g = config.operating_costs(rng)
    b = deterioration_weights(n, config.gamma)
    c = deterioration_rates(n, config.c_min, config.c_max)

    transition = np.zeros((n, 2, n))
    for i in range(n):
        transition[i, CONTINUE, i + 1:] = c[i] * b[1:n - i]
        transition[i, CONTINUE, i] = 1.0 - transition[i, CONTINUE, i + 1:].sum()
        transition[i, MAINTAIN, 0] = 1.0

    maintenance_cost = config.repair_cost + g[0]
    c_scale = max(g[-1], maintenance_cost)
    reward = np.zeros((n, 2, n))
    reward[:, CONTINUE, :] = (1.0 - g / c_scale)[:, None]
    reward[:, MAINTAIN, :] = 1.0 - maintenance_cost / c_scale

    mdp = TabularMDP.from_arrays(transition, reward, [(CONTINUE, MAINTAIN)] * n)
    verify_machine_replacement(mdp)
    logger.info(
        f"Built machine replacement MDP: n={n}, R={config.repair_cost}, gamma={config.gamma}, "
        f"c in [{config.c_min}, {config.c_max}], C_max={c_scale:.4f}"
    )
    return mdp


def verify_machine_replacement(mdp: TabularMDP, tolerance: float = ROW_SUM_TOLERANCE) -> None:
    """Assert maintenance resets, continuation never improves the machine and worse
    machines deteriorate at least as fast, including the diagonal entry of the next row."""
    p_c = mdp.transition[:, CONTINUE, :]
    p_pm = mdp.transition[:, MAINTAIN, :]
    n = mdp.num_states
    failures: List[str] = []
    if not np.allclose(p_pm[:, 0], 1.0, atol=tolerance):
        failures.append("(a) maintenance must reach state 0 with probability 1")
    if np.any(np.abs(p_pm[:, 1:]) > tolerance):
        failures.append("(b) maintenance must not reach any state other than 0")
    if np.any(np.abs(np.tril(p_c, k=-1)) > tolerance):
        failures.append("(c) continuing must never move to a better state")
    for i in range(n - 1):
        if np.any(p_c[i, i + 1:] > p_c[i + 1, i + 1:] + tolerance):
            j = i + 1 + int(np.argmax(p_c[i, i + 1:] - p_c[i + 1, i + 1:]))
            failures.append(
                f"(d) p[{i},{j}](C)={p_c[i, j]:.6g} exceeds p[{i + 1},{j}](C)={p_c[i + 1, j]:.6g}"
            )
            break
    if failures:
        raise ConstructionError("Machine replacement constraints violated: " + "; ".join(failures))


def machine_replacement_policies(n: int) -> ThresholdPolicyFamily:
    """Arm k maintains iff the machine state is at least k; arm 0 always maintains."""
    if n < 2:
        raise ConstructionError(f"machine replacement needs n >= 2 states, got {n}")
    thresholds = tuple(range(n))
    policies = tuple(
        DeterministicPolicy.of(MAINTAIN if state >= k else CONTINUE for state in range(n)) for k in thresholds
    )
    return ThresholdPolicyFamily(thresholds, policies)


def is_threshold_policy(policy: DeterministicPolicy) -> bool:
    """True iff the policy switches from continue to maintain at most once along the state order."""
    actions = policy.actions
    return all(a <= b for a, b in zip(actions, actions[1:]))


def machine_replacement_support(n: int) -> np.ndarray:
    support = np.zeros((n, 2, n), dtype=bool)
    support[:, CONTINUE, :] = np.triu(np.ones((n, n), dtype=bool))
    support[:, MAINTAIN, 0] = True
    return support


def machine_replacement_instance(
    config: MachineReplacementConfig, rng: Optional[np.random.Generator] = None
) -> EnvironmentInstance:
    mdp = build_machine_replacement(config, rng)
    family = machine_replacement_policies(config.n)
    for k, policy in zip(family.thresholds, family.policies):
        if not is_threshold_policy(policy):
            raise ConstructionError(f"policy {k} is not a threshold policy")
    return EnvironmentInstance(
        name="machine_replacement",
        mdp=mdp,
        family=family,
        s_start=0,
        support=machine_replacement_support(config.n),
    )
