"""
Average-reward planning: relative value iteration, policy iteration and
search over an explicit structured policy family.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from ..constants import (
    APERIODICITY,
    PLANNING_MAX_ITERS,
    PLANNING_TOLERANCE,
    REFERENCE_STATE,
)
from ..errors import ContractViolation, ConvergenceError, MultichainError
from .analysis import evaluate_policy, recurrent_classes
from .mdp import DeterministicPolicy, TabularMDP, induced_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PlanningResult:
    policy: DeterministicPolicy
    gain: float
    bias: np.ndarray
    iterations: int


def _greedy(q: np.ndarray) -> DeterministicPolicy:
    # np.argmax returns the first maximum: lowest action id wins ties
    return DeterministicPolicy.of(np.argmax(q, axis=1))


def average_reward_optimal(
    mdp: TabularMDP,
    tolerance: float = PLANNING_TOLERANCE,
    max_iters: int = PLANNING_MAX_ITERS,
    initial_bias: Optional[np.ndarray] = None,
    verify: bool = True,
    aperiodicity: float = APERIODICITY,
) -> PlanningResult:
    """Gain-optimal deterministic policy by relative value iteration.

    Iterates on the chain P' = a*P + (1-a)*I, which has the same stationary
    distributions and therefore the same gains as P, and stops when the span
    of successive differences drops below ``tolerance``. With ``verify`` the
    reported gain is the exact stationary gain of the returned policy.
    """
    mask = mdp.action_mask
    r = mdp.expected_reward()
    p = np.nan_to_num(mdp.transition)
    ref = REFERENCE_STATE
    h = np.zeros(mdp.num_states) if initial_bias is None else np.asarray(initial_bias, dtype=float) / aperiodicity

    span = np.inf
    for iteration in range(1, max_iters + 1):
        q = r + aperiodicity * (p @ h)
        q = np.where(mask, q, -np.inf)
        th = q.max(axis=1) + (1.0 - aperiodicity) * h
        diff = th - h
        span = float(diff.max() - diff.min())
        h = th - th[ref]
        if span < tolerance:
            break
    else:
        raise ConvergenceError(span, max_iters)

    policy = _greedy(q)
    gain = float(0.5 * (diff.max() + diff.min()))
    if verify:
        exact = evaluate_policy(mdp, policy).avg_reward
        if abs(exact - gain) > tolerance:
            logger.warning(f"RVI gain {gain:.12f} differs from exact policy gain {exact:.12f}")
        gain = exact
    logger.debug(f"RVI converged in {iteration} iterations, span {span:.3e}, gain {gain:.10f}")
    return PlanningResult(policy=policy, gain=gain, bias=aperiodicity * h, iterations=iteration)


def _gain_and_bias(p_pi: np.ndarray, r_pi: np.ndarray) -> Tuple[float, np.ndarray]:
    """Solve g + h = r + P h with h(reference) = 0."""
    n = p_pi.shape[0]
    system = np.eye(n) - p_pi
    system[:, REFERENCE_STATE] = 1.0
    try:
        x = linalg.solve(system, r_pi)
    except linalg.LinAlgError:
        raise MultichainError(recurrent_classes(p_pi)) from None
    gain = float(x[REFERENCE_STATE])
    bias = x.copy()
    bias[REFERENCE_STATE] = 0.0
    return gain, bias


def average_reward_policy_iteration(
    mdp: TabularMDP,
    max_iters: int = 1_000,
    initial_policy: Optional[DeterministicPolicy] = None,
) -> PlanningResult:
    """Howard's policy iteration for unichain models; keeps the incumbent action on ties."""
    mask = mdp.action_mask
    r = mdp.expected_reward()
    p = np.nan_to_num(mdp.transition)
    policy = initial_policy or DeterministicPolicy.of(acts[0] for acts in mdp.actions)

    for iteration in range(1, max_iters + 1):
        gain, bias = _gain_and_bias(*induced_chain(mdp, policy))
        q = np.where(mask, r + p @ bias, -np.inf)
        current = np.asarray(policy.actions)
        incumbent = q[np.arange(mdp.num_states), current]
        best = np.argmax(q, axis=1)
        improve = q[np.arange(mdp.num_states), best] > incumbent + 1e-12
        if not improve.any():
            return PlanningResult(policy=policy, gain=gain, bias=bias, iterations=iteration)
        policy = DeterministicPolicy.of(np.where(improve, best, current))
    raise ConvergenceError(float("nan"), max_iters)


def best_structured_policy(mdp: TabularMDP, family: Sequence[DeterministicPolicy]) -> Tuple[int, float]:
    """Index and gain of the best policy in ``family``; lowest index wins ties."""
    if not family:
        raise ContractViolation("policy family is empty")
    best_index, best_gain = -1, -np.inf
    for index, policy in enumerate(family):
        try:
            gain = evaluate_policy(mdp, policy).avg_reward
        except MultichainError as error:
            raise error.for_policy(index) from None
        if gain > best_gain:
            best_index, best_gain = index, gain
    return best_index, float(best_gain)


def enumerate_policies(mdp: TabularMDP) -> Iterator[DeterministicPolicy]:
    """Every deterministic policy of ``mdp``; exponential, for desk-scale oracles."""
    for actions in itertools.product(*mdp.actions):
        yield DeterministicPolicy(tuple(actions))
