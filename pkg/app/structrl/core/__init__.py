"""
Exact analysis and planning for finite tabular MDPs.
"""
from .analysis import ChainAnalysis, analyze_chain, evaluate_policy, gth_stationary, recurrent_classes
from .mdp import (
    DeterministicPolicy,
    TabularMDP,
    Violation,
    check_policy,
    induced_chain,
    reachable_states,
    validate,
)
from .planning import (
    PlanningResult,
    average_reward_optimal,
    average_reward_policy_iteration,
    best_structured_policy,
    enumerate_policies,
)

__all__ = [
    "ChainAnalysis",
    "DeterministicPolicy",
    "PlanningResult",
    "TabularMDP",
    "Violation",
    "analyze_chain",
    "average_reward_optimal",
    "average_reward_policy_iteration",
    "best_structured_policy",
    "check_policy",
    "enumerate_policies",
    "evaluate_policy",
    "gth_stationary",
    "induced_chain",
    "reachable_states",
    "recurrent_classes",
    "validate",
]
