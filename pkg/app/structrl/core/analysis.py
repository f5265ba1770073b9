"""
Stationary analysis of the Markov chain induced by a policy.
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..constants import ROW_SUM_TOLERANCE, STATIONARY_TOLERANCE
from ..errors import ContractViolation, MultichainError
from .mdp import DeterministicPolicy, TabularMDP, induced_chain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainAnalysis:
    stationary: np.ndarray
    avg_reward: float
    recurrence_time: np.ndarray  # inf for transient states
    recurrent_class: Tuple[int, ...]
    residual: float


def recurrent_classes(p_pi: np.ndarray) -> List[Tuple[int, ...]]:
    """Closed strongly connected components of the transition graph."""
    graph = csr_matrix(p_pi > 0)
    _, labels = connected_components(graph, directed=True, connection="strong")
    classes = []
    for label in np.unique(labels):
        members = np.flatnonzero(labels == label)
        outside = np.ones(len(labels), dtype=bool)
        outside[members] = False
        if not (p_pi[np.ix_(members, outside)] > 0).any():
            classes.append(tuple(int(s) for s in members))
    return classes


def gth_stationary(p: np.ndarray) -> np.ndarray:
    """Stationary vector of an irreducible chain by GTH state reduction.

    Only sums and products of non-negative numbers are formed, so tiny
    stationary probabilities keep full relative accuracy.
    """
    a = np.array(p, dtype=float)
    n = a.shape[0]
    for k in range(n - 1, 0, -1):
        leave = a[k, :k].sum()
        if leave <= 0:
            raise MultichainError(recurrent_classes(p))
        a[:k, k] /= leave
        a[:k, :k] += np.outer(a[:k, k], a[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ a[:k, k]
    return pi / pi.sum()


def analyze_chain(p_pi: np.ndarray, r_pi: np.ndarray, check_unichain: bool = True) -> ChainAnalysis:
    """Stationary distribution, average reward and mean recurrence times.

    The stationary vector is the normalized left null vector of (P - I),
    computed on the recurrent class by state reduction. Transient states get
    probability zero.
    """
    p_pi = np.asarray(p_pi, dtype=float)
    r_pi = np.asarray(r_pi, dtype=float)
    n = p_pi.shape[0]
    if p_pi.shape != (n, n) or r_pi.shape != (n,):
        raise ContractViolation(f"inconsistent chain shapes {p_pi.shape} and {r_pi.shape}")
    if (p_pi < 0).any() or np.abs(p_pi.sum(axis=1) - 1.0).max() > ROW_SUM_TOLERANCE:
        raise ContractViolation("induced transition matrix is not row-stochastic")

    classes = recurrent_classes(p_pi)
    if len(classes) > 1 and check_unichain:
        raise MultichainError(classes)
    members = np.asarray(classes[0])

    solution = gth_stationary(p_pi[np.ix_(members, members)])
    if (solution <= 0).any():
        lost = members[solution <= 0].tolist()
        logger.warning(f"Stationary probability underflows to zero on recurrent states {lost}")

    stationary = np.zeros(n)
    stationary[members] = solution
    residual = float(np.abs(stationary @ p_pi - stationary).max())
    if residual > STATIONARY_TOLERANCE:
        logger.warning(f"Stationary residual {residual:.3e} exceeds {STATIONARY_TOLERANCE:.0e}")

    with np.errstate(divide="ignore"):
        recurrence = np.where(stationary > 0, 1.0 / stationary, np.inf)
    return ChainAnalysis(
        stationary=stationary,
        avg_reward=float(stationary @ r_pi),
        recurrence_time=recurrence,
        recurrent_class=tuple(int(s) for s in members),
        residual=residual,
    )


def evaluate_policy(mdp: TabularMDP, policy: DeterministicPolicy) -> ChainAnalysis:
    return analyze_chain(*induced_chain(mdp, policy))
