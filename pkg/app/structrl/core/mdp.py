"""
Finite tabular MDPs: representation, validation, JSON serialization and
the Markov chain induced by a deterministic policy.
"""
import json
import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from ..constants import ROW_SUM_TOLERANCE
from ..errors import ContractViolation

logger = logging.getLogger(__name__)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TabularMDP:
    """Ground-truth MDP with state-dependent action sets.

    ``transition[s, a]`` is the successor distribution of action ``a`` in state
    ``s`` and ``reward[s, a, s']`` the reward of that transition. Entries of
    actions outside a state's action set are ignored. A transition row of NaN
    marks a missing entry.
    """

    num_states: int
    actions: Tuple[Tuple[int, ...], ...]
    transition: np.ndarray
    reward: np.ndarray

    @classmethod
    def from_arrays(cls, transition, reward, actions: Sequence[Iterable[int]] = None) -> "TabularMDP":
        transition = np.asarray(transition, dtype=float)
        reward = np.asarray(reward, dtype=float)
        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise ContractViolation(f"transition must have shape (N, A, N), got {transition.shape}")
        if reward.shape != transition.shape:
            raise ContractViolation(f"reward shape {reward.shape} does not match transition {transition.shape}")
        num_states, num_actions, _ = transition.shape
        if actions is None:
            actions = [range(num_actions)] * num_states
        action_sets = tuple(tuple(sorted(set(int(a) for a in acts))) for acts in actions)
        if len(action_sets) != num_states:
            raise ContractViolation(f"expected {num_states} action sets, got {len(action_sets)}")
        for s, acts in enumerate(action_sets):
            if not acts:
                raise ContractViolation(f"state {s} has an empty action set")
            if acts[0] < 0 or acts[-1] >= num_actions:
                raise ContractViolation(f"state {s} has action ids outside [0, {num_actions})")
        return cls(num_states, action_sets, _frozen(transition), _frozen(reward))

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def action_mask(self) -> np.ndarray:
        mask = np.zeros((self.num_states, self.num_actions), dtype=bool)
        for s, acts in enumerate(self.actions):
            mask[s, list(acts)] = True
        return mask

    def expected_reward(self) -> np.ndarray:
        """r(s, a) = sum_s' P(s'|s, a) R(s, a, s'), zero for disallowed actions."""
        r = np.einsum("ijk,ijk->ij", np.nan_to_num(self.transition), self.reward)
        return np.where(self.action_mask, r, 0.0)

    def scaled(self, alpha: float) -> "TabularMDP":
        return TabularMDP.from_arrays(self.transition, self.reward * alpha, self.actions)

    def to_json(self) -> str:
        transitions: Dict[str, List[float]] = {}
        rewards: Dict[str, float] = {}
        for s, acts in enumerate(self.actions):
            for a in acts:
                row = self.transition[s, a]
                transitions[f"{s},{a}"] = [float(p) for p in row]
                for s_next in range(self.num_states):
                    value = float(self.reward[s, a, s_next])
                    if row[s_next] > 0 or value != 0.0:
                        rewards[f"{s},{a},{s_next}"] = value
        return json.dumps(
            {
                "num_states": self.num_states,
                "actions": [list(acts) for acts in self.actions],
                "transitions": transitions,
                "rewards": rewards,
            }
        )

    @classmethod
    def from_json(cls, document: Any) -> "TabularMDP":
        data = json.loads(document) if isinstance(document, str) else document
        num_states = int(data["num_states"])
        actions = [tuple(int(a) for a in acts) for acts in data["actions"]]
        num_actions = 1 + max(max(acts) for acts in actions if acts)
        transition = np.full((num_states, num_actions, num_states), np.nan)
        reward = np.zeros((num_states, num_actions, num_states))
        for key, row in data["transitions"].items():
            s, a = (int(x) for x in key.split(","))
            transition[s, a] = np.asarray(row, dtype=float)
        for key, value in data.get("rewards", {}).items():
            s, a, s_next = (int(x) for x in key.split(","))
            reward[s, a, s_next] = float(value)
        return cls.from_arrays(transition, reward, actions)


@dataclass(frozen=True)
class DeterministicPolicy:
    """State -> action map; one arm in the policies-as-arms view."""

    actions: Tuple[int, ...]

    @classmethod
    def of(cls, actions: Iterable[int]) -> "DeterministicPolicy":
        return cls(tuple(int(a) for a in actions))

    def action_of(self, state: int) -> int:
        return self.actions[state]

    def __len__(self) -> int:
        return len(self.actions)


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    state: int = -1
    action: int = -1

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "message": self.message, "state": self.state, "action": self.action}


def reachable_states(mdp: TabularMDP, start_state: int = 0) -> np.ndarray:
    """Boolean mask of states reachable from ``start_state`` under the union of actions."""
    graph = np.zeros((mdp.num_states, mdp.num_states), dtype=bool)
    for s, acts in enumerate(mdp.actions):
        rows = np.nan_to_num(mdp.transition[s, list(acts)])
        graph[s] = (rows > 0).any(axis=0)
    seen = np.zeros(mdp.num_states, dtype=bool)
    seen[start_state] = True
    queue = deque([start_state])
    while queue:
        s = queue.popleft()
        for s_next in np.flatnonzero(graph[s] & ~seen):
            seen[s_next] = True
            queue.append(int(s_next))
    return seen


def validate(mdp: TabularMDP, start_state: int = 0) -> List[Violation]:
    """Report every broken TabularMDP invariant; never raises."""
    violations: List[Violation] = []
    for s, acts in enumerate(mdp.actions):
        for a in acts:
            row = mdp.transition[s, a]
            if np.isnan(row).any():
                violations.append(Violation("missing_transition", f"no transition vector for ({s}, {a})", s, a))
                continue
            if (row < 0).any():
                violations.append(Violation("negative_probability", f"negative probability in ({s}, {a})", s, a))
            total = float(row.sum())
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                violations.append(Violation("row_sum", f"row ({s}, {a}) sums to {total!r}", s, a))
            rewards = mdp.reward[s, a]
            if np.isnan(rewards).any() or (rewards < 0).any() or (rewards > 1).any():
                violations.append(Violation("reward_range", f"reward of ({s}, {a}) outside [0, 1]", s, a))
    if not violations:
        reached = reachable_states(mdp, start_state)
        for s in np.flatnonzero(~reached):
            violations.append(Violation("unreachable", f"state {s} unreachable from {start_state}", int(s)))
    if violations:
        logger.debug(f"MDP validation found {len(violations)} violations")
    return violations


def check_policy(mdp: TabularMDP, policy: DeterministicPolicy) -> None:
    if len(policy) != mdp.num_states:
        raise ContractViolation(f"policy covers {len(policy)} states, MDP has {mdp.num_states}")
    for s, a in enumerate(policy.actions):
        if a not in mdp.actions[s]:
            raise ContractViolation(f"action {a} is not available in state {s}")


def induced_chain(mdp: TabularMDP, policy: DeterministicPolicy) -> Tuple[np.ndarray, np.ndarray]:
    """Transition matrix P^pi and expected one-step reward vector r^pi."""
    check_policy(mdp, policy)
    states = np.arange(mdp.num_states)
    acts = np.asarray(policy.actions)
    p_pi = np.array(mdp.transition[states, acts])
    r_pi = np.einsum("ij,ij->i", p_pi, mdp.reward[states, acts])
    return p_pi, r_pi
