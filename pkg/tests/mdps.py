"""
Small MDPs shared by the test modules.
"""
import numpy as np

from app.structrl.core.mdp import DeterministicPolicy, TabularMDP


def two_cycle() -> TabularMDP:
    """s0 -> s1 -> s0 deterministically; reward 0 on the way out, 1 on the way back."""
    transition = np.array([[[0.0, 1.0]], [[1.0, 0.0]]])
    reward = np.array([[[0.0, 0.0]], [[1.0, 0.0]]])
    return TabularMDP.from_arrays(transition, reward)


def coin_mdp(p_good: float = 0.9, p_bad: float = 0.1) -> TabularMDP:
    """State 0 offers two coins; heads (reward 1) moves to state 1, which returns to 0 with reward 0.

    The policy playing a coin with heads probability p has gain p / (1 + p).
    """
    transition = np.zeros((2, 2, 2))
    reward = np.zeros((2, 2, 2))
    for action, p in enumerate((p_good, p_bad)):
        transition[0, action] = [1.0 - p, p]
        reward[0, action, 1] = 1.0
    transition[1, 0, 0] = 1.0
    return TabularMDP.from_arrays(transition, reward, [(0, 1), (0,)])


def lazy_cycle() -> TabularMDP:
    """Four states on a cycle, advancing with probability 0.8; reward 1 on advancing, 0.2 otherwise."""
    transition = np.zeros((4, 1, 4))
    reward = np.full((4, 1, 4), 0.2)
    for s in range(4):
        transition[s, 0, s] = 0.2
        transition[s, 0, (s + 1) % 4] = 0.8
        reward[s, 0, (s + 1) % 4] = 1.0
    return TabularMDP.from_arrays(transition, reward)


def delayed_reward_chain() -> TabularMDP:
    """0 -> 1 (p=0.5, r=0.5) or 0 -> 0 (r=0); 1 -> 2 (r=0); 2 -> 0 (r=1). Gain 0.375."""
    transition = np.zeros((3, 1, 3))
    reward = np.zeros((3, 1, 3))
    transition[0, 0] = [0.5, 0.5, 0.0]
    reward[0, 0, 1] = 0.5
    transition[1, 0, 2] = 1.0
    transition[2, 0, 0] = 1.0
    reward[2, 0, 0] = 1.0
    return TabularMDP.from_arrays(transition, reward)


def dyadic_mdp(seed: int, num_states: int = 4, num_actions: int = 2) -> TabularMDP:
    """Random full-support MDP whose rewards are multiples of 1/4, so sums are exact in floating point."""
    rng = np.random.default_rng(seed)
    transition = rng.dirichlet(np.ones(num_states), size=(num_states, num_actions))
    transition /= transition.sum(axis=2, keepdims=True)
    reward = rng.integers(0, 5, size=(num_states, num_actions, num_states)) / 4.0
    return TabularMDP.from_arrays(transition, reward)


def single_action_policy(num_states: int) -> DeterministicPolicy:
    return DeterministicPolicy((0,) * num_states)

