"""
Slow server problem: one queue, a fast and a slow exponential server,
uniformized into a discrete-time MDP with one event per step. The event
happens first and the dispatch chosen in the current state follows it, so
every encoded state, including an empty queue with both servers busy, can
be observed.

State (queue, busy1, busy2) with queue in [0, B-1] counting only waiting
customers, encoded as queue * 4 + busy1 * 2 + busy2. The reward of a step
is 1 - (customers in system) / (B + 1).
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple, Union

import numpy as np

from ..constants import SLOW_SERVER_BUFFER, SLOW_SERVER_LAMBDA, SLOW_SERVER_MU1, SLOW_SERVER_MU2
from ..core.mdp import DeterministicPolicy, TabularMDP
from ..errors import ConstructionError
from .base import EnvironmentInstance, ThresholdPolicyFamily

logger = logging.getLogger(__name__)

HOLD, DISPATCH_FAST, DISPATCH_SLOW = 0, 1, 2

Rate = Union[Fraction, str, int]


@dataclass(frozen=True)
class SlowServerConfig:
    arrival: Fraction
    mu1: Fraction
    mu2: Fraction
    buffer: int

    def __post_init__(self):
        for name in ("arrival", "mu1", "mu2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if min(self.arrival, self.mu1, self.mu2) < 0:
            raise ConstructionError("rates must be non-negative")
        if self.arrival + self.mu1 + self.mu2 > 1:
            raise ConstructionError(
                f"uniformization requires lambda + mu1 + mu2 <= 1, got {self.arrival + self.mu1 + self.mu2}"
            )
        if not self.mu1 > self.mu2:
            raise ConstructionError("server 1 must be the fast server (mu1 > mu2)")
        if self.buffer < 1:
            raise ConstructionError("buffer must be at least 1")

    @classmethod
    def benchmark(cls) -> "SlowServerConfig":
        return cls(Fraction(SLOW_SERVER_LAMBDA), Fraction(SLOW_SERVER_MU1), Fraction(SLOW_SERVER_MU2), SLOW_SERVER_BUFFER)

    @property
    def num_states(self) -> int:
        return 4 * self.buffer


@dataclass(frozen=True)
class SlowServerState:
    queue: int
    busy1: bool
    busy2: bool

    @property
    def index(self) -> int:
        return encode(self.queue, self.busy1, self.busy2)

    @property
    def in_system(self) -> int:
        return self.queue + int(self.busy1) + int(self.busy2)

    @classmethod
    def from_index(cls, index: int) -> "SlowServerState":
        return cls(index // 4, bool(index & 2), bool(index & 1))


def encode(queue: int, busy1: bool, busy2: bool) -> int:
    return queue * 4 + int(busy1) * 2 + int(busy2)


def available_actions(state: SlowServerState) -> Tuple[int, ...]:
    actions = [HOLD]
    if state.queue > 0 and not state.busy1:
        actions.append(DISPATCH_FAST)
    if state.queue > 0 and not state.busy2:
        actions.append(DISPATCH_SLOW)
    return tuple(actions)


def _after_dispatch(state: SlowServerState, action: int) -> SlowServerState:
    if action == DISPATCH_FAST:
        return SlowServerState(state.queue - 1, True, state.busy2)
    if action == DISPATCH_SLOW:
        return SlowServerState(state.queue - 1, state.busy1, True)
    return state


def _events(config: SlowServerConfig, state: SlowServerState) -> List[Tuple[SlowServerState, Fraction]]:
    """The four uniformized events; completions at idle servers and arrivals to a full queue leave the state unchanged."""
    q, b1, b2 = state.queue, state.busy1, state.busy2
    return [
        (SlowServerState(q + 1, b1, b2) if q < config.buffer - 1 else state, config.arrival),
        (SlowServerState(q, False, b2), config.mu1),
        (SlowServerState(q, b1, False), config.mu2),
        (state, 1 - config.arrival - config.mu1 - config.mu2),
    ]


def _successors(config: SlowServerConfig, state: SlowServerState, action: int) -> Dict[int, Fraction]:
    """Exact successor distribution: one random event, then the chosen dispatch closes the step.

    Events never take a waiting customer away or occupy a server, so a
    dispatch available in ``state`` is still available after the event.
    """
    row: Dict[int, Fraction] = {}
    for after_event, probability in _events(config, state):
        if probability:
            target = _after_dispatch(after_event, action).index
            row[target] = row.get(target, Fraction(0)) + probability
    return row


def build_slow_server(config: SlowServerConfig) -> TabularMDP:
    n = config.num_states
    transition = np.zeros((n, 3, n))
    reward = np.zeros((n, 3, n))
    actions: List[Tuple[int, ...]] = []
    for index in range(n):
        state = SlowServerState.from_index(index)
        acts = available_actions(state)
        actions.append(acts)
        value = float(1 - Fraction(state.in_system, config.buffer + 1))
        for action in acts:
            for target, probability in _successors(config, state, action).items():
                transition[index, action, target] = float(probability)
            reward[index, action, :] = value
    logger.info(
        f"Built slow server MDP: {n} states, lambda={config.arrival}, mu1={config.mu1}, "
        f"mu2={config.mu2}, buffer={config.buffer}"
    )
    return TabularMDP.from_arrays(transition, reward, actions)


def threshold_action(state: SlowServerState, threshold: int) -> int:
    if state.queue > 0 and not state.busy1:
        return DISPATCH_FAST
    if state.queue > 0 and state.busy1 and not state.busy2 and state.queue >= threshold:
        return DISPATCH_SLOW
    return HOLD


def slow_server_policies(config: SlowServerConfig) -> ThresholdPolicyFamily:
    """Fast server first; the slow server takes a customer iff the queue is at least theta."""
    thresholds = tuple(range(config.buffer + 1))
    policies = tuple(
        DeterministicPolicy.of(
            threshold_action(SlowServerState.from_index(i), theta) for i in range(config.num_states)
        )
        for theta in thresholds
    )
    return ThresholdPolicyFamily(thresholds, policies)


def is_fast_server_first(config: SlowServerConfig, policy: DeterministicPolicy) -> bool:
    """True iff a waiting customer is always dispatched when the fast server is free."""
    for index in range(config.num_states):
        state = SlowServerState.from_index(index)
        if state.queue > 0 and not state.busy1 and policy.action_of(index) != DISPATCH_FAST:
            return False
    return True


def slow_server_instance(config: SlowServerConfig) -> EnvironmentInstance:
    mdp = build_slow_server(config)
    family = slow_server_policies(config)
    for theta, policy in zip(family.thresholds, family.policies):
        if not is_fast_server_first(config, policy):
            raise ConstructionError(f"threshold policy {theta} breaks the fast-server-first structure")
    return EnvironmentInstance(
        name="slow_server",
        mdp=mdp,
        family=family,
        s_start=encode(0, False, False),
        support=mdp.transition > 0,
    )
