"""
Seeded trajectory generation through a true MDP with renewal episode
semantics: an episode ends on return to ``s_start`` or after ``tau`` steps.
"""
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .constants import EPISODE_STEP_CAP, GENERATOR_ID, UNIFORM_BLOCK_SIZE
from .core.mdp import DeterministicPolicy, TabularMDP
from .errors import ContractViolation, StepCapExceeded

if TYPE_CHECKING:
    from .agents.base import Agent

logger = logging.getLogger(__name__)

INFINITY = math.inf


@dataclass(frozen=True)
class RngStream:
    """Identifies a reproducible random stream: (seed, spawn key, generator)."""

    seed: int
    spawn_key: Tuple[int, ...] = ()
    algorithm_id: str = GENERATOR_ID

    def generator(self) -> np.random.Generator:
        if self.algorithm_id != GENERATOR_ID:
            raise ContractViolation(f"unsupported generator {self.algorithm_id!r}")
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        return np.random.Generator(np.random.PCG64(sequence))


class RandomSource:
    """Counting wrapper around a numpy Generator.

    Uniforms are drawn in blocks; ``draws`` counts every random number
    handed out, whatever its distribution.
    """

    def __init__(self, stream: Union[RngStream, int]):
        self.stream = stream if isinstance(stream, RngStream) else RngStream(int(stream))
        self._generator = self.stream.generator()
        self._block: List[float] = []
        self._position = 0
        self.draws = 0

    def uniform(self) -> float:
        if self._position >= len(self._block):
            self._block = self._generator.random(UNIFORM_BLOCK_SIZE).tolist()
            self._position = 0
        value = self._block[self._position]
        self._position += 1
        self.draws += 1
        return value

    def integers(self, high: int) -> int:
        self.draws += 1
        return int(self._generator.integers(high))

    def beta(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        self.draws += a.size
        return self._generator.beta(a, b)

    def standard_gamma(self, shape: np.ndarray) -> np.ndarray:
        """Gamma(shape, 1) variates; zero shapes yield exact zeros and are not counted."""
        shape = np.asarray(shape, dtype=float)
        self.draws += int(np.count_nonzero(shape))
        return self._generator.standard_gamma(shape)


class EndReason(str, Enum):
    RETURNED_TO_START = "ReturnedToStart"
    HIT_TAU = "HitTau"


@dataclass(frozen=True)
class EpisodeRecord:
    """One renewal-reward sample: (duration, reward) of a finished episode."""

    policy_index: int
    duration: int
    reward_sum: float
    end_reason: EndReason
    end_state: int


@dataclass(frozen=True)
class EpisodeScheme:
    """When episodes end and whether the next one restarts at ``s_start``."""

    s_start: int
    tau: float = INFINITY
    renewal: bool = True
    reset_to_start: bool = False


@dataclass
class RunTrace:
    episodes: List[EpisodeRecord] = field(default_factory=list)
    total_steps: int = 0
    cumulative_reward: float = 0.0
    checkpoints: Tuple[int, ...] = ()
    checkpoint_rewards: List[float] = field(default_factory=list)
    partial_steps: int = 0
    partial_reward: float = 0.0
    step_log: List[Tuple[int, int, int, int, float]] = field(default_factory=list)
    rng_draws: int = 0
    teleports: bool = False


Row = Tuple[List[float], List[int], List[float]]


@lru_cache(maxsize=32)
def sampling_table(mdp: TabularMDP) -> Tuple[Dict[int, Row], ...]:
    """Per (state, action): cumulative probabilities, successors and rewards over the positive support."""
    table = []
    for s, acts in enumerate(mdp.actions):
        rows: Dict[int, Row] = {}
        for a in acts:
            probs = np.nan_to_num(mdp.transition[s, a])
            support = np.flatnonzero(probs > 0)
            rows[a] = (
                np.cumsum(probs[support]).tolist(),
                support.tolist(),
                mdp.reward[s, a, support].tolist(),
            )
        table.append(rows)
    return tuple(table)


def _draw(row: Row, u: float) -> Tuple[int, float]:
    cdf, successors, rewards = row
    index = bisect_right(cdf, u)
    if index >= len(successors):
        index = len(successors) - 1
    return successors[index], rewards[index]


def step(mdp: TabularMDP, state: int, action: int, rng: RandomSource) -> Tuple[int, float]:
    """Sample s' ~ P(.|state, action) by inverse CDF with one uniform; return (s', R(s, a, s'))."""
    row = sampling_table(mdp)[state].get(action)
    if row is None:
        raise ContractViolation(f"action {action} is not available in state {state}")
    return _draw(row, rng.uniform())


def run_episode(
    mdp: TabularMDP,
    policy: DeterministicPolicy,
    start_state: int,
    s_start: int,
    tau: float,
    rng: RandomSource,
    policy_index: int = 0,
    step_cap: int = EPISODE_STEP_CAP,
) -> EpisodeRecord:
    """Follow ``policy`` until the first t' >= 1 with state == s_start, or t' == tau."""
    if not (tau == INFINITY or (int(tau) == tau and tau >= 1)):
        raise ContractViolation(f"tau must be a positive integer or infinity, got {tau!r}")
    table = sampling_table(mdp)
    actions = policy.actions
    state = start_state
    duration = 0
    reward_sum = 0.0
    while True:
        row = table[state].get(actions[state])
        if row is None:
            raise ContractViolation(f"action {actions[state]} is not available in state {state}")
        state, reward = _draw(row, rng.uniform())
        reward_sum += reward
        duration += 1
        if state == s_start:
            return EpisodeRecord(policy_index, duration, reward_sum, EndReason.RETURNED_TO_START, state)
        if duration >= tau:
            return EpisodeRecord(policy_index, duration, reward_sum, EndReason.HIT_TAU, state)
        if duration >= step_cap:
            raise StepCapExceeded(
                f"episode from state {start_state} did not return to {s_start} within {step_cap} steps; "
                f"s_start is probably transient under policy {policy_index}"
            )


def run_agent(
    mdp: TabularMDP,
    agent: "Agent",
    horizon: int,
    s_start: int,
    tau: float,
    rng: RandomSource,
    checkpoints: Sequence[int] = (),
    step_log_limit: int = 0,
) -> RunTrace:
    """Execute exactly ``horizon`` transitions, handing finished episodes to the agent.

    The episode boundary is evaluated at the top of each step, so the reward
    of the step that returns to ``s_start`` belongs to the finished episode.
    The trailing unfinished episode counts toward the cumulative reward but
    is never given to the agent.
    """
    scheme = agent.episode_scheme(s_start, tau)
    table = sampling_table(mdp)
    checkpoints = tuple(sorted(c for c in checkpoints if 1 <= c <= horizon))
    trace = RunTrace(checkpoints=checkpoints, teleports=scheme.reset_to_start)
    draws_before = rng.draws
    if horizon <= 0:
        return trace

    observe = agent.observe if agent.records_transitions else None
    num_arms = agent.num_arms
    renewal, limit, start = scheme.renewal, scheme.tau, scheme.s_start

    def choose(t: int) -> int:
        arm = agent.select_arm(t, rng)
        if not 0 <= arm < num_arms:
            raise ContractViolation(f"agent {agent.name} returned arm {arm} outside [0, {num_arms})")
        return arm

    arm = choose(1)
    actions = agent.policy_for(arm).actions
    state = start
    episode_steps = 0
    episode_reward = 0.0
    cumulative = 0.0
    next_checkpoint = 0
    episodes = trace.episodes

    for t in range(1, horizon + 1):
        if episode_steps:
            returned = renewal and state == start
            if returned or episode_steps >= limit:
                reason = EndReason.RETURNED_TO_START if returned else EndReason.HIT_TAU
                record = EpisodeRecord(arm, episode_steps, episode_reward, reason, state)
                episodes.append(record)
                agent.end_episode(record)
                arm = choose(t)
                actions = agent.policy_for(arm).actions
                if scheme.reset_to_start:
                    state = start
                episode_steps = 0
                episode_reward = 0.0

        action = actions[state]
        row = table[state].get(action)
        if row is None:
            raise ContractViolation(f"action {action} is not available in state {state}")
        s_next, reward = _draw(row, rng.uniform())
        if observe is not None:
            observe(state, action, s_next, reward)
        if len(trace.step_log) < step_log_limit:
            trace.step_log.append((t, state, action, s_next, reward))
        cumulative += reward
        episode_reward += reward
        episode_steps += 1
        state = s_next
        if next_checkpoint < len(checkpoints) and t == checkpoints[next_checkpoint]:
            trace.checkpoint_rewards.append(cumulative)
            next_checkpoint += 1

    # an episode that finished on the very last step is complete
    if renewal and state == start:
        record = EpisodeRecord(arm, episode_steps, episode_reward, EndReason.RETURNED_TO_START, state)
    elif episode_steps >= limit:
        record = EpisodeRecord(arm, episode_steps, episode_reward, EndReason.HIT_TAU, state)
    else:
        record = None
    if record is not None:
        episodes.append(record)
        agent.end_episode(record)
    else:
        trace.partial_steps = episode_steps
        trace.partial_reward = episode_reward

    trace.total_steps = horizon
    trace.cumulative_reward = cumulative
    trace.rng_draws = rng.draws - draws_before
    logger.debug(
        f"Run of {agent.name}: {horizon} steps, {len(episodes)} episodes, CR={cumulative:.6f}, "
        f"{trace.rng_draws} random numbers"
    )
    return trace
