"""
Tests for episode semantics, agent runs and random streams.
"""
import math

import numpy as np
import pytest

from app.structrl.agents.bandits import FixedPolicyAgent, PThompsonAgent
from app.structrl.agents.base import PolicyArmsAgent
from app.structrl.core import DeterministicPolicy, TabularMDP, enumerate_policies, evaluate_policy
from app.structrl.errors import ContractViolation, StepCapExceeded
from app.structrl.simulator import EndReason, RandomSource, RngStream, run_agent, run_episode, step

from .mdps import delayed_reward_chain, dyadic_mdp, lazy_cycle, single_action_policy

INF = math.inf


def episodes(mdp, policy, count, tau=INF, seed=0, s_start=0):
    rng = RandomSource(seed)
    return [run_episode(mdp, policy, s_start, s_start, tau, rng) for _ in range(count)]


class TestRunEpisode:
    def test_two_cycle_takes_two_steps(self, cycle_mdp):
        for record in episodes(cycle_mdp, single_action_policy(2), 20):
            assert record.duration == 2
            assert record.reward_sum == 1.0
            assert record.end_reason is EndReason.RETURNED_TO_START
            assert record.end_state == 0

    def test_tau_one_ends_after_one_step(self):
        for record in episodes(lazy_cycle(), single_action_policy(4), 200, tau=1):
            assert record.duration == 1
            if record.end_state == 0:
                assert record.end_reason is EndReason.RETURNED_TO_START
            else:
                assert record.end_reason is EndReason.HIT_TAU

    def test_return_counts_its_reward(self):
        record = episodes(delayed_reward_chain(), single_action_policy(3), 1, seed=0)[0]
        assert record.reward_sum in (0.0, 1.5)

    def test_kac_mean_return_time(self):
        mdp = lazy_cycle()
        policy = single_action_policy(4)
        expected = evaluate_policy(mdp, policy).recurrence_time[0]
        durations = [r.duration for r in episodes(mdp, policy, 100_000, seed=1)]
        assert np.mean(durations) == pytest.approx(expected, rel=0.01)

    def test_renewal_ratio_is_unbiased(self):
        mdp = lazy_cycle()
        policy = single_action_policy(4)
        records = episodes(mdp, policy, 100_000, seed=2)
        ratio = sum(r.reward_sum for r in records) / sum(r.duration for r in records)
        assert ratio == pytest.approx(evaluate_policy(mdp, policy).avg_reward, rel=0.005)

    def test_episodes_are_exchangeable(self):
        durations = np.array([r.duration for r in episodes(lazy_cycle(), single_action_policy(4), 20_000, seed=3)])
        first, second = durations[:10_000], durations[10_000:]
        pooled = math.sqrt(first.var() / len(first) + second.var() / len(second))
        assert abs(first.mean() - second.mean()) <= 4 * pooled

    def test_finite_tau_biases_the_ratio(self):
        mdp = delayed_reward_chain()
        policy = single_action_policy(3)
        rho = evaluate_policy(mdp, policy).avg_reward
        assert rho == pytest.approx(0.375)
        records = episodes(mdp, policy, 10_000, tau=2, seed=4)
        rewards = np.array([r.reward_sum for r in records])
        durations = np.array([r.duration for r in records], dtype=float)
        ratio = rewards.sum() / durations.sum()
        standard_error = np.std(rewards - ratio * durations) / (durations.mean() * math.sqrt(len(records)))
        assert abs(ratio - rho) > 5 * standard_error
        assert ratio == pytest.approx(1.0 / 6.0, abs=0.02)

    def test_transient_start_hits_step_cap(self):
        transition = [[[0.0, 1.0]], [[0.0, 1.0]]]
        mdp = TabularMDP.from_arrays(transition, np.zeros((2, 1, 2)))
        with pytest.raises(StepCapExceeded):
            run_episode(mdp, single_action_policy(2), 0, 0, INF, RandomSource(0), step_cap=100)

    @pytest.mark.parametrize("tau", [0, 1.5, -3])
    def test_invalid_tau(self, cycle_mdp, tau):
        with pytest.raises(ContractViolation):
            run_episode(cycle_mdp, single_action_policy(2), 0, 0, tau, RandomSource(0))

    def test_unavailable_action(self, coins):
        with pytest.raises(ContractViolation):
            step(coins, 1, 1, RandomSource(0))


class _BrokenAgent(PolicyArmsAgent):
    def select_arm(self, t, rng):
        return 5


class TestRunAgent:
    def test_zero_horizon(self, cycle_mdp):
        agent = FixedPolicyAgent([single_action_policy(2)], 0)
        trace = run_agent(cycle_mdp, agent, 0, 0, INF, RandomSource(0))
        assert trace.cumulative_reward == 0.0
        assert trace.episodes == []
        assert trace.total_steps == 0

    def test_two_cycle_cumulative_reward(self, cycle_mdp):
        agent = FixedPolicyAgent([single_action_policy(2)], 0)
        trace = run_agent(cycle_mdp, agent, 10, 0, INF, RandomSource(0))
        assert trace.cumulative_reward == 5.0
        assert len(trace.episodes) == 5
        assert trace.partial_steps == 0

    def test_trailing_episode_is_not_completed(self, cycle_mdp):
        agent = FixedPolicyAgent([single_action_policy(2)], 0)
        trace = run_agent(cycle_mdp, agent, 9, 0, INF, RandomSource(0))
        assert len(trace.episodes) == 4
        assert trace.partial_steps == 1
        assert trace.cumulative_reward == 4.0
        assert sum(e.duration for e in trace.episodes) + trace.partial_steps == 9

    def test_out_of_range_arm(self, cycle_mdp):
        with pytest.raises(ContractViolation):
            run_agent(cycle_mdp, _BrokenAgent([single_action_policy(2)]), 10, 0, INF, RandomSource(0))

    def test_replay_is_identical(self):
        mdp = dyadic_mdp(7)
        family = list(enumerate_policies(mdp))

        def trace():
            return run_agent(mdp, PThompsonAgent(family), 2_000, 0, INF, RandomSource(RngStream(42, (1,))))

        assert trace() == trace()

    def test_checkpoints_track_cumulative_reward(self):
        mdp = dyadic_mdp(8)
        agent = FixedPolicyAgent(list(enumerate_policies(mdp)), 3)
        checkpoints = [1, 10, 100, 500]
        trace = run_agent(mdp, agent, 500, 0, INF, RandomSource(5), checkpoints=checkpoints)
        assert trace.checkpoints == tuple(checkpoints)
        assert list(trace.checkpoint_rewards) == sorted(trace.checkpoint_rewards)
        for t, cr in zip(checkpoints, trace.checkpoint_rewards):
            assert cr <= t
        assert trace.checkpoint_rewards[-1] == trace.cumulative_reward

    def test_step_log(self, cycle_mdp):
        agent = FixedPolicyAgent([single_action_policy(2)], 0)
        trace = run_agent(cycle_mdp, agent, 6, 0, INF, RandomSource(0), step_log_limit=3)
        assert trace.step_log == [(1, 0, 0, 1, 0.0), (2, 1, 0, 0, 1.0), (3, 0, 0, 1, 0.0)]

    def test_counts_random_numbers(self):
        mdp = dyadic_mdp(2)
        agent = FixedPolicyAgent([DeterministicPolicy((0, 1, 0, 1))], 0)
        trace = run_agent(mdp, agent, 1_000, 0, INF, RandomSource(0))
        assert trace.rng_draws == 1_000

    def test_finite_tau_cuts_episodes(self):
        mdp = lazy_cycle()
        agent = FixedPolicyAgent([single_action_policy(4)], 0)
        trace = run_agent(mdp, agent, 1_000, 0, 3, RandomSource(0))
        assert all(e.duration <= 3 for e in trace.episodes)
        assert any(e.end_reason is EndReason.HIT_TAU for e in trace.episodes)


class TestRngStream:
    def test_spawn_keys_separate_streams(self):
        a = RandomSource(RngStream(7, (0,)))
        b = RandomSource(RngStream(7, (1,)))
        assert [a.uniform() for _ in range(5)] != [b.uniform() for _ in range(5)]

    def test_same_stream_same_draws(self):
        a = RandomSource(RngStream(7, (2,)))
        b = RandomSource(RngStream(7, (2,)))
        assert [a.uniform() for _ in range(10)] == [b.uniform() for _ in range(10)]

    def test_unknown_generator(self):
        with pytest.raises(ContractViolation):
            RngStream(0, algorithm_id="MT19937").generator()
