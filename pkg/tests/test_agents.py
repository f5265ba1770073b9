"""
Tests for the policies-as-arms bandits, the empirical model, PSRL and warm-started PSRL.
"""
import copy
import math
import sys
from collections import Counter

import numpy as np
import pytest

from app.structrl.agents import (
    ArmStats,
    BetaBelief,
    EmpiricalModel,
    FixedPolicyAgent,
    PsrlAgent,
    PsrlState,
    PThompsonAgent,
    PUCBAgent,
    RandomAgent,
    extended_observe,
    psrl_episode,
    pthompson_select,
    pthompson_update,
    pucb_select,
    pucb_update,
    random_baseline,
    sample_transitions,
    warm_psrl,
)
from app.structrl.agents.bandits import ConstantBeta, InverseLogBeta, pucb_bonus
from app.structrl.core import DeterministicPolicy, check_policy, enumerate_policies
from app.structrl.errors import ContractViolation
from app.structrl.simulator import EndReason, EpisodeRecord, RandomSource, run_agent, step

from .mdps import coin_mdp, dyadic_mdp

INF = math.inf


def episode(duration, reward, arm=0):
    return EpisodeRecord(arm, duration, reward, EndReason.RETURNED_TO_START, 0)


class TestPUCB:
    def test_first_update(self):
        stats = pucb_update(ArmStats(), episode(4, 2.0))
        assert stats.rho_hat == 0.5
        assert stats.pulls == 1

    def test_ratio_of_sums(self):
        stats = pucb_update(pucb_update(ArmStats(), episode(4, 2.0)), episode(6, 1.0))
        assert stats.rho_hat == pytest.approx(0.3)
        assert (stats.reward_total, stats.rounds_total) == (3.0, 10)

    def test_unplayed_arms_tie_to_lowest_index(self):
        assert pucb_select([ArmStats()] * 3, t=1, beta_t=1.0) == 0

    def test_unplayed_arm_beats_played(self):
        stats = [pucb_update(ArmStats(), episode(2, 2.0)), ArmStats()]
        assert pucb_select(stats, t=3, beta_t=1.0) == 1

    def test_bonus_arithmetic(self):
        bonus = pucb_bonus(np.array([4.0, 0.0]), math.exp(2.0), 1.0)
        assert bonus[0] == pytest.approx(1.0)
        assert bonus[1] == np.inf

    def test_index_matches_direct_evaluation(self):
        stats = [
            ArmStats(rho_hat=0.9, pulls=100, reward_total=90.0, rounds_total=100),
            ArmStats(rho_hat=0.1, pulls=1, reward_total=0.1, rounds_total=1),
        ]
        t = 1_000
        scores = [s.rho_hat + math.sqrt(2 * math.log(t) / s.pulls) for s in stats]
        assert pucb_select(stats, t, 1.0) == int(np.argmax(scores))

    def test_round_index_must_be_positive(self):
        with pytest.raises(ContractViolation):
            pucb_select([ArmStats()], t=0, beta_t=1.0)

    def test_zero_beta_is_greedy(self):
        stats = [ArmStats(0.3, 4, 1.2, 4), ArmStats(0.7, 1, 0.7, 1), ArmStats(0.5, 9, 4.5, 9)]
        assert pucb_select(stats, t=10**6, beta_t=0.0) == 1

    def test_zero_beta_agent_plays_the_best_estimate(self):
        mdp = dyadic_mdp(21)
        agent = PUCBAgent(list(enumerate_policies(mdp)), beta=ConstantBeta(0.0))
        run_agent(mdp, agent, 2_000, 0, INF, RandomSource(6))
        assert all(s.pulls > 0 for s in agent.stats)
        greedy = int(np.argmax([s.rho_hat for s in agent.stats]))
        assert all(agent.select_arm(t, RandomSource(t)) == greedy for t in (2_001, 10**5, 10**9))

    def test_inverse_log_schedule(self):
        beta = InverseLogBeta(2.0)
        assert beta(1) == 2.0
        assert beta(int(math.exp(4)) + 1) == pytest.approx(2.0 / math.log(int(math.exp(4)) + 1))


class TestPThompson:
    def test_update_from_fresh(self):
        belief = pthompson_update(BetaBelief(), episode(7, 3.2))
        assert belief.successes == pytest.approx(3.2)
        assert belief.failures == pytest.approx(3.8)

    def test_zero_reward_episode(self):
        belief = pthompson_update(BetaBelief(2.0, 1.0), episode(5, 0.0))
        assert (belief.successes, belief.failures) == (2.0, 6.0)

    def test_reward_above_duration_is_rejected(self):
        with pytest.raises(ContractViolation):
            pthompson_update(BetaBelief(), episode(2, 3.0))

    def test_fresh_beliefs_are_uniform(self):
        rng = RandomSource(0)
        counts = Counter(pthompson_select([BetaBelief()] * 4, rng) for _ in range(100_000))
        for arm in range(4):
            assert counts[arm] / 100_000 == pytest.approx(0.25, abs=0.01)

    def test_concentrated_beliefs(self):
        rng = RandomSource(1)
        beliefs = [BetaBelief(1e6, 0.0), BetaBelief(0.0, 1e6)]
        picks = [pthompson_select(beliefs, rng) for _ in range(10_000)]
        assert picks.count(0) / len(picks) >= 0.999

    def test_single_arm(self):
        rng = RandomSource(2)
        assert all(pthompson_select([BetaBelief(3.0, 4.0)], rng) == 0 for _ in range(20))


class TestRandomBaseline:
    def test_single_arm(self):
        rng = RandomSource(0)
        assert {random_baseline(1, rng) for _ in range(50)} == {0}

    def test_uniform_frequencies(self):
        rng = RandomSource(3)
        counts = Counter(random_baseline(4, rng) for _ in range(100_000))
        for arm in range(4):
            assert counts[arm] / 100_000 == pytest.approx(0.25, abs=0.01)

    def test_long_run_reward_is_episode_weighted_mixture(self, coins, coin_family):
        # coin p: episode length 1 + p, episode reward p
        expected = (0.9 + 0.1) / ((1 + 0.9) + (1 + 0.1))
        trace = run_agent(coins, RandomAgent(coin_family), 100_000, 0, INF, RandomSource(4))
        assert trace.cumulative_reward / 100_000 == pytest.approx(expected, abs=0.01)


class TestEmpiricalModel:
    def test_single_observation(self):
        model = extended_observe(EmpiricalModel.empty(2, 1), 0, 0, 1, 0.4)
        assert model.transition_counts[0, 0, 1] == 1
        assert model.reward_estimate()[0, 0, 1] == pytest.approx(0.4)

    def test_mean_of_two_rewards(self):
        model = EmpiricalModel.empty(2, 1)
        extended_observe(model, 0, 0, 1, 0.4)
        extended_observe(model, 0, 0, 1, 0.6)
        assert model.reward_estimate()[0, 0, 1] == pytest.approx(0.5)
        np.testing.assert_array_equal(model.reward_counts, model.transition_counts)

    def test_unseen_triples_are_optimistic(self):
        assert EmpiricalModel.empty(2, 2).reward_estimate()[1, 1, 0] == 1.0

    def test_estimates_mark_unvisited_pairs(self):
        model = extended_observe(EmpiricalModel.empty(2, 2), 0, 1, 1, 0.25)
        p_hat, r_hat = model.estimates()
        np.testing.assert_array_equal(p_hat[0, 1], [0.0, 1.0])
        assert np.isnan(p_hat[1, 0]).all()
        assert r_hat[0, 1, 1] == 0.25

    def test_frequencies_match_true_row(self):
        mdp = dyadic_mdp(6)
        rng = RandomSource(8)
        model = EmpiricalModel.empty(mdp.num_states, mdp.num_actions)
        n = 100_000
        for _ in range(n):
            s_next, reward = step(mdp, 1, 0, rng)
            extended_observe(model, 1, 0, s_next, reward)
        assert model.visits()[1, 0] == n
        true_row = mdp.transition[1, 0]
        frequencies = model.transition_counts[1, 0] / n
        standard_errors = np.sqrt(true_row * (1 - true_row) / n)
        assert np.all(np.abs(frequencies - true_row) <= 4 * standard_errors + 1e-12)


class TestBookkeeping:
    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("algorithm", ["pucb", "pthompson"])
    def test_conservation(self, seed, algorithm):
        mdp = dyadic_mdp(100 + seed)
        family = list(enumerate_policies(mdp))
        agent = PUCBAgent(family) if algorithm == "pucb" else PThompsonAgent(family)
        trace = run_agent(mdp, agent, 1_000, 0, INF, RandomSource(seed))
        completed_reward = sum(e.reward_sum for e in trace.episodes)
        completed_rounds = sum(e.duration for e in trace.episodes)
        if algorithm == "pucb":
            assert sum(s.reward_total for s in agent.stats) == completed_reward
            assert sum(s.rounds_total for s in agent.stats) == completed_rounds
            assert sum(s.pulls for s in agent.stats) == len(trace.episodes)
            assert all(0.0 <= s.rho_hat <= 1.0 for s in agent.stats)
        else:
            assert sum(b.successes + b.failures for b in agent.beliefs) == completed_rounds
            assert sum(b.successes for b in agent.beliefs) == completed_reward
        assert trace.cumulative_reward == completed_reward + trace.partial_reward
        assert completed_rounds + trace.partial_steps == 1_000


class TestConsistency:
    @pytest.mark.parametrize("algorithm", ["pucb", "pthompson"])
    def test_suboptimal_arm_is_rarely_played(self, coins, coin_family, algorithm):
        fractions = []
        for seed in range(20):
            agent = PUCBAgent(coin_family) if algorithm == "pucb" else PThompsonAgent(coin_family)
            trace = run_agent(coins, agent, 25_000, 0, INF, RandomSource(seed))
            window = trace.episodes[1_000:10_000]
            assert len(window) == 9_000
            fractions.append(sum(e.policy_index != 0 for e in window) / len(window))
        assert np.mean(fractions) <= 0.05


class TestFixedAgent:
    def test_plays_one_arm(self, coins, coin_family):
        trace = run_agent(coins, FixedPolicyAgent(coin_family, 1), 500, 0, INF, RandomSource(0))
        assert {e.policy_index for e in trace.episodes} == {1}

    def test_arm_out_of_range(self, coin_family):
        with pytest.raises(ContractViolation):
            FixedPolicyAgent(coin_family, 2)


def concentrated_model(mdp, weight):
    counts = np.rint(np.nan_to_num(mdp.transition) * weight).astype(np.int64)
    return EmpiricalModel(counts, counts * mdp.reward)


class TestPSRL:
    def test_samples_respect_support(self):
        state = PsrlState.initial(coin_mdp().actions)
        sampled = sample_transitions(state, RandomSource(0))
        np.testing.assert_allclose(sampled[0, 0].sum(), 1.0)
        np.testing.assert_allclose(sampled[1, 0].sum(), 1.0)
        np.testing.assert_array_equal(sampled[1, 1], [0.0, 0.0])

    def test_support_without_successor_is_rejected(self):
        support = np.ones((2, 2, 2), dtype=bool)
        support[0, 1] = False
        with pytest.raises(ContractViolation):
            PsrlState.initial(coin_mdp().actions, support=support)

    def test_prior_only_posterior_gives_valid_policy(self):
        mdp = dyadic_mdp(12, num_states=3)
        state = PsrlState.initial(mdp.actions)
        check_policy(mdp, psrl_episode(state, RandomSource(0)))

    @pytest.mark.parametrize("planner", ["rvi", "policy_iteration"])
    def test_concentrated_posterior_recovers_optimal_policy(self, planner):
        mdp = coin_mdp()
        state = PsrlState.initial(mdp.actions, model=concentrated_model(mdp, 1e6), planner=planner)
        rng = RandomSource(1)
        for _ in range(20):
            assert psrl_episode(state, rng) == DeterministicPolicy((0, 0))

    def test_symmetric_posterior_picks_each_action_half_the_time(self):
        mdp = coin_mdp(0.5, 0.5)
        model = EmpiricalModel.empty(2, 2)
        for action in (0, 1):
            model.transition_counts[0, action] = [5, 5]
            model.reward_sums[0, action, 1] = 5.0
        model.transition_counts[1, 0, 0] = 10
        state = PsrlState.initial(mdp.actions, model=model)
        rng = RandomSource(2)
        picks = [psrl_episode(state, rng).action_of(0) for _ in range(1_000)]
        assert picks.count(0) / len(picks) == pytest.approx(0.5, abs=0.05)

    def test_fixed_length_episodes_with_reset(self, coins):
        agent = PsrlAgent(PsrlState.initial(coins.actions))
        trace = run_agent(coins, agent, 200, 0, INF, RandomSource(3))
        assert trace.teleports
        assert agent.state.episode_length == 4
        assert all(e.duration == 4 and e.end_reason is EndReason.HIT_TAU for e in trace.episodes)
        assert agent.state.model.transition_counts.sum() == 200

    def test_concentrations_are_prior_plus_counts(self, coins):
        agent = PsrlAgent(PsrlState.initial(coins.actions))
        prior = agent.state.prior.copy()
        run_agent(coins, agent, 300, 0, INF, RandomSource(7))
        counts = agent.state.model.transition_counts
        np.testing.assert_array_equal(agent.state.prior, prior)
        np.testing.assert_array_equal(agent.state.concentrations(), prior + counts)
        assert counts.sum() == 300
        assert counts[prior == 0].sum() == 0

    def test_tau_caps_episode_length(self, coins):
        agent = PsrlAgent(PsrlState.initial(coins.actions, episode_length=10))
        trace = run_agent(coins, agent, 100, 0, 3, RandomSource(4))
        assert all(e.duration == 3 for e in trace.episodes)


class TestWarmPSRL:
    def test_phases_add_up(self, coins, coin_family):
        trace = warm_psrl(
            coins, coin_family, 400, 0, INF, 100, RandomSource(0), checkpoints=[50, 100, 200, 400]
        )
        assert trace.total_steps == 400
        assert trace.checkpoints == (50, 100, 200, 400)
        assert list(trace.checkpoint_rewards) == sorted(trace.checkpoint_rewards)
        assert trace.checkpoint_rewards[-1] == pytest.approx(trace.cumulative_reward)
        assert trace.cumulative_reward == pytest.approx(
            sum(e.reward_sum for e in trace.episodes) + trace.partial_reward
        )
        assert trace.teleports

    def test_late_switch_leaves_one_psrl_round(self, coins, coin_family):
        trace = warm_psrl(coins, coin_family, 300, 0, INF, 299, RandomSource(1), inner="pucb")
        assert trace.total_steps == 300

    @pytest.mark.parametrize("t_switch", [0, 300, 400])
    def test_switch_must_lie_inside_horizon(self, coins, coin_family, t_switch):
        with pytest.raises(ContractViolation):
            warm_psrl(coins, coin_family, 300, 0, INF, t_switch, RandomSource(0))

    def test_warm_posterior_is_concentrated(self):
        mdp = dyadic_mdp(13, num_states=3)
        state = PsrlState.initial(mdp.actions, model=concentrated_model(mdp, 1e6))
        rng = RandomSource(5)
        close = 0
        for _ in range(100):
            sampled = sample_transitions(state, rng)
            close += np.abs(sampled - mdp.transition).max() <= 0.01
        assert close >= 95

    def test_switch_hands_phase_one_counts_to_psrl(self, monkeypatch):
        mdp = dyadic_mdp(13, num_states=3)
        family = list(enumerate_policies(mdp))
        handed_over = []

        def recording_agent(state):
            handed_over.append(copy.deepcopy(state))
            return PsrlAgent(state)

        monkeypatch.setattr(sys.modules["app.structrl.agents.warm_psrl"], "PsrlAgent", recording_agent)
        t_switch = 60_000
        trace = warm_psrl(mdp, family, t_switch + 50, 0, INF, t_switch, RandomSource(8))
        assert trace.total_steps == t_switch + 50

        (state,) = handed_over
        prior = PsrlState.initial(mdp.actions).prior
        assert state.model.transition_counts.sum() == t_switch
        np.testing.assert_array_equal(state.concentrations(), prior + state.model.transition_counts)

        visits = state.model.transition_counts.sum(axis=2)
        well_visited = visits >= 5_000
        assert well_visited.any()
        rng = RandomSource(9)
        for _ in range(20):
            sampled = sample_transitions(state, rng)
            assert np.abs(sampled - mdp.transition)[well_visited].max() <= 0.05
