"""
Experiment orchestration: one run per (agent, seed), regret against the
structured optimum, and aggregation over Monte Carlo repetitions.
"""
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import TypeAdapter

from .. import __version__
from ..agents.registry import execute_agent_block
from ..config import EnvironmentBlock, ExperimentConfig, tau_value
from ..constants import CSV_COLUMNS, ENVIRONMENT_CACHE_SIZE, GENERATOR_ID, SUMMARY_COLUMNS
from ..core.mdp import DeterministicPolicy, TabularMDP
from ..core.planning import average_reward_optimal, best_structured_policy
from ..environments.base import EnvironmentInstance
from ..environments.registry import build_environment
from ..errors import ConfigError
from ..simulator import RandomSource, RngStream

logger = logging.getLogger(__name__)

RHO_STAR_MODES = ("structured", "full")


@dataclass(frozen=True)
class RegretCurve:
    """Checkpointed cumulative reward and regret rho_star * t - CR_t of one (agent, seed) run."""

    agent: str
    seed: int
    rho_star: float
    checkpoints: Tuple[int, ...]
    cum_rewards: Tuple[float, ...]

    @property
    def regrets(self) -> Tuple[float, ...]:
        return tuple(self.rho_star * t - cr for t, cr in zip(self.checkpoints, self.cum_rewards))

    def records(self) -> List[Dict[str, Any]]:
        return [
            {"agent": self.agent, "seed": self.seed, "checkpoint": t, "cum_reward": cr, "regret": regret}
            for t, cr, regret in zip(self.checkpoints, self.cum_rewards, self.regrets)
        ]


@dataclass(frozen=True)
class RunResult:
    agent: str
    agent_index: int
    algorithm: str
    seed: int
    success: bool
    checkpoints: Tuple[int, ...] = ()
    cum_rewards: Tuple[float, ...] = ()
    cumulative_reward: float = 0.0
    episodes: int = 0
    rng_draws: int = 0
    teleports: bool = False
    wall_clock: float = 0.0
    error: Optional[str] = None
    error_type: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        record = {
            "agent": self.agent,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "success": self.success,
            "cumulative_reward": self.cumulative_reward,
            "episodes": self.episodes,
            "rng_draws": self.rng_draws,
            "teleports": self.teleports,
        }
        if not self.success:
            record["error"] = self.error
            record["error_type"] = self.error_type
        return record


@dataclass
class RunSummary:
    """Mean and (population) standard deviation of regret per (agent, checkpoint)."""

    table: pd.DataFrame
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rho_star: float
    runs: List[RunResult]
    curves: List[RegretCurve]
    summary: RunSummary
    elapsed: float = 0.0

    @property
    def failed_runs(self) -> List[RunResult]:
        return [run for run in self.runs if not run.success]

    def regret_frame(self) -> pd.DataFrame:
        records = [record for curve in self.curves for record in curve.records()]
        return pd.DataFrame.from_records(records, columns=CSV_COLUMNS)

    def timing(self) -> Dict[str, Any]:
        """Wall-clock measurements; kept apart from the reproducible results."""
        return {
            "elapsed": self.elapsed,
            "wall_clock_ratio": _wall_clock_ratios(self.runs),
            "runs": [{"agent": run.agent, "seed": run.seed, "wall_clock": run.wall_clock} for run in self.runs],
        }


def compute_rho_star(mdp: TabularMDP, family: Sequence[DeterministicPolicy], mode: str = "structured") -> float:
    """Optimal gain over the structured family, or over every policy of the MDP."""
    if mode == "structured":
        index, gain = best_structured_policy(mdp, family)
        logger.info(f"rho* (structured) = {gain:.12f}, attained by policy {index}")
        return gain
    if mode == "full":
        result = average_reward_optimal(mdp)
        logger.info(f"rho* (full) = {result.gain:.12f} after {result.iterations} iterations")
        return result.gain
    raise ConfigError(f"rho_star mode must be one of {RHO_STAR_MODES}, got {mode!r}")


_ENVIRONMENT_BLOCK = TypeAdapter(EnvironmentBlock)


@lru_cache(maxsize=ENVIRONMENT_CACHE_SIZE)
def _environment_for(block_json: str) -> EnvironmentInstance:
    return build_environment(_ENVIRONMENT_BLOCK.validate_json(block_json))


def _environment(config: ExperimentConfig) -> EnvironmentInstance:
    """Per-process cache keyed on the environment block alone."""
    block = config.environment.model_dump(mode="json", by_alias=True)
    return _environment_for(json.dumps(block, sort_keys=True))


def run_stream(seed: int, agent_index: int) -> RngStream:
    """Stream of one run: SeedSequence(seed, spawn_key=(agent_index,)), so agents never share draws."""
    return RngStream(seed, spawn_key=(agent_index,))


def execute_run(config: ExperimentConfig, agent_index: int, seed_index: int) -> RunResult:
    """One (agent, seed) run; failures are returned as records, never raised."""
    block = config.agents[agent_index]
    seed = config.seed_base + seed_index
    started = time.perf_counter()
    try:
        env = _environment(config)
        rng = RandomSource(run_stream(seed, agent_index))
        trace = execute_agent_block(
            block,
            env,
            config.horizon,
            tau_value(config.tau),
            rng,
            checkpoints=config.checkpoint_schedule(),
            s_start=config.s_start,
        )
    except Exception as e:
        logger.error(f"Run {block.label} seed {seed} failed: {type(e).__name__}: {e}")
        return RunResult(
            agent=block.label,
            agent_index=agent_index,
            algorithm=block.algorithm,
            seed=seed,
            success=False,
            wall_clock=time.perf_counter() - started,
            error=str(e),
            error_type=type(e).__name__,
        )
    elapsed = time.perf_counter() - started
    logger.info(
        f"Run {block.label} seed {seed}: CR={trace.cumulative_reward:.3f} over {config.horizon} rounds "
        f"in {elapsed:.2f}s ({trace.rng_draws} random numbers)"
    )
    return RunResult(
        agent=block.label,
        agent_index=agent_index,
        algorithm=block.algorithm,
        seed=seed,
        success=True,
        checkpoints=trace.checkpoints,
        cum_rewards=tuple(trace.checkpoint_rewards),
        cumulative_reward=trace.cumulative_reward,
        episodes=len(trace.episodes),
        rng_draws=trace.rng_draws,
        teleports=trace.teleports,
        wall_clock=elapsed,
    )


def _execute_task(task: Tuple[ExperimentConfig, int, int]) -> RunResult:
    return execute_run(*task)


def summarize(curves: Sequence[RegretCurve]) -> pd.DataFrame:
    records = [record for curve in curves for record in curve.records()]
    if not records:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    frame = pd.DataFrame.from_records(records, columns=CSV_COLUMNS)
    table = (
        frame.groupby(["agent", "checkpoint"], sort=False)["regret"]
        .agg(mean_regret="mean", std_regret=lambda r: r.std(ddof=0), num_runs="size")
        .reset_index()
    )
    return table[SUMMARY_COLUMNS]


def _wall_clock_ratios(runs: Sequence[RunResult]) -> Dict[str, float]:
    times: Dict[str, List[float]] = {}
    for run in runs:
        if run.success:
            times.setdefault(run.algorithm, []).append(run.wall_clock)
    means = {algorithm: sum(values) / len(values) for algorithm, values in times.items()}
    ratios = {}
    if means.get("psrl"):
        for algorithm in ("pthompson", "pucb"):
            if algorithm in means:
                ratios[f"{algorithm}/psrl"] = means[algorithm] / means["psrl"]
    return ratios


def run_experiment(
    config: ExperimentConfig, workers: Optional[int] = None, num_seeds: Optional[int] = None
) -> ExperimentResult:
    """Run every (agent, seed) pair and aggregate regret curves.

    Seeds are ``seed_base + seed_index``. Results are folded in (agent, seed)
    order, so the output does not depend on ``workers``.
    """
    if num_seeds is not None:
        config = config.model_copy(update={"num_seeds": num_seeds})
    env = _environment(config)
    rho_star = compute_rho_star(env.mdp, env.family, config.rho_star_mode)
    tasks = [
        (config, agent_index, seed_index)
        for agent_index in range(len(config.agents))
        for seed_index in range(config.num_seeds)
    ]
    workers = max(1, workers or 1)
    logger.info(
        f"Running {len(tasks)} runs ({len(config.agents)} agents x {config.num_seeds} seeds, "
        f"T={config.horizon}) on {workers} worker(s)"
    )
    started = time.perf_counter()
    if workers == 1:
        runs = [_execute_task(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            runs = list(executor.map(_execute_task, tasks))
    runs.sort(key=lambda run: (run.agent_index, run.seed))

    curves = [
        RegretCurve(run.agent, run.seed, rho_star, run.checkpoints, run.cum_rewards) for run in runs if run.success
    ]
    failed = [run for run in runs if not run.success]
    metadata = {
        "generator": GENERATOR_ID,
        "config_hash": config.config_hash(),
        "version": __version__,
        "environment": env.name,
        "num_states": env.mdp.num_states,
        "num_policies": len(env.family),
        "rho_star": rho_star,
        "rho_star_mode": config.rho_star_mode,
        "horizon": config.horizon,
        "tau": config.tau,
        "num_seeds": config.num_seeds,
        "seed_base": config.seed_base,
        "checkpoints": config.checkpoint_schedule(),
        "failed_runs": len(failed),
        "runs": [run.to_dict() for run in runs],
    }
    if failed:
        logger.warning(f"{len(failed)} of {len(runs)} runs failed; partial results kept")
    elapsed = time.perf_counter() - started
    logger.info(f"Experiment finished in {elapsed:.2f}s")
    return ExperimentResult(
        config=config,
        rho_star=rho_star,
        runs=runs,
        curves=curves,
        summary=RunSummary(table=summarize(curves), metadata=metadata),
        elapsed=elapsed,
    )
