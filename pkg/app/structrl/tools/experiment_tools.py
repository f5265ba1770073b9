"""
Experiment tools: the entry points behind the command line.
Every tool returns a JSON string with at least "success" and "message".
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from ..config import load_config
from ..core.mdp import validate
from ..environments.registry import build_environment
from ..errors import ConfigError, ConstructionError
from ..harness.export import export
from ..harness.runner import compute_rho_star, run_experiment

logger = logging.getLogger(__name__)

CONFIG_ERRORS = (ConfigError, ConstructionError)


def _failure(e: Exception, message: str) -> str:
    error_type = "config" if isinstance(e, CONFIG_ERRORS) else "runtime"
    return json.dumps({
        "success": False,
        "error": str(e),
        "error_type": error_type,
        "message": message,
    }, ensure_ascii=False)


def validate_experiment_config(config_path: str) -> str:
    """Validate a configuration file and the environment it builds.

    Args:
        config_path (str): Path to the experiment JSON document

    Returns:
        str: JSON string with the environment summary and any MDP violations
    """
    logger.info(f"Tool: validate_experiment_config called with {config_path}")
    try:
        config = load_config(config_path)
        env = build_environment(config.environment)
        violations = validate(env.mdp, start_state=env.s_start)
        return json.dumps({
            "success": not violations,
            "error": None if not violations else f"{len(violations)} MDP violations",
            "error_type": None if not violations else "config",
            "environment": env.name,
            "num_states": env.mdp.num_states,
            "num_policies": len(env.family),
            "agents": [agent.label for agent in config.agents],
            "violations": [v.to_dict() for v in violations],
            "message": f"Configuration {config_path} is valid" if not violations else "MDP validation failed",
        }, ensure_ascii=False)
    except Exception as e:
        return _failure(e, f"Error validating configuration {config_path}")


def compute_rho_star_for_config(config_path: str, mode: Optional[str] = None) -> str:
    """Compute the optimal gain the regret of a configuration is measured against.

    Args:
        config_path (str): Path to the experiment JSON document
        mode (str): "structured" or "full"; defaults to the configuration's rho_star_mode

    Returns:
        str: JSON string containing rho_star
    """
    logger.info(f"Tool: compute_rho_star_for_config called with {config_path}, mode={mode}")
    try:
        config = load_config(config_path)
        mode = mode or config.rho_star_mode
        env = build_environment(config.environment)
        rho_star = compute_rho_star(env.mdp, env.family, mode)
        return json.dumps({
            "success": True,
            "environment": env.name,
            "mode": mode,
            "rho_star": rho_star,
            "message": f"rho* = {rho_star:.12f} ({mode})",
        }, ensure_ascii=False)
    except Exception as e:
        return _failure(e, f"Error computing rho* for {config_path}")


def run_experiment_from_config(
    config_path: str,
    out_dir: Optional[str] = None,
    num_seeds: Optional[int] = None,
    workers: Optional[int] = None,
    fmt: str = "all",
) -> str:
    """Run an experiment and write its result files.

    Args:
        config_path (str): Path to the experiment JSON document
        out_dir (str): Output directory; defaults to the configuration's output field
        num_seeds (int): Overrides the configuration's num_seeds
        workers (int): Number of worker processes
        fmt (str): "csv", "json" or "all"

    Returns:
        str: JSON string with the written files and a per-agent summary at the last checkpoint
    """
    logger.info(f"Tool: run_experiment_from_config called with {config_path}")
    try:
        config = load_config(config_path)
        out_dir = out_dir or config.output
        if out_dir is None:
            raise ConfigError("no output directory: pass --out or set 'output' in the configuration")
        result = run_experiment(config, workers=workers, num_seeds=num_seeds)
        written = export(result, fmt, Path(out_dir))
    except Exception as e:
        return _failure(e, f"Error running experiment {config_path}")

    final: Dict[str, Any] = {}
    table = result.summary.table
    if not table.empty:
        last = table[table["checkpoint"] == table["checkpoint"].max()]
        final = {row.agent: row.mean_regret for row in last.itertuples(index=False)}
    failed = result.failed_runs
    return json.dumps({
        "success": not failed,
        "error": None if not failed else f"{len(failed)} of {len(result.runs)} runs failed",
        "error_type": None if not failed else "runtime",
        "rho_star": result.rho_star,
        "files": [str(p) for p in written],
        "final_mean_regret": final,
        "failed_runs": [run.to_dict() for run in failed],
        "message": f"Experiment finished: {len(result.runs) - len(failed)} of {len(result.runs)} runs succeeded",
    }, ensure_ascii=False)


__all__ = ["validate_experiment_config", "compute_rho_star_for_config", "run_experiment_from_config"]
