"""
Settings and experiment configuration.

Process settings come from the environment (optionally a ``.env`` file);
experiment configurations are JSON documents validated by pydantic models.
"""
import hashlib
import json
import logging
import math
import os
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .constants import (
    CHECKPOINT_MULTIPLIERS,
    MACHINE_REPLACEMENT_C_MAX,
    MACHINE_REPLACEMENT_C_MIN,
    MACHINE_REPLACEMENT_ENV_SEED,
    MACHINE_REPLACEMENT_G_MAX,
    MACHINE_REPLACEMENT_GAMMA,
    MACHINE_REPLACEMENT_REPAIR_COST,
    MACHINE_REPLACEMENT_STATES,
    BENCHMARK_HORIZON,
    BENCHMARK_NUM_SEEDS,
    BENCHMARK_T_SWITCH,
    SLOW_SERVER_BUFFER,
    SLOW_SERVER_LAMBDA,
    SLOW_SERVER_MU1,
    SLOW_SERVER_MU2,
)
from .errors import ConfigError

logger = logging.getLogger(__name__)

Tau = Union[int, Literal["inf"]]


class Settings(BaseModel):
    seed_base_override: Optional[int] = None
    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    debug: bool = False


def get_settings() -> Settings:
    load_dotenv()
    return Settings(
        seed_base_override=os.getenv("STRUCTRL_SEED_BASE") or None,
        log_level=os.getenv("STRUCTRL_LOG_LEVEL", "INFO"),
        workers=os.getenv("STRUCTRL_WORKERS", 1),
        debug=os.getenv("STRUCTRL_DEBUG", "false"),
    )


def tau_value(tau: Tau) -> float:
    return math.inf if tau == "inf" else float(tau)


def _positive_tau(value: Any) -> Any:
    if value != "inf" and (not isinstance(value, int) or value < 1):
        raise ValueError("tau must be a positive integer or 'inf'")
    return value


def _rational(value: str) -> str:
    try:
        Fraction(value)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not an exact rational: {value!r}") from e
    return value


class SlowServerBlock(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    env: Literal["slow_server"] = "slow_server"
    arrival: str = Field(default=SLOW_SERVER_LAMBDA, alias="lambda")
    mu1: str = SLOW_SERVER_MU1
    mu2: str = SLOW_SERVER_MU2
    buffer: int = Field(default=SLOW_SERVER_BUFFER, ge=1)

    @field_validator("arrival", "mu1", "mu2")
    @classmethod
    def _rates(cls, value: str) -> str:
        return _rational(value)


class MachineReplacementBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env: Literal["machine_replacement"] = "machine_replacement"
    n: int = Field(default=MACHINE_REPLACEMENT_STATES, ge=2)
    g_max: float = Field(default=MACHINE_REPLACEMENT_G_MAX, gt=0)
    repair_cost: float = Field(default=MACHINE_REPLACEMENT_REPAIR_COST, gt=0)
    gamma: float = Field(default=MACHINE_REPLACEMENT_GAMMA, gt=0)
    c_min: float = Field(default=MACHINE_REPLACEMENT_C_MIN, gt=0)
    c_max: float = Field(default=MACHINE_REPLACEMENT_C_MAX, le=1)
    env_seed: int = MACHINE_REPLACEMENT_ENV_SEED
    costs: Optional[List[float]] = None


class TabularBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    env: Literal["tabular"] = "tabular"
    mdp: Union[str, Dict[str, Any]]
    policies: List[List[int]] = Field(min_length=1)
    s_start: int = Field(default=0, ge=0)


EnvironmentBlock = Annotated[
    Union[SlowServerBlock, MachineReplacementBlock, TabularBlock],
    Field(discriminator="env"),
]


class BetaBlock(BaseModel):
    kind: Literal["constant", "inverse_log"] = "constant"
    value: float = Field(default=1.0, ge=0)


class AgentBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algorithm: Literal["pucb", "pthompson", "psrl", "warm_psrl", "random", "fixed"]
    name: Optional[str] = None
    beta: BetaBlock = BetaBlock()
    tau: Optional[Tau] = None
    t_switch: int = Field(default=BENCHMARK_T_SWITCH, ge=1)
    psrl_episode_len: Optional[int] = Field(default=None, ge=1)
    inner: Literal["pucb", "pthompson"] = "pthompson"
    planner: Literal["rvi", "policy_iteration"] = "rvi"
    arm: Optional[int] = Field(default=None, ge=0)

    @field_validator("tau")
    @classmethod
    def _tau(cls, value):
        return value if value is None else _positive_tau(value)

    @property
    def label(self) -> str:
        return self.name or self.algorithm


def default_checkpoints(horizon: int) -> List[int]:
    """Powers of ten and their 2x and 5x multiples up to ``horizon``."""
    points = set()
    power = 1
    while power <= horizon:
        points.update(m * power for m in CHECKPOINT_MULTIPLIERS if m * power <= horizon)
        power *= 10
    points.add(horizon)
    return sorted(points)


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    environment: EnvironmentBlock
    agents: List[AgentBlock] = Field(min_length=1)
    horizon: int = Field(default=BENCHMARK_HORIZON, ge=1)
    s_start: Optional[int] = Field(default=None, ge=0)
    tau: Tau = "inf"
    num_seeds: int = Field(default=BENCHMARK_NUM_SEEDS, ge=1)
    seed_base: int = 0
    checkpoints: Optional[List[int]] = None
    output: Optional[str] = None
    rho_star_mode: Literal["structured", "full"] = "structured"

    @model_validator(mode="before")
    @classmethod
    def _merge_experiment_block(cls, data: Any) -> Any:
        if isinstance(data, dict) and isinstance(data.get("experiment"), dict):
            data = {**{k: v for k, v in data.items() if k != "experiment"}, **data["experiment"]}
        return data

    @field_validator("tau")
    @classmethod
    def _tau(cls, value):
        return _positive_tau(value)

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if self.checkpoints is not None:
            if self.checkpoints != sorted(set(self.checkpoints)):
                raise ValueError("checkpoints must be sorted and distinct")
            if self.checkpoints and (self.checkpoints[0] < 1 or self.checkpoints[-1] > self.horizon):
                raise ValueError(f"checkpoints must lie in [1, {self.horizon}]")
        labels = [agent.label for agent in self.agents]
        if len(set(labels)) != len(labels):
            raise ValueError(f"agent labels must be unique, got {labels}")
        for agent in self.agents:
            if agent.algorithm == "warm_psrl" and agent.t_switch >= self.horizon:
                raise ValueError(f"t_switch {agent.t_switch} must be below the horizon {self.horizon}")
        return self

    def checkpoint_schedule(self) -> List[int]:
        return list(self.checkpoints) if self.checkpoints is not None else default_checkpoints(self.horizon)

    def config_hash(self) -> str:
        canonical = json.dumps(self.model_dump(mode="json", by_alias=True), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_config(data: Dict[str, Any], settings: Optional[Settings] = None) -> ExperimentConfig:
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid experiment configuration: {e}") from e
    settings = settings or get_settings()
    if settings.seed_base_override is not None:
        logger.info(f"seed_base overridden by STRUCTRL_SEED_BASE={settings.seed_base_override}")
        config = config.model_copy(update={"seed_base": settings.seed_base_override})
    return config


def load_config(path: Union[str, Path], settings: Optional[Settings] = None) -> ExperimentConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"Cannot read configuration {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Configuration {path} is not valid JSON: {e}") from e
    if isinstance(data, dict) and isinstance(data.get("environment"), dict):
        environment = data["environment"]
        if environment.get("env") == "tabular" and isinstance(environment.get("mdp"), str):
            mdp_path = Path(environment["mdp"])
            if not mdp_path.is_absolute():
                environment = {**environment, "mdp": str(path.parent / mdp_path)}
                data = {**data, "environment": environment}
    return parse_config(data, settings)
