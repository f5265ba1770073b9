"""
Build an EnvironmentInstance from a validated environment config block.
"""
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from ..config import MachineReplacementBlock, SlowServerBlock, TabularBlock
from ..core.mdp import DeterministicPolicy, TabularMDP, check_policy, validate
from ..errors import ConfigError, ConstructionError, ContractViolation
from .base import EnvironmentInstance, ThresholdPolicyFamily
from .machine_replacement import MachineReplacementConfig, machine_replacement_instance
from .slow_server import SlowServerConfig, slow_server_instance

logger = logging.getLogger(__name__)


def _tabular_instance(block: TabularBlock) -> EnvironmentInstance:
    if isinstance(block.mdp, str):
        try:
            document = json.loads(Path(block.mdp).read_text(encoding="utf-8"))
        except OSError as e:
            raise ConfigError(f"Cannot read MDP file {block.mdp}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"MDP file {block.mdp} is not valid JSON: {e}") from e
    else:
        document = block.mdp
    try:
        mdp = TabularMDP.from_json(document)
    except (ContractViolation, KeyError, IndexError, ValueError, TypeError) as e:
        raise ConfigError(f"Malformed tabular MDP document: {e}") from e

    violations = validate(mdp, start_state=block.s_start)
    if violations:
        details = "; ".join(v.message for v in violations[:5])
        raise ConstructionError(f"Tabular MDP failed validation ({len(violations)} violations): {details}")

    policies = tuple(DeterministicPolicy.of(p) for p in block.policies)
    for index, policy in enumerate(policies):
        try:
            check_policy(mdp, policy)
        except ContractViolation as e:
            raise ConfigError(f"policy {index} is invalid: {e}") from e
    return EnvironmentInstance(
        name="tabular",
        mdp=mdp,
        family=ThresholdPolicyFamily(tuple(range(len(policies))), policies),
        s_start=block.s_start,
        support=np.nan_to_num(mdp.transition) > 0,
    )


def build_environment(block: Union[SlowServerBlock, MachineReplacementBlock, TabularBlock]) -> EnvironmentInstance:
    if isinstance(block, SlowServerBlock):
        config = SlowServerConfig(
            arrival=Fraction(block.arrival), mu1=Fraction(block.mu1), mu2=Fraction(block.mu2), buffer=block.buffer
        )
        instance = slow_server_instance(config)
    elif isinstance(block, MachineReplacementBlock):
        config = MachineReplacementConfig(
            n=block.n,
            repair_cost=block.repair_cost,
            gamma=block.gamma,
            c_min=block.c_min,
            c_max=block.c_max,
            g_max=block.g_max,
            env_seed=block.env_seed,
            costs=tuple(block.costs) if block.costs is not None else None,
        )
        instance = machine_replacement_instance(config)
    elif isinstance(block, TabularBlock):
        instance = _tabular_instance(block)
    else:
        raise ConfigError(f"unknown environment block {type(block).__name__}")
    logger.info(
        f"Environment {instance.name}: {instance.mdp.num_states} states, {len(instance.family)} structured policies"
    )
    return instance
