"""
Benchmark environments and their structured policy families.
"""
from .base import EnvironmentInstance, ThresholdPolicyFamily
from .machine_replacement import (
    MachineReplacementConfig,
    build_machine_replacement,
    cost_vector_generator,
    machine_replacement_instance,
    machine_replacement_policies,
    verify_machine_replacement,
)
from .registry import build_environment
from .slow_server import (
    SlowServerConfig,
    SlowServerState,
    build_slow_server,
    is_fast_server_first,
    slow_server_instance,
    slow_server_policies,
)

__all__ = [
    "EnvironmentInstance",
    "MachineReplacementConfig",
    "SlowServerConfig",
    "SlowServerState",
    "ThresholdPolicyFamily",
    "build_environment",
    "build_machine_replacement",
    "build_slow_server",
    "cost_vector_generator",
    "is_fast_server_first",
    "machine_replacement_instance",
    "machine_replacement_policies",
    "slow_server_instance",
    "slow_server_policies",
    "verify_machine_replacement",
]
