"""
Exception hierarchy for the toolkit.
"""
from typing import Optional, Sequence, Tuple


class StructRLError(Exception):
    """Base class for every error raised by the toolkit."""


class ContractViolation(StructRLError):
    """An operation was called with arguments that break its precondition."""


class MultichainError(StructRLError):
    """A policy induces more than one recurrent class."""

    def __init__(self, classes: Sequence[Sequence[int]], policy_index: Optional[int] = None):
        self.classes: Tuple[Tuple[int, ...], ...] = tuple(tuple(c) for c in classes)
        self.policy_index = policy_index
        where = f" (policy {policy_index})" if policy_index is not None else ""
        super().__init__(
            f"Multichain policy{where}: {len(self.classes)} recurrent classes "
            f"{[list(c) for c in self.classes]}; the unichain assumption is violated"
        )

    def for_policy(self, policy_index: int) -> "MultichainError":
        return MultichainError(self.classes, policy_index=policy_index)


class ConvergenceError(StructRLError):
    """Relative value iteration did not reach the span tolerance."""

    def __init__(self, last_span: float, iterations: int):
        self.last_span = last_span
        self.iterations = iterations
        super().__init__(f"No convergence after {iterations} iterations (last span {last_span:.3e})")


class StepCapExceeded(StructRLError):
    """An episode ran past the hard step cap without reaching its start state."""


class ConstructionError(StructRLError):
    """An environment parameterization violates one of its constraints."""


class ConfigError(StructRLError):
    """An experiment configuration is invalid."""


class ExportError(StructRLError):
    """Writing or reading a result file failed."""

    def __init__(self, path, reason: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {reason}")
