"""
Experiment harness: runs, regret curves, result files and the command line.
"""
from .export import FORMATS, dump_json, export, load_json, results_document, write_csv
from .runner import (
    ExperimentResult,
    RegretCurve,
    RunResult,
    RunSummary,
    compute_rho_star,
    execute_run,
    run_experiment,
    summarize,
)

__all__ = [
    "ExperimentResult",
    "FORMATS",
    "RegretCurve",
    "RunResult",
    "RunSummary",
    "compute_rho_star",
    "dump_json",
    "execute_run",
    "export",
    "load_json",
    "results_document",
    "run_experiment",
    "summarize",
    "write_csv",
]
