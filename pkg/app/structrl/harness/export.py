"""
Result files: per-run regret CSV, summary CSV and a JSON document with the
same records plus run metadata. Identical results give byte-identical files;
wall-clock measurements go to a separate timing document.
"""
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from ..constants import FLOAT_FORMAT, SUMMARY_COLUMNS
from ..errors import ContractViolation, ExportError
from .runner import ExperimentResult

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "all")
REGRET_FILE = "regret.csv"
SUMMARY_FILE = "summary.csv"
RESULTS_FILE = "results.json"
TIMING_FILE = "timing.json"

PathLike = Union[str, Path]


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ExportError(path, f"cannot write CSV: {e}") from e
    return path


def results_document(result: ExperimentResult) -> Dict[str, Any]:
    regret = result.regret_frame()
    summary = result.summary.table.reindex(columns=SUMMARY_COLUMNS)
    return {
        "metadata": result.summary.metadata,
        "records": regret.to_dict(orient="records"),
        "summary": summary.to_dict(orient="records"),
    }


def dump_json(document: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    text = json.dumps(document, ensure_ascii=False, sort_keys=True, indent=2) + "\n"
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ExportError(path, f"cannot write JSON: {e}") from e
    return path


def load_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ExportError(path, f"cannot read JSON: {e}") from e
    except json.JSONDecodeError as e:
        raise ExportError(path, f"invalid JSON: {e}") from e


def export(result: ExperimentResult, fmt: str, out_dir: PathLike) -> List[Path]:
    """Write ``regret.csv`` and ``summary.csv`` (csv), ``results.json`` with ``timing.json`` (json) or all four."""
    if fmt not in FORMATS:
        raise ContractViolation(f"export format must be one of {FORMATS}, got {fmt!r}")
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ExportError(out_dir, f"cannot create output directory: {e}") from e

    written = []
    if fmt in ("csv", "all"):
        written.append(write_csv(result.regret_frame(), out_dir / REGRET_FILE))
        written.append(write_csv(result.summary.table.reindex(columns=SUMMARY_COLUMNS), out_dir / SUMMARY_FILE))
    if fmt in ("json", "all"):
        written.append(dump_json(results_document(result), out_dir / RESULTS_FILE))
        written.append(dump_json(result.timing(), out_dir / TIMING_FILE))
    logger.info(f"Exported {', '.join(p.name for p in written)} to {out_dir}")
    return written
