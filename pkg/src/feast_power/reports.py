"""JSON reports and CSV tables written by the CLI."""

import json
import logging
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike

from feast_power.diagnostics import SENTINEL
from feast_power.models import RunHistory, RunReport

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
COMPARE_COLUMNS = ("feast", "feast2", "f2p")


def _write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot write {path}: {exc}"
        raise OSError(msg) from exc
    return path


def _write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    written = _write_text(
        path, frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    )
    logger.info("Wrote %d rows to %s", len(frame), path)
    return written


def report_to_json(report: RunReport) -> str:
    """Serialize in field order; floats keep their shortest round-trip repr."""
    return json.dumps(report.model_dump(mode="json"), indent=2, allow_nan=True) + "\n"


def write_report(report: RunReport, path: str | Path) -> Path:
    """Write the run report as JSON.

    Raises:
        OSError: If the file cannot be written; the message names the path.
    """
    path = Path(path)
    written = _write_text(path, report_to_json(report))
    logger.info("Wrote report to %s", path)
    return written


def read_report(path: str | Path) -> RunReport:
    """Load a report written by ``write_report``."""
    return RunReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def history_frame(history: RunHistory) -> pd.DataFrame:
    """Per-iteration table with columns iter, err, num_ay."""
    return pd.DataFrame(
        {
            "iter": np.arange(1, history.iterations + 1, dtype=np.int64),
            "err": np.asarray(history.err_hist, dtype=np.float64),
            "num_ay": np.asarray(history.num_ay_hist, dtype=np.int64),
        }
    )


def write_csv(history: RunHistory, path: str | Path) -> Path:
    """Write ``iter,err,num_ay`` with 17 significant digits; -1 entries stay -1."""
    return _write_frame(history_frame(history), path)


def compare_frame(
    histories: Mapping[str, Sequence[float]], eig_in: int | None = None
) -> pd.DataFrame:
    """Align err histories by iteration, padding shorter ones with -1.

    Args:
        histories: err_hist per driver.
        eig_in: Reference eigenvalue count inside the interval. When given it
            fills a trailing ``s`` column.
    """
    length = max((len(values) for values in histories.values()), default=0)
    frame = pd.DataFrame({"iter": np.arange(1, length + 1, dtype=np.int64)})
    for name in (*COMPARE_COLUMNS, *(k for k in histories if k not in COMPARE_COLUMNS)):
        if name not in histories:
            continue
        values = list(histories[name])
        frame[name] = np.asarray(
            values + [SENTINEL] * (length - len(values)), dtype=np.float64
        )
    if eig_in is not None:
        frame["s"] = np.full(length, eig_in, dtype=np.int64)
    return frame


def write_compare_csv(
    histories: Mapping[str, Sequence[float]],
    path: str | Path,
    eig_in: int | None = None,
) -> Path:
    """Write the ``iter,feast,feast2,f2p[,s]`` comparison table."""
    return _write_frame(compare_frame(histories, eig_in), path)


def write_scan_csv(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write a filter scan produced by ``filters.filter_scan``."""
    return _write_frame(frame, path)


def write_spectrum_csv(values: ArrayLike, path: str | Path) -> Path:
    """Write eigenvalues in the ``eigenvalue`` layout read by ``read_reference``."""
    spectrum = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    return _write_frame(pd.DataFrame({"eigenvalue": spectrum}), path)


__all__ = [
    "compare_frame",
    "history_frame",
    "read_report",
    "report_to_json",
    "write_compare_csv",
    "write_csv",
    "write_report",
    "write_scan_csv",
    "write_spectrum_csv",
]
