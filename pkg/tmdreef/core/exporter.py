"""
Result files.

- run reports as JSON (reloadable into RunReport)
- convergence and substrate-ratio traces as CSV
- FRF curves as CSV, one dB column per floor
- comparison tables as CSV
"""
from pathlib import Path
from typing import Dict, Optional, Union
import logging

import numpy as np
import pandas as pd
from pydantic import ValidationError

from tmdreef.core.exceptions import ExportError
from tmdreef.core.frf import FrfCurves
from tmdreef.core.schemas import ComparisonRow, ComparisonTable, RunReport

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

COMPARISON_COLUMNS = ["mode", "min", "mean", "std", "n_seeds"]


def _write_csv(df: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, lineterminator="\n")
    except OSError as e:
        raise ExportError(path, str(e)) from e
    return path


def _read_csv(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ExportError(path, str(e)) from e


# ============= Tables =============
def frf_table(curves: FrfCurves) -> pd.DataFrame:
    data = {"omega_rad_s": curves.omega_grid}
    db = curves.to_db()
    for i in range(curves.n_floors):
        data[f"floor_{i + 1}_db"] = db[i]
    return pd.DataFrame(data)


def convergence_table(report: RunReport) -> pd.DataFrame:
    return pd.DataFrame({
        "iteration": np.arange(1, len(report.best_per_iteration) + 1),
        "best_fitness": report.best_per_iteration,
    })


def substrate_ratio_table(report: RunReport) -> pd.DataFrame:
    """
    Cumulative fraction of iterations each substrate produced the best larva.

    Brooded winners count in the denominator only, so a row sums to at most 1.
    """
    n = len(report.iteration_winners)
    iterations = np.arange(1, n + 1)
    data: Dict[str, np.ndarray] = {"iteration": iterations}
    for kind in report.substrates:
        wins = np.array([w == kind for w in report.iteration_winners], dtype=float)
        data[kind.value] = np.cumsum(wins) / iterations if n else wins
    return pd.DataFrame(data)


def comparison_frame(table: ComparisonTable) -> pd.DataFrame:
    return pd.DataFrame([row.model_dump() for row in table.rows], columns=COMPARISON_COLUMNS)


# ============= Writers =============
def export_frf(curves: FrfCurves, path: PathLike) -> Path:
    return _write_csv(frf_table(curves), path)


def load_frf(path: PathLike) -> FrfCurves:
    df = _read_csv(path)
    floors = [c for c in df.columns if c.startswith("floor_")]
    db = df[floors].to_numpy().T
    return FrfCurves(omega_grid=df["omega_rad_s"].to_numpy(), magnitudes=10.0 ** (db / 20.0))


def save_report(report: RunReport, path: PathLike) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    except OSError as e:
        raise ExportError(path, str(e)) from e
    return path


def load_report(path: PathLike) -> RunReport:
    path = Path(path)
    try:
        return RunReport.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ExportError(path, str(e)) from e
    except ValidationError as e:
        raise ExportError(path, f"not a run report: {e}") from None


def save_comparison(table: ComparisonTable, path: PathLike) -> Path:
    return _write_csv(comparison_frame(table), path)


def load_comparison(path: PathLike, preset: str = "") -> ComparisonTable:
    df = _read_csv(path)
    rows = [ComparisonRow(**record) for record in df.to_dict(orient="records")]
    return ComparisonTable(preset=preset, rows=rows)


def export_traces(report: RunReport, out_dir: PathLike,
                  curves: Optional[FrfCurves] = None) -> Dict[str, Path]:
    """
    Write everything needed to plot one run.

    Files: report.json, convergence.csv, substrate_ratios.csv and, when
    curves are given, frf.csv.
    """
    out_dir = Path(out_dir)
    written = {
        "report": save_report(report, out_dir / "report.json"),
        "convergence": _write_csv(convergence_table(report), out_dir / "convergence.csv"),
        "substrate_ratios": _write_csv(substrate_ratio_table(report), out_dir / "substrate_ratios.csv"),
    }
    if curves is not None:
        written["frf"] = export_frf(curves, out_dir / "frf.csv")

    logger.debug(f"💾 Traces for {report.mode} seed {report.rng_seed} written to {out_dir}")
    return written
