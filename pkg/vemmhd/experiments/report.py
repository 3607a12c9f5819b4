"""Error tables, observed rates and their CSV form."""
from __future__ import annotations

import csv
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

logger = logging.getLogger(__name__)

NORMS = ("e_u0", "e_u1", "e_b0", "e_b1", "e_p0")
RATE_OF = {"e_u0": "rate_u0", "e_u1": "rate_u1", "e_b0": "rate_b0", "e_b1": "rate_b1", "e_p0": "rate_p0"}
REPORT_HEADER = ["h", "e_u0", "rate_u0", "e_u1", "rate_u1", "e_b0", "rate_b0", "e_b1", "rate_b1", "e_p0", "rate_p0", "div_norm"]
PROFILE_HEADER = ["x2", "u1_numeric", "u1_analytic", "b1_numeric", "b1_analytic"]


class LevelErrors(BaseModel):
    h: float
    e_u0: float = Field(ge=0)
    e_u1: float = Field(ge=0)
    e_b0: float = Field(ge=0)
    e_b1: float = Field(ge=0)
    e_p0: float = Field(ge=0)
    div_norm: float = Field(ge=0)
    iterations: int = 0
    n_cells: int = 0


def observed_rate(e_fine: float, e_coarse: float, h_fine: float, h_coarse: float) -> Optional[float]:
    """log(e_i / e_j) / log(h_i / h_j); None when undefined."""
    if e_fine <= 0 or e_coarse <= 0 or h_fine <= 0 or h_coarse <= 0 or h_fine == h_coarse:
        return None
    return math.log(e_coarse / e_fine) / math.log(h_coarse / h_fine)


class ErrorReport(BaseModel):
    rows: List[LevelErrors] = Field(default_factory=list)

    def rates(self) -> List[Dict[str, Optional[float]]]:
        """One dict per row; the first row has no rates."""
        out: List[Dict[str, Optional[float]]] = []
        for i, row in enumerate(self.rows):
            if i == 0:
                out.append({r: None for r in RATE_OF.values()})
                continue
            prev = self.rows[i - 1]
            out.append(
                {RATE_OF[n]: observed_rate(getattr(row, n), getattr(prev, n), row.h, prev.h) for n in NORMS}
            )
        return out

    def final_rates(self) -> Dict[str, Optional[float]]:
        return self.rates()[-1] if len(self.rows) > 1 else {r: None for r in RATE_OF.values()}


def _fmt(v: Optional[float]) -> str:
    return "" if v is None else repr(float(v))


def write_report(report: ErrorReport, path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for row, rates in zip(report.rows, report.rates()):
            w.writerow(
                [
                    _fmt(row.h),
                    _fmt(row.e_u0), _fmt(rates["rate_u0"]),
                    _fmt(row.e_u1), _fmt(rates["rate_u1"]),
                    _fmt(row.e_b0), _fmt(rates["rate_b0"]),
                    _fmt(row.e_b1), _fmt(rates["rate_b1"]),
                    _fmt(row.e_p0), _fmt(rates["rate_p0"]),
                    _fmt(row.div_norm),
                ]
            )
    logger.info(f"wrote {len(report.rows)} level(s) to {path}")
    return path


def read_report(path: Union[str, Path]) -> ErrorReport:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = [
            LevelErrors(
                h=float(r["h"]),
                e_u0=float(r["e_u0"]),
                e_u1=float(r["e_u1"]),
                e_b0=float(r["e_b0"]),
                e_b1=float(r["e_b1"]),
                e_p0=float(r["e_p0"]),
                div_norm=float(r["div_norm"]),
            )
            for r in csv.DictReader(fh)
        ]
    return ErrorReport(rows=rows)


def write_profile(samples: Sequence[Sequence[float]], path: Union[str, Path]) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_HEADER)
        for s in samples:
            w.writerow([_fmt(v) for v in s])
    return path


def render_report(report: ErrorReport, title: str = "Convergence", console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=title)
    for col in ("h", "it", "|e_u|0", "rate", "|e_u|1", "rate", "|e_b|0", "rate", "|e_b|1", "rate", "|e_p|0", "rate", "|div u_h|"):
        table.add_column(col, justify="right")

    def r(v: Optional[float]) -> str:
        return "-" if v is None else f"{v:.2f}"

    for row, rates in zip(report.rows, report.rates()):
        table.add_row(
            f"{row.h:.4f}",
            str(row.iterations),
            f"{row.e_u0:.4e}", r(rates["rate_u0"]),
            f"{row.e_u1:.4e}", r(rates["rate_u1"]),
            f"{row.e_b0:.4e}", r(rates["rate_b0"]),
            f"{row.e_b1:.4e}", r(rates["rate_b1"]),
            f"{row.e_p0:.4e}", r(rates["rate_p0"]),
            f"{row.div_norm:.4e}",
        )
    console.print(table)
