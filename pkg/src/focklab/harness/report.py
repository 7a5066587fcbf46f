"""Report rows, contracts and their CSV/JSON serialisation.

Output is a pure function of the rows: floats are written with ``repr`` and the
summary carries no timestamps, so reruns of one config are byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy


@dataclass(frozen=True)
class Contract:
    name: str
    passed: bool
    margin: float      # positive when the inequality holds
    detail: str = ""


@dataclass
class Report:
    experiment: str
    config: dict
    rows: list = field(default_factory=list)
    contracts: list = field(default_factory=list)

    def check(self, name: str, lhs: float, rhs: float, detail: str = "") -> Contract:
        """Record ``lhs <= rhs`` with margin ``rhs - lhs``."""
        margin = float(rhs) - float(lhs)
        c = Contract(name, bool(margin >= 0), margin, detail)
        self.contracts.append(c)
        return c

    def flag(self, name: str, ok: bool, margin: float = math.nan, detail: str = "") -> Contract:
        c = Contract(name, bool(ok), float(margin), detail)
        self.contracts.append(c)
        return c

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.contracts)

    @property
    def failures(self) -> list:
        return [c for c in self.contracts if not c.passed]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (complex, np.complexfloating)):
        return repr(complex(v))
    if isinstance(v, (tuple, list, np.ndarray)):
        return " ".join(_cell(x) for x in np.ravel(v))
    return str(v)


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def csv_text(rows: list) -> str:
    columns = []
    for r in rows:
        for k in r:
            if k not in columns:
                columns.append(k)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def environment() -> dict:
    from .. import __version__
    return {
        "focklab": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "machine": platform.machine(),
    }


def summary(report: Report, exit_status: int) -> dict:
    return _json_safe({
        "experiment": report.experiment,
        "passed": report.passed,
        "exit_status": exit_status,
        "rows": len(report.rows),
        "contracts": [
            {"name": c.name, "passed": c.passed, "margin": c.margin, "detail": c.detail}
            for c in report.contracts
        ],
        "config": report.config,
        "environment": environment(),
    })


def write_report(report: Report, out_dir, exit_status: int) -> tuple:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{report.experiment}.csv"
    json_path = out / f"{report.experiment}.json"
    with open(csv_path, "w", newline="") as fh:
        fh.write(csv_text(report.rows))
    json_path.write_text(json.dumps(summary(report, exit_status), indent=2, sort_keys=True) + "\n")
    return csv_path, json_path
