"""Error norms, convergence reports and comparison against reference tables."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from importlib import resources

import numpy as np

CSV_COLUMNS = ("h", "tau", "l2_error", "l2_order", "linf_error", "linf_order")


def l2_h(e, h: float) -> float:
    """Discrete norm ``sqrt(h * sum e_i^2)``."""
    e = np.asarray(e, dtype=float)
    return math.sqrt(h * float(np.dot(e, e)))


def rms(e, count: int | None = None) -> float:
    """``sqrt(sum e_i^2 / count)``, by default over the entries of ``e``."""
    e = np.asarray(e, dtype=float)
    n = e.size if count is None else count
    return math.sqrt(float(np.dot(e, e)) / n)


def linf(e) -> float:
    return float(np.max(np.abs(e))) if np.size(e) else 0.0


def observed_orders(h, err) -> list:
    """Orders between consecutive rows; ``None`` for the first row or unusable data.

    Exact halving gives ``log2(e0/e1)``, any other refinement ``log(e0/e1)/log(h0/h1)``.
    """
    out = [None]
    for (h0, e0), (h1, e1) in zip(zip(h, err), zip(h[1:], err[1:])):
        if not (e0 > 0 and e1 > 0) or any(map(math.isnan, (e0, e1))):
            out.append(None)
        elif abs(h0 / h1 - 2.0) < 1e-12:
            out.append(math.log2(e0 / e1))
        else:
            out.append(math.log(e0 / e1) / math.log(h0 / h1))
    return out


@dataclass
class ConvergenceRow:
    h: float
    tau: float
    l2_error: float
    linf_error: float
    l2_order: float | None = None
    linf_order: float | None = None
    error: str | None = None


@dataclass
class ConvergenceReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_errors(cls, h, tau, l2, linf_err, metadata=None, errors=None):
        l2o = observed_orders(h, l2)
        lio = observed_orders(h, linf_err)
        errors = errors or [None] * len(h)
        rows = [ConvergenceRow(*vals) for vals in zip(h, tau, l2, linf_err, l2o, lio, errors)]
        return cls(rows, dict(metadata or {}))

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]

    @property
    def ok(self) -> bool:
        return all(r.error is None for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "rows": [asdict(r) for r in self.rows]}


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return f"{v:.5e}"


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=True) + "\n"


def write_atomic(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and an atomic rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# reference tables

_golden_cache = None


def golden_tables() -> dict:
    global _golden_cache
    if _golden_cache is None:
        text = resources.files("tempered_wsgd").joinpath("data/golden.json").read_text(encoding="utf-8")
        _golden_cache = json.loads(text)
    return _golden_cache


def load_golden(table: str) -> dict:
    tables = golden_tables()
    key = table.lower().replace(" ", "").replace("_", "")
    if not key.startswith("table"):
        key = "table" + key
    if key not in tables:
        raise KeyError(f"no reference table {table!r}; available: {', '.join(tables)}")
    return tables[key]


def column_label(table: dict, col: dict) -> str:
    if table["command"] == "deriv-test":
        return f"alpha={col['alpha']},lambda={col['lam']}"
    return f"free_param={col['free_param']}"


@dataclass
class CellCheck:
    column: str
    row: int
    quantity: str
    expected: float
    got: float | None
    passed: bool


@dataclass
class GoldenComparison:
    table: str
    cells: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cells)

    def failures(self) -> list:
        return [c for c in self.cells if not c.passed]

    def summary(self) -> str:
        bad = self.failures()
        return f"{self.table}: {len(self.cells) - len(bad)}/{len(self.cells)} cells within tolerance"


def compare_column(report: ConvergenceReport, col: dict, label: str, rel_tol=0.05, order_tol=0.05) -> list:
    """Cell checks of one report against one reference column."""
    n = len(col["l2_error"])
    if len(report.rows) != n:
        raise ValueError(f"shape mismatch: report has {len(report.rows)} rows, reference {label} has {n}")
    cells = []
    for q in ("l2", "linf"):
        if f"{q}_error" not in col:
            continue
        for i in range(n):
            exp = col[f"{q}_error"][i]
            got = getattr(report.rows[i], f"{q}_error")
            ok = got is not None and math.isfinite(got) and abs(got - exp) <= rel_tol * abs(exp)
            cells.append(CellCheck(label, i, f"{q}_error", exp, got, bool(ok)))
            exp_o = col[f"{q}_order"][i]
            if exp_o is None:
                continue
            got_o = getattr(report.rows[i], f"{q}_order")
            ok = got_o is not None and abs(got_o - exp_o) <= order_tol
            cells.append(CellCheck(label, i, f"{q}_order", exp_o, got_o, bool(ok)))
    return cells


def compare_to_golden(
    reports, table: str, rel_tol: float = 0.05, order_tol: float = 0.05, max_rows: int | None = None
) -> GoldenComparison:
    """Compare one report per reference column, in table order.

    Errors pass within ``rel_tol`` relative, orders within ``order_tol``
    absolute.  ``max_rows`` compares only the coarsest rows of each column.
    """
    ref = load_golden(table)
    if isinstance(reports, ConvergenceReport):
        reports = [reports]
    cols = ref["columns"]
    if len(reports) != len(cols):
        raise ValueError(f"shape mismatch: {len(reports)} reports for {len(cols)} reference columns")
    cells = []
    for rep, col in zip(reports, cols):
        if max_rows is not None:
            col = {k: (v[:max_rows] if isinstance(v, list) else v) for k, v in col.items()}
        cells += compare_column(rep, col, column_label(ref, col), rel_tol, order_tol)
    return GoldenComparison(table, cells)
