"""CSV serialization of experiment reports and atomic file output."""
from __future__ import annotations

import csv
import io
import os
import tempfile

REPORT_FIELDS = ("p", "N", "r", "alpha", "method", "coverage", "type1", "type2")
TIMING_FIELDS = ("p", "N", "r", "method", "time_ms")
ROC_FIELDS = ("r", "method", "alpha", "fpr", "tpr")


def _num(v):
    return "" if v is None else repr(float(v))


def _csv_text(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    w.writerows(rows)
    return buf.getvalue()


def report_csv(report) -> str:
    """Deterministic metrics table; an undefined rate is an empty cell."""
    return _csv_text(REPORT_FIELDS, (
        (row.p, row.N, row.r, _num(row.alpha), row.method,
         _num(row.coverage), _num(row.type1), _num(row.type2))
        for row in report.rows))


def timing_csv(report) -> str:
    seen = {}
    for row in report.rows:
        seen.setdefault((row.r, row.method), row.time_ms)
    cfg = report.config
    return _csv_text(TIMING_FIELDS, (
        (cfg.p, cfg.N, r, m, f"{t:.6f}") for (r, m), t in seen.items()))


def roc_csv(report) -> str:
    rows = []
    for (r, m), pts in report.roc.items():
        rows += [(r, m, _num(q.alpha), _num(q.fpr), _num(q.tpr)) for q in pts]
    return _csv_text(ROC_FIELDS, rows)


def atomic_write(path, text: str):
    """Write ``text`` to ``path`` via a temporary file and rename."""
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
