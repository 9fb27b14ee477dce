"""CSV output of run reports."""

from __future__ import annotations

import csv
from pathlib import Path

from .engine import CurvePoint, RunReport

HEADER = ("snr_db", "label", "error_rate", "errors", "trials", "stderr", "censored")


class OutputError(OSError):
    pass


def _fmt(x: float) -> str:
    return repr(float(x))


def _rows(report: RunReport):
    for p in report.points:
        yield (_fmt(p.snr_db), p.label, _fmt(p.error_rate), str(p.errors), str(p.trials), _fmt(p.stderr), str(int(p.censored)))


def _write(path: Path, header, rows):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def emit_results(report: RunReport, path: str | Path) -> list[Path]:
    """Write ``<name>.csv`` (long format) and ``<name>_plot.csv`` (one column per label) into ``path``."""
    out = Path(path)
    long_path = out / f"{report.name}.csv"
    _write(long_path, HEADER, _rows(report))
    labels = report.labels
    snrs = sorted({p.snr_db for p in report.points})
    table = {(p.snr_db, p.label): p.error_rate for p in report.points}
    wide = (
        [_fmt(s)] + [_fmt(table[(s, lab)]) if (s, lab) in table else "" for lab in labels] for s in snrs
    )
    plot_path = out / f"{report.name}_plot.csv"
    _write(plot_path, ("snr_db", *labels), wide)
    return [long_path, plot_path]


def read_results(path: str | Path) -> RunReport:
    path = Path(path)
    try:
        with path.open(encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc}") from exc
    report = RunReport(path.stem)
    for r in rows:
        report.points.append(
            CurvePoint(
                float(r["snr_db"]),
                r["label"],
                float(r["error_rate"]),
                int(r["errors"]),
                int(r["trials"]),
                float(r["stderr"]),
                bool(int(r["censored"])),
            )
        )
    return report
