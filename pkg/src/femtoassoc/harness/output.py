"""Tidy-table and manifest writers for sweep results."""
from __future__ import annotations

import csv
import json
from dataclasses import fields
from pathlib import Path

from .experiment import RunRecord, SummaryRow, SweepResult

SUMMARY_COLUMNS = ("N", "algorithm", "access", "metric", "mean", "ci_low", "ci_high")


class OutputError(OSError):
    pass


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_outputs(result: SweepResult, out_dir, fmt: str = "csv") -> list[Path]:
    """Write the summary table (long format), per-run records and a manifest.

    ``csv`` produces ``summary.csv`` + ``runs.csv``; ``json`` produces a
    single ``sweep.json`` holding the full result. ``manifest.json`` is
    always written.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            path = out / "summary.csv"
            _write_csv(
                path,
                SUMMARY_COLUMNS,
                ((r.num_users, r.algorithm, r.access, r.metric, r.mean, r.ci_low, r.ci_high) for r in result.rows),
            )
            written.append(path)
            path = out / "runs.csv"
            names = [f.name for f in fields(RunRecord)]
            _write_csv(path, names, ([getattr(r, k) for k in names] for r in result.runs))
            written.append(path)
        else:
            path = out / "sweep.json"
            path.write_text(json.dumps(result.to_dict(), indent=1, sort_keys=True) + "\n")
            written.append(path)
        path = out / "manifest.json"
        path.write_text(json.dumps(result.manifest, indent=1, sort_keys=True) + "\n")
        written.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write results under {out}: {exc}") from exc
    return written


def read_json(path) -> SweepResult:
    return SweepResult.from_dict(json.loads(Path(path).read_text()))


def read_summary_csv(path) -> list[SummaryRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            num = lambda k: float(rec[k]) if rec[k] != "" else None  # noqa: E731
            rows.append(
                SummaryRow(int(rec["N"]), rec["algorithm"], rec["access"], rec["metric"], num("mean"), num("ci_low"), num("ci_high"))
            )
    return rows
