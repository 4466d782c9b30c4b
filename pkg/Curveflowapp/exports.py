import csv
import json
import logging
from pathlib import Path

from .functionals import GeometryReport
from .utils import format_float, json_safe

logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ["dt", "dL_residual", "dA_residual", "kappa_evolution_residual"]


def _cell(value):
    if isinstance(value, float):
        return format_float(value)
    if value is None:
        return ""
    return str(value)


def write_csv(path, header, rows):
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    logger.info("wrote %s", path)
    return path


def write_json(path, payload):
    path = Path(path)
    text = json.dumps(json_safe(payload), indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def write_reports_csv(path, reports, leading=None):
    """One row per GeometryReport; `leading` maps extra column names to per-row values."""
    leading = leading or {}
    header = list(leading) + GeometryReport.field_names()
    rows = []
    for i, report in enumerate(reports):
        values = report.to_dict()
        rows.append([leading[k][i] for k in leading] + [values[k] for k in GeometryReport.field_names()])
    return write_csv(path, header, rows)


def write_trace(out_dir, trace, summary=None, prefix="trace"):
    """Trace CSV, time-stamped snapshot curves and the JSON summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    leading = {"t": trace.times}
    for column in DIAGNOSTIC_COLUMNS:
        leading[column] = [d[column] for d in trace.diagnostics]
    paths = {"trace": write_reports_csv(out_dir / f"{prefix}.csv", trace.reports, leading)}
    snapshot_dir = out_dir / "snapshots"
    snapshot_dir.mkdir(exist_ok=True)
    for t, c in trace.snapshots:
        c.to_csv(snapshot_dir / f"curve_t{t:014.8f}.csv")
    paths["summary"] = write_json(out_dir / "summary.json", summary or trace.summary())
    return paths
