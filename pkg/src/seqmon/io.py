"""Dataset ingestion and report serialisation.

Input formats
-------------
``stride_long_csv``
    header ``stride_id,t_index,value``; one row per grid sample, strides in
    contiguous blocks, ``t_index`` strictly increasing within a stride.
``scalar_csv``
    header ``index,value``; one scalar feature per row.
``ndjson``
    one JSON object per line, either ``{"value": x}`` or
    ``{"stride_id": i, "values": [...]}``.

Reports are JSON with a sibling ``<stem>_trajectory.csv`` holding
``t,M_t,Gamma_t``.  Floats are written with ``repr`` so values round-trip
exactly; output never depends on the locale.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import DataError
from .pipeline import StrideCurve

__all__ = [
    "FORMATS",
    "read_strides_csv",
    "read_scalar_csv",
    "read_ndjson",
    "ingest",
    "write_strides_csv",
    "write_scalar_csv",
    "RunReport",
    "emit_report",
    "read_report",
    "trajectory_csv_path",
]

FORMATS = ("stride_long_csv", "scalar_csv", "ndjson")


def _open_rows(path, expected):
    handle = open(path, newline="", encoding="utf-8")
    reader = csv.reader(handle)
    try:
        header = next(reader)
    except StopIteration:
        handle.close()
        raise DataError(f"{path}: empty file", position="line 1") from None
    header = [h.strip() for h in header]
    missing = [col for col in expected if col not in header]
    if missing:
        handle.close()
        raise DataError(f"{path}: missing columns {missing} (header {header})", position="line 1")
    return handle, reader, [header.index(col) for col in expected]


def _parse_float(text, path, line):
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"{path}: cannot parse {text!r} as a number", position=f"line {line}") from None
    if not math.isfinite(value):
        raise DataError(f"{path}: non-finite value {text!r}", position=f"line {line}")
    return value


def _parse_int(text, path, line):
    try:
        return int(text)
    except ValueError:
        raise DataError(f"{path}: cannot parse {text!r} as an integer", position=f"line {line}") from None


def read_strides_csv(path):
    """Read a long-format stride file into :class:`StrideCurve` objects in file order."""
    handle, reader, (i_id, i_t, i_val) = _open_rows(path, ("stride_id", "t_index", "value"))
    strides, seen = [], set()
    current_id, last_t, values = None, None, []
    with handle:
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            sid = _parse_int(row[i_id], path, line)
            t_index = _parse_int(row[i_t], path, line)
            value = _parse_float(row[i_val], path, line)
            if sid != current_id:
                if current_id is not None:
                    strides.append(StrideCurve(current_id, np.array(values)))
                if sid in seen:
                    raise DataError(f"{path}: stride {sid} is not contiguous", position=f"line {line}")
                seen.add(sid)
                current_id, last_t, values = sid, None, []
            if last_t is not None and t_index <= last_t:
                raise DataError(
                    f"{path}: t_index {t_index} not increasing within stride {sid}", position=f"line {line}"
                )
            last_t = t_index
            values.append(value)
    if current_id is not None:
        strides.append(StrideCurve(current_id, np.array(values)))
    return strides


def read_scalar_csv(path):
    """Read an ``index,value`` file into a float array ordered as in the file."""
    handle, reader, (_, i_val) = _open_rows(path, ("index", "value"))
    values = []
    with handle:
        for line, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            values.append(_parse_float(row[i_val], path, line))
    return np.array(values)


def read_ndjson(path):
    """Scalars (``{"value": x}``) as an array, or strides (``{"stride_id", "values"}``) as curves."""
    scalars, strides = [], []
    with open(path, encoding="utf-8") as handle:
        for line, text in enumerate(handle, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}: invalid JSON ({exc.msg})", position=f"line {line}") from None
            if "values" in record:
                vals = [_parse_float(v, path, line) for v in record["values"]]
                strides.append(StrideCurve(int(record.get("stride_id", len(strides))), np.array(vals)))
            elif "value" in record:
                scalars.append(_parse_float(record["value"], path, line))
            else:
                raise DataError(f"{path}: record needs 'value' or 'values'", position=f"line {line}")
    if scalars and strides:
        raise DataError(f"{path}: mixes scalar and stride records")
    return strides if strides else np.array(scalars)


def ingest(path, fmt=None):
    """Read ``path`` in ``fmt`` (guessed from the extension and header when omitted)."""
    path = Path(path)
    if fmt is None:
        if path.suffix in (".ndjson", ".jsonl"):
            fmt = "ndjson"
        else:
            with open(path, encoding="utf-8") as handle:
                header = handle.readline()
            fmt = "stride_long_csv" if "stride_id" in header else "scalar_csv"
    readers = {"stride_long_csv": read_strides_csv, "scalar_csv": read_scalar_csv, "ndjson": read_ndjson}
    if fmt not in readers:
        raise DataError(f"unknown input format {fmt!r}; choose from {FORMATS}")
    return readers[fmt](path)


def write_strides_csv(strides, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["stride_id", "t_index", "value"])
        for stride in strides:
            for i, v in enumerate(stride.values):
                writer.writerow([stride.stride_id, i, repr(float(v))])


def write_scalar_csv(values, path):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["index", "value"])
        for i, v in enumerate(values):
            writer.writerow([i, repr(float(v))])


@dataclass
class RunReport:
    """Outcome of one monitoring run plus everything needed to repeat it."""

    config: dict
    detection_time: int | None
    m_at_detection: float | None
    bound_at_detection: float | None
    trajectory: list
    phase_marks: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.trajectory = [
            (int(t), float(m), None if g is None or math.isinf(g) else float(g)) for t, m, g in self.trajectory
        ]
        times = [row[0] for row in self.trajectory]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DataError("trajectory times must be strictly increasing")
        if self.detection_time is not None:
            row = next((r for r in self.trajectory if r[0] == self.detection_time), None)
            if row is None or row[2] is None or not row[1] > row[2]:
                raise DataError(f"detection time {self.detection_time} is not a crossing in the trajectory")

    @classmethod
    def from_result(cls, result, config, schedule=None, extra=None):
        """Build from a :class:`seqmon.detector.MonitorResult`."""
        return cls(
            config=config,
            detection_time=result.detection_time,
            m_at_detection=result.m_at_detection,
            bound_at_detection=result.bound_at_detection,
            trajectory=result.trajectory(),
            phase_marks=schedule.phase_marks() if schedule is not None else {},
            extra=extra or {},
        )


def trajectory_csv_path(path):
    path = Path(path)
    return path.with_name(f"{path.stem}_trajectory.csv")


def _finite_or_none(value):
    if isinstance(value, float) and math.isinf(value):
        return None
    return value


def emit_report(report, path):
    """Write the JSON report and its trajectory CSV; returns the CSV path."""
    path = Path(path)
    csv_path = trajectory_csv_path(path)
    payload = asdict(report)
    payload["trajectory"] = [list(row) for row in report.trajectory]
    payload["phase_marks"] = {
        k: [_finite_or_none(x) for x in v] if isinstance(v, list) else _finite_or_none(v)
        for k, v in report.phase_marks.items()
    }
    payload["trajectory_csv_path"] = csv_path.name
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, allow_nan=False)
        handle.write("\n")
    with open(csv_path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t", "M_t", "Gamma_t"])
        for t, m, g in report.trajectory:
            writer.writerow([t, repr(m), "" if g is None else repr(g)])
    return csv_path


def read_report(path):
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    payload.pop("trajectory_csv_path", None)
    return RunReport(**payload)
