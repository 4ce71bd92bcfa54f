"""Trace files: ``timestamp_ms,kind,id,value`` rows, one observation each."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

HEADER = ["timestamp_ms", "kind", "id", "value"]


class TraceFormatError(ValueError):
    def __init__(self, line: int | None, detail: str):
        super().__init__(detail if line is None else f"line {line}: {detail}")
        self.line = line


@dataclass(frozen=True)
class Observation:
    timestamp_ms: int
    kind: str  # "var" or "qoi"
    id: object  # int var id, or QOI name
    value: float


@dataclass
class Trace:
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def series(self, kind: str, key) -> tuple:
        """``(times, values)`` for one variable or QOI, in trace order."""
        ts, vs = [], []
        for r in self.rows:
            if r.kind == kind and r.id == key:
                ts.append(r.timestamp_ms)
                vs.append(r.value)
        return ts, vs

    def grouped(self) -> tuple:
        """Split into ``({var_id: (ts, vs)}, {qoi: (ts, vs)})`` in one pass."""
        out = ({}, {})
        for r in self.rows:
            bucket = out[0] if r.kind == "var" else out[1]
            ts, vs = bucket.setdefault(r.id, ([], []))
            ts.append(r.timestamp_ms)
            vs.append(r.value)
        return out


def _fmt(value: float) -> str:
    return repr(float(value))


def write_trace(trace: Trace, sink) -> None:
    """Write to a path or an open text stream."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", newline="", encoding="utf-8") as fh:
            write_trace(trace, fh)
        return
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(HEADER)
    for r in trace.rows:
        w.writerow([r.timestamp_ms, r.kind, r.id, _fmt(r.value)])


def read_trace(source) -> Trace:
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            return read_trace(fh)
    reader = csv.reader(source)
    header = next(reader, None)
    if header != HEADER:
        raise TraceFormatError(1, f"expected header {','.join(HEADER)}")
    rows = []
    last = -1
    for lineno, rec in enumerate(reader, start=2):
        if not rec:
            continue
        if len(rec) != 4:
            raise TraceFormatError(lineno, f"expected 4 fields, got {len(rec)}")
        ts_text, kind, ident, val_text = rec
        try:
            ts = int(ts_text)
            value = float(val_text)
        except ValueError:
            raise TraceFormatError(lineno, "bad timestamp or value") from None
        if ts < 0 or not math.isfinite(value):
            raise TraceFormatError(lineno, "timestamps must be >= 0 and values finite")
        if ts < last:
            raise TraceFormatError(lineno, "timestamps must be non-decreasing")
        last = ts
        if kind == "var":
            try:
                ident = int(ident)
            except ValueError:
                raise TraceFormatError(lineno, f"var id must be an integer, got {ident!r}") from None
        elif kind != "qoi" or not ident:
            raise TraceFormatError(lineno, f"unknown row kind {kind!r}")
        rows.append(Observation(ts, kind, ident, value))
    return Trace(rows)


def trace_to_text(trace: Trace) -> str:
    buf = io.StringIO()
    write_trace(trace, buf)
    return buf.getvalue()


def sidecar_paths(trace_path: str | Path) -> tuple:
    p = str(trace_path)
    return Path(p + ".registry.json"), Path(p + ".static.json")


def write_sidecars(trace_path, registry, enum_ids) -> None:
    reg_path, static_path = sidecar_paths(trace_path)
    reg_path.write_text(registry.to_json() + "\n", encoding="utf-8")
    static_path.write_text(json.dumps({"enum_ids": sorted(enum_ids)}) + "\n", encoding="utf-8")


def read_sidecars(trace_path):
    """Returns ``(names_by_id, enum_ids)``; missing files give empty results."""
    from unitlint.frontend.canon import VarRegistry

    reg_path, static_path = sidecar_paths(trace_path)
    names = {}
    enum_ids = set()
    try:
        if reg_path.exists():
            reg = VarRegistry.from_json(reg_path.read_text(encoding="utf-8"))
            names = dict(enumerate(reg.names))
        if static_path.exists():
            enum_ids = set(json.loads(static_path.read_text(encoding="utf-8")).get("enum_ids", []))
    except (ValueError, TypeError, AttributeError) as exc:
        raise TraceFormatError(None, f"bad sidecar next to {trace_path}: {exc}") from None
    return names, enum_ids
