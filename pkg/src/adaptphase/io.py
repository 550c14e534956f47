"""JSON/CSV emitters shared by the CLI."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .circular_pdf import FourierPdf, write_coefficients_csv, write_density_csv
from .controller import EpisodeTrace
from .harness import SweepResult, _fmt, write_sweep_csv
from .spin_bath import NarrowingReport


def _jsonable(x):
    """Replace non-finite floats by the strings ``inf``/``-inf``/``nan``."""
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2, allow_nan=False) + "\n"


def write_json(doc, path) -> None:
    try:
        Path(path).write_text(dumps(doc))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_rows_csv(header, rows, path) -> None:
    try:
        with open(Path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([_fmt(float(v)) if not isinstance(v, (int, str)) else v for v in row])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_coherence_csv(report: NarrowingReport, path, points: int = 512) -> None:
    """Before/after free-induction envelopes on a shared time grid."""
    from .spin_bath import coherence_function

    ts = report.curve_times(points)
    before = coherence_function(report.initial, ts)
    after = coherence_function(report.final, ts)
    write_rows_csv(["t", "abs_c_before", "abs_c_after"], zip(ts, before, after), path)


def emit_outputs(obj, path, **kwargs) -> None:
    """Write ``obj`` in its interchange format, chosen by type."""
    try:
        if isinstance(obj, SweepResult):
            write_sweep_csv(obj, path)
        elif isinstance(obj, EpisodeTrace):
            write_json(obj.to_dict(), path)
        elif isinstance(obj, NarrowingReport):
            write_json(obj.to_dict(kwargs.get("points", 512)), path)
        elif isinstance(obj, FourierPdf):
            if kwargs.get("coefficients"):
                write_coefficients_csv(obj, path)
            else:
                write_density_csv(obj, path, kwargs.get("grid", 4096))
        else:
            raise TypeError(f"don't know how to emit {type(obj).__name__}")
    except OSError as exc:
        if str(path) in str(exc):
            raise
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
