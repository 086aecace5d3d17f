"""Writing experiment results to disk.

``report.json`` and the CSV files are pure functions of the configuration
and seed. Wall-clock figures go to ``timing.json`` so that reruns can be
compared byte for byte.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path

from ..functionals import samples_to_csv
from ..simulator import dump_binary, to_csv
from ..stats import pairs_to_csv
from .runners import ExperimentResult

__all__ = ["SCHEMA_VERSION", "git_blob_sha1", "report_dict", "write_outputs"]

SCHEMA_VERSION = 1
_CSV_NODE_LIMIT = 4096


def git_blob_sha1(data: bytes) -> str:
    """Content hash in the form git uses for blobs."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _clean(x):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item"):
        return _clean(x.item())
    return x


def report_dict(result: ExperimentResult) -> dict:
    cfg = result.config
    text = cfg.to_text()
    return _clean({
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.experiment.value,
        "seed": cfg.seed,
        "input_hash": git_blob_sha1(text.encode("utf-8")),
        "config": text,
        "sample_counts": {k: len(v) for k, v in result.sample_sets.items()},
        "predictions": {k: p.to_dict() for k, p in result.predictions.items()},
        "ks": [{"a": a, "b": b, "statistic": r.statistic, "p_value": r.p_value, "n1": r.n1,
                "n2": r.n2} for a, b, r in result.ks],
        "moments": result.moments,
        "fits": result.fits,
        "tables": result.tables,
        "diagnostics": result.diagnostics,
    })


def write_outputs(result: ExperimentResult, out_dir) -> Path:
    """Write every output file of ``result`` into ``out_dir`` (created if needed)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if result.samples:
        with open(out / "samples.csv", "w", newline="", encoding="utf-8") as fh:
            samples_to_csv(result.samples, fh)
    if result.ks:
        with open(out / "ks.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["a", "b", "statistic", "p_value", "n1", "n2"])
            for a, b, r in result.ks:
                w.writerow([a, b, repr(r.statistic), repr(r.p_value), r.n1, r.n2])
    for name, pairs in result.qq.items():
        with open(out / f"qq_{name}.csv", "w", newline="", encoding="utf-8") as fh:
            pairs_to_csv(pairs, fh)
    for name, rows in result.tables.items():
        if rows:
            with open(out / f"{name}.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
                w.writeheader()
                for row in rows:
                    w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    for i, fld in enumerate(result.fields):
        for j, comp in enumerate(fld.components, 1):
            stem = out / f"field_{i}_{j}"
            with open(stem.with_suffix(".bin"), "wb") as fh:
                dump_binary(comp, fh)
            if comp.grid.points_per_side ** 2 <= _CSV_NODE_LIMIT:
                with open(stem.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
                    to_csv(comp, fh)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report_dict(result), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out / "timing.json", "w", encoding="utf-8") as fh:
        json.dump(_clean(result.timing), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out
