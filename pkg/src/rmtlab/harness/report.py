"""Experiment reports and their on-disk forms (csv, json, plot columns, manifest)."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["Report", "emit", "FORMATS", "MANIFEST_NAME", "to_json"]

FORMATS = ("csv", "json", "plot")
MANIFEST_NAME = "manifest.json"
_EXT = {"csv": "csv", "json": "json", "plot": "dat"}


def _clean(obj):
    # JSON has no NaN/inf; numpy scalars become Python numbers
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def to_json(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


@dataclass
class Report:
    """Result of one experiment.

    ``rows`` holds one dict per replicate (keyed by ``index``); ``summary``
    the reduced estimates and a list of ``checks``; ``series`` the columns
    used by the plot format.  ``wall_time`` is kept off the serialised
    report so that identical configs give identical bytes; it goes to the
    manifest instead.
    """

    metadata: dict
    rows: list
    summary: dict
    series: dict | None = None
    wall_time: float = field(default=0.0, compare=False)

    @property
    def checks(self) -> list:
        return self.summary.get("checks", [])

    @property
    def errored(self) -> bool:
        return self.summary.get("status") == "error"

    @property
    def passed(self) -> bool:
        return not self.errored and all(c["passed"] for c in self.checks)

    @property
    def exit_code(self) -> int:
        if self.errored:
            return 2
        return 0 if self.passed else 1

    def as_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "summary": self.summary,
            "rows": self.rows,
            "series": self.series,
        }

    def to_json(self) -> str:
        return to_json(self.as_dict())

    def to_csv(self) -> str:
        columns = ["index"]
        for row in self.rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", restval="")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt(v) for k, v in row.items()})
        return buf.getvalue()

    def to_plot(self) -> str:
        if not self.series:
            raise ValueError("report has no plot series (experiment errored)")
        lines = ["# " + " ".join(self.series["columns"])]
        for rec in self.series["data"]:
            lines.append(" ".join(_fmt(v) for v in rec))
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
        return {"csv": self.to_csv, "json": self.to_json, "plot": self.to_plot}[fmt]()

    def summary_lines(self) -> list[str]:
        cfg = self.metadata["config"]
        head = f"{cfg['kind']} n={cfg['n']} reps={cfg['reps']} dist={cfg['dist']} seed={cfg['seed']}"
        if self.errored:
            return [head, f"  ERROR: {self.summary.get('first_error')}"]
        out = [head]
        for c in self.checks:
            mark = "pass" if c["passed"] else "FAIL"
            out.append(f"  [{mark}] {c['name']} = {c['value']:.6g} ({c['relation']} {c['threshold']:g})")
        return out


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):
        return _fmt(v.item())
    return str(v)


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def emit(report: Report, out_dir, formats=("json",), force: bool = False, stem: str | None = None) -> list[Path]:
    """Write ``report`` in each of ``formats`` under ``out_dir`` plus a manifest.

    The manifest lists every artifact with its sha256 digest.  Existing
    artifacts (or an existing manifest) are never overwritten unless
    ``force`` is set; in that case ``FileExistsError`` is raised before
    anything is written.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"output directory {out} is not writable")
    stem = stem or report.metadata["config"]["kind"]
    payloads = {}
    for fmt in formats:
        if fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")
        payloads[out / f"{stem}.{_EXT[fmt]}"] = report.render(fmt).encode("utf-8")
    manifest_path = out / MANIFEST_NAME
    if not force:
        clash = [p for p in list(payloads) + [manifest_path] if p.exists()]
        if clash:
            raise FileExistsError(
                f"refusing to overwrite {', '.join(str(p) for p in clash)} (use --force)"
            )
    for path, data in payloads.items():
        path.write_bytes(data)
    manifest = {
        "config": report.metadata["config"],
        "version": report.metadata.get("version"),
        "wall_time_seconds": round(report.wall_time, 3),
        "passed": report.passed,
        "artifacts": [
            {"file": p.name, "bytes": len(d), "sha256": _digest(d)} for p, d in payloads.items()
        ],
    }
    manifest_path.write_text(to_json(manifest), encoding="utf-8")
    return list(payloads) + [manifest_path]
