"""File formats: curve-set CSV, two-group CSV, report CSV/JSON, run manifests.

One fixed dialect everywhere: comma separator, '.' decimal point, header
row required, UTF-8, LF line endings. P-values are serialized both as
shortest-repr decimals (for humans) and as "k/M" strings (exact); parsing
trusts the exact form. Writers are deterministic, so identical runs emit
byte-identical files; the run manifest carries the only volatile field
(the timestamp) and lives in its own file.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .adjust import PvalueReport
from .curves import (
    CurveSet,
    Direction,
    Grid,
    TiePolicy,
    TwoGroupDataset,
    validate_curveset,
)
from .errors import InputValidationError

REPORT_FAMILIES = ("raw", "single_step", "step_down", "erl")


def _num(x: float) -> str:
    return repr(float(x))


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputValidationError(f"{where}: not a number: {text!r}") from None


def _read_rows(path) -> list[list[str]]:
    path = Path(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise InputValidationError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputValidationError(f"{path}: file is empty")
    return rows


# ---------------------------------------------------------------- curve sets

def read_curves_csv(path, tie_policy=TiePolicy.STRICT) -> CurveSet:
    """First row = grid points; each later row = one curve, observed first."""
    rows = _read_rows(path)
    if len(rows) < 3:
        raise InputValidationError(
            f"{path}: need a grid row plus at least 2 curve rows, got {len(rows)} rows"
        )
    grid = Grid([_parse_float(v, f"{path} header") for v in rows[0]])
    width = len(rows[0])
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise InputValidationError(
                f"{path} row {lineno}: expected {width} fields, got {len(row)}"
            )
        values.append([_parse_float(v, f"{path} row {lineno}") for v in row])
    return validate_curveset(np.array(values), grid, tie_policy)


def write_curves_csv(path, curves: CurveSet) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(_num(g) for g in curves.grid.points)
        for row in curves.values:
            w.writerow(_num(v) for v in row)


# ------------------------------------------------------------ two-group data

LONG_HEADER = ["subject", "label", "s", "value"]


def read_twogroup_csv(path) -> TwoGroupDataset:
    """Wide format: header 'label,<grid...>', one row per subject.

    Long format: header 'subject,label,s,value'; every subject must cover
    the same grid.
    """
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if header == LONG_HEADER:
        return _twogroup_from_long(path, rows[1:])
    if header[0].lower() != "label":
        raise InputValidationError(
            f"{path}: header must start with 'label' (wide) or be "
            f"'subject,label,s,value' (long); got {header[:4]}"
        )
    grid = Grid([_parse_float(v, f"{path} header") for v in header[1:]])
    labels, responses = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputValidationError(
                f"{path} row {lineno}: expected {len(header)} fields, got {len(row)}"
            )
        labels.append(int(_parse_float(row[0], f"{path} row {lineno} label")))
        responses.append([_parse_float(v, f"{path} row {lineno}") for v in row[1:]])
    return TwoGroupDataset(grid, np.array(responses), np.array(labels))


def _twogroup_from_long(path, rows) -> TwoGroupDataset:
    per_subject: dict[str, dict] = {}
    for lineno, row in enumerate(rows, start=2):
        if len(row) != 4:
            raise InputValidationError(
                f"{path} row {lineno}: long format needs 4 fields, got {len(row)}"
            )
        subj, label, s, value = row
        entry = per_subject.setdefault(subj, {"label": label, "points": {}})
        if entry["label"] != label:
            raise InputValidationError(
                f"{path} row {lineno}: subject {subj!r} has conflicting labels"
            )
        entry["points"][_parse_float(s, f"{path} row {lineno}")] = _parse_float(
            value, f"{path} row {lineno}"
        )
    if not per_subject:
        raise InputValidationError(f"{path}: no data rows")
    grids = {tuple(sorted(e["points"])) for e in per_subject.values()}
    if len(grids) != 1:
        raise InputValidationError(f"{path}: subjects do not share a common grid")
    grid_pts = sorted(next(iter(grids)))
    labels, responses = [], []
    for subj in per_subject:  # insertion order keeps the file order
        e = per_subject[subj]
        labels.append(int(float(e["label"])))
        responses.append([e["points"][g] for g in grid_pts])
    return TwoGroupDataset(Grid(grid_pts), np.array(responses), np.array(labels))


# ------------------------------------------------------------------- reports

def report_csv_text(report: PvalueReport) -> str:
    header = ["s", *REPORT_FAMILIES, *[f"{f}_frac" for f in REPORT_FAMILIES]]
    lines = [",".join(header)]
    m = report.n_curves
    ks = {f: getattr(report, f"{f}_k") for f in REPORT_FAMILIES}
    for i, s in enumerate(report.grid.points):
        decs = [_num(ks[f][i] / m) for f in REPORT_FAMILIES]
        fracs = [f"{int(ks[f][i])}/{m}" for f in REPORT_FAMILIES]
        lines.append(",".join([_num(s), *decs, *fracs]))
    return "\n".join(lines) + "\n"


def write_report_csv(path, report: PvalueReport) -> None:
    Path(path).write_text(report_csv_text(report), encoding="utf-8")


def read_report_csv(path) -> PvalueReport:
    """Rebuild a report from its CSV; the exact k/M columns are authoritative.

    Direction and tie policy are not part of the CSV; they come back as the
    defaults and should be taken from the JSON report when needed.
    """
    rows = _read_rows(path)
    expect = ["s", *REPORT_FAMILIES, *[f"{f}_frac" for f in REPORT_FAMILIES]]
    if rows[0] != expect:
        raise InputValidationError(f"{path}: unexpected report header {rows[0]}")
    grid_pts, ks = [], {f: [] for f in REPORT_FAMILIES}
    m = None
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(expect):
            raise InputValidationError(
                f"{path} row {lineno}: expected {len(expect)} fields"
            )
        grid_pts.append(_parse_float(row[0], f"{path} row {lineno}"))
        for f, cell in zip(REPORT_FAMILIES, row[1 + len(REPORT_FAMILIES):]):
            num, _, den = cell.partition("/")
            if not den:
                raise InputValidationError(
                    f"{path} row {lineno}: malformed fraction {cell!r}"
                )
            k, d = int(num), int(den)
            if m is None:
                m = d
            elif d != m:
                raise InputValidationError(
                    f"{path} row {lineno}: inconsistent denominator {d} != {m}"
                )
            ks[f].append(k)
    # globals reconstructed from the pointwise minima; JSON carries them directly
    return PvalueReport(
        grid=Grid(grid_pts),
        n_curves=m,
        direction=Direction.TWO_SIDED,
        tie_policy=TiePolicy.STRICT,
        raw_k=np.array(ks["raw"]),
        single_step_k=np.array(ks["single_step"]),
        step_down_k=np.array(ks["step_down"]),
        erl_k=np.array(ks["erl"]),
        global_minrank_k=min(ks["single_step"]),
        global_erl_k=min(ks["erl"]),
    )


def report_json_dict(report: PvalueReport, manifest_core: dict | None = None) -> dict:
    m = report.n_curves
    body = {
        "n_curves": m,
        "direction": report.direction.value,
        "tie_policy": report.tie_policy.value,
        "grid": [float(s) for s in report.grid.points],
        "pointwise": {
            f: {
                "fraction": [f"{int(k)}/{m}" for k in getattr(report, f"{f}_k")],
                "decimal": [float(k) / m for k in getattr(report, f"{f}_k")],
            }
            for f in REPORT_FAMILIES
        },
        "global": {
            "min_rank": {
                "fraction": f"{report.global_minrank_k}/{m}",
                "decimal": report.global_minrank_k / m,
            },
            "erl": {
                "fraction": f"{report.global_erl_k}/{m}",
                "decimal": report.global_erl_k / m,
            },
        },
    }
    if manifest_core is not None:
        body["manifest"] = manifest_core
    return body


def write_report_json(path, report: PvalueReport, manifest_core: dict | None = None):
    text = json.dumps(report_json_dict(report, manifest_core), indent=2)
    Path(path).write_text(text + "\n", encoding="utf-8")


def read_report_json(path) -> tuple[PvalueReport, dict]:
    try:
        body = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputValidationError(f"cannot read report {path}: {exc}") from None
    try:
        m = body["n_curves"]

        def _ks(f):
            return np.array([int(c.split("/")[0]) for c in body["pointwise"][f]["fraction"]])

        report = PvalueReport(
            grid=Grid(body["grid"]),
            n_curves=m,
            direction=Direction.parse(body["direction"]),
            tie_policy=TiePolicy.parse(body["tie_policy"]),
            raw_k=_ks("raw"),
            single_step_k=_ks("single_step"),
            step_down_k=_ks("step_down"),
            erl_k=_ks("erl"),
            global_minrank_k=int(body["global"]["min_rank"]["fraction"].split("/")[0]),
            global_erl_k=int(body["global"]["erl"]["fraction"].split("/")[0]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InputValidationError(f"{path}: malformed report JSON ({exc})") from None
    return report, body.get("manifest", {})


# ----------------------------------------------------------------- manifests

@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run, plus when it happened."""

    subcommand: str
    inputs: dict
    direction: str | None
    n_permutations: int | None
    seed: int | None
    tie_policy: str | None
    alpha: str | None
    outputs: dict
    version: str = __version__
    timestamp: str | None = None

    def core(self) -> dict:
        """The reproducibility fields; excludes the volatile timestamp so
        report files embedding it stay byte-identical across reruns."""
        return {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "direction": self.direction,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
            "tie_policy": self.tie_policy,
            "alpha": self.alpha,
            "outputs": self.outputs,
            "version": self.version,
        }

    def write(self, path) -> None:
        body = self.core()
        body["timestamp"] = self.timestamp or datetime.now(timezone.utc).isoformat()
        Path(path).write_text(json.dumps(body, indent=2) + "\n", encoding="utf-8")
