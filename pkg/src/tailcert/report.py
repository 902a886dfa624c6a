"""Experiment reports and emission to the text/CSV/plot-data formats.

A report's content digest covers everything reproducible (config echo,
certificates with provenance, tail digests, verdicts, diagnostics, net
headers, notes, version); wall-clock time is recorded alongside but excluded,
so re-runs with identical seeds produce identical digests.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

from .util import canonical_json, digest
from .errors import IoFailureError

TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class ExperimentReport:
    config: dict
    certificates: tuple = ()
    tails: tuple = ()          # empirical tail documents
    verdicts: tuple = ()       # verdict objects (dicts)
    diagnostics: tuple = ()    # (name, record) pairs
    nets: tuple = ()           # net headers
    notes: tuple = ()
    version: str = TOOL_VERSION
    wall_clock_seconds: float = 0.0

    RUNTIME_CONFIG_KEYS = ("workers", "out_dir")

    def content(self) -> dict:
        # worker counts and output paths change scheduling, never numbers;
        # they ride outside the digested content like wall-clock time
        config = {k: v for k, v in self.config.items()
                  if k not in self.RUNTIME_CONFIG_KEYS}
        return {
            "kind": "experiment_report",
            "config": config,
            "certificates": list(self.certificates),
            "tails": list(self.tails),
            "verdicts": list(self.verdicts),
            "diagnostics": [[k, v] for k, v in self.diagnostics],
            "nets": list(self.nets),
            "notes": list(self.notes),
            "version": self.version,
        }

    def content_digest(self) -> str:
        return digest(self.content())

    def to_document(self) -> dict:
        doc = self.content()
        doc["content_digest"] = self.content_digest()
        doc["wall_clock_seconds"] = self.wall_clock_seconds
        return doc

    def all_passed(self) -> bool:
        return all(v.get("passed", False) for v in self.verdicts) \
            if self.verdicts else True


def _write(path: str, text: str):
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailureError(f"cannot write {path}: {exc}") from exc


def emit(report: ExperimentReport, fmt: str, out_dir: str,
         basename: str = "report") -> list:
    """Write the report in one of the supported formats and return the paths.

    structured-text: the canonical JSON document.
    csv: one file per empirical tail with columns n,t,m,k,ucb,bound,slack
         (bound and slack filled from the matching certificate by position
         when available).
    plotdata: flat (x, y, series) triples for the survival-vs-exponent view,
         ratio statistics and net cardinalities where present.
    """
    paths = []
    if fmt == "structured-text":
        path = os.path.join(out_dir, f"{basename}.json")
        _write(path, canonical_json(report.to_document()) + "\n")
        paths.append(path)
    elif fmt == "csv":
        from .certificates import TailCertificate
        from .verify import EmpiricalTail, tail_to_csv

        certs = [TailCertificate.from_document(c) for c in report.certificates
                 if c.get("kind") == "tail_certificate"]
        for i, tdoc in enumerate(report.tails):
            tail = EmpiricalTail.from_document(tdoc)
            cert = None
            for c in certs:
                if c.is_concrete:
                    cert = c
                    break
            path = os.path.join(out_dir, f"{basename}_tail{i}.csv")
            _write(path, tail_to_csv(tail, cert))
            paths.append(path)
    elif fmt == "plotdata":
        rows = ["x,y,series"]
        from .certificates import TailCertificate
        from .verify import EmpiricalTail

        certs = [TailCertificate.from_document(c) for c in report.certificates
                 if c.get("kind") == "tail_certificate"]
        cert = next((c for c in certs if c.is_concrete), None)
        for i, tdoc in enumerate(report.tails):
            tail = EmpiricalTail.from_document(tdoc)
            for p in tail.probes:
                if tail.source == "monte_carlo":
                    if p.exceedances == 0:
                        continue
                    y = -math.log(p.exceedances / p.trials)
                else:
                    if p.ucb <= 0:
                        continue
                    y = -math.log(p.ucb)
                if cert is not None:
                    x = float(cert.rate.evaluate(p.n)) * float(cert.f.evaluate(p.t))
                else:
                    x = p.t
                rows.append(f"{x!r},{y!r},tail{i}")
        for name, rec in report.diagnostics:
            if isinstance(rec, dict) and "ratio_by_cell" in rec:
                for cell, val in rec["ratio_by_cell"]:
                    rows.append(f"{cell[1]!r},{val!r},ratio_d{cell[0]}")
        for h in report.nets:
            rows.append(f"{h['epsilon']!r},{h['cardinality']!r},net_cardinality")
        path = os.path.join(out_dir, f"{basename}_plotdata.csv")
        _write(path, "\n".join(rows) + "\n")
        paths.append(path)
    else:
        raise IoFailureError(f"unknown format {fmt!r}")
    return paths


def load_report(path: str) -> ExperimentReport:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise IoFailureError(f"cannot read {path}: {exc}") from exc
    report = ExperimentReport(
        config=doc["config"],
        certificates=tuple(doc["certificates"]),
        tails=tuple(doc["tails"]),
        verdicts=tuple(doc["verdicts"]),
        diagnostics=tuple((k, v) for k, v in doc["diagnostics"]),
        nets=tuple(doc["nets"]),
        notes=tuple(doc["notes"]),
        version=doc["version"],
        wall_clock_seconds=float(doc.get("wall_clock_seconds", 0.0)),
    )
    if report.content_digest() != doc.get("content_digest"):
        raise IoFailureError("report content digest mismatch")
    return report
