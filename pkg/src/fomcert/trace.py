"""Per-iteration run traces, serializable to CSV and a JSON summary."""

import csv
import json
from dataclasses import dataclass
from typing import Optional

CSV_HEADER = ["k", "t", "theta", "primal", "dual_surrogate", "gap", "delta",
              "thm1_residual", "thm2_residual", "bound", "cggap"]


@dataclass
class TraceRow:
    k: int
    t: float
    theta: float
    primal: float
    dual_surrogate: float
    gap: float
    delta: float
    thm1_residual: float
    thm2_residual: float
    bound: Optional[float] = None
    cggap: Optional[float] = None


class Trace:
    def __init__(self, instance_name, method_name, reference_value=None):
        self.instance_name = instance_name
        self.method_name = method_name
        self.reference_value = reference_value
        self.rows = []
        self.violations = []
        self.wall_time_ms = 0.0

    def append(self, row):
        self.rows.append(row)

    def violation(self, message):
        self.violations.append(message)

    @property
    def final(self):
        return self.rows[-1]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for r in self.rows:
                w.writerow([
                    r.k, repr(r.t), repr(r.theta), repr(r.primal),
                    repr(r.dual_surrogate), repr(r.gap), repr(r.delta),
                    repr(r.thm1_residual), repr(r.thm2_residual),
                    "" if r.bound is None else repr(r.bound),
                    "" if r.cggap is None else repr(r.cggap),
                ])

    def summary(self):
        out = {
            "instance": self.instance_name,
            "method": self.method_name,
            "iterations": len(self.rows),
            "final_primal": self.final.primal,
            "final_gap": self.final.gap,
            "wall_time_ms": self.wall_time_ms,
            "violations": list(self.violations),
        }
        if self.reference_value is not None:
            out["reference_value"] = self.reference_value
        return out

    def write_summary(self, path):
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)
            fh.write("\n")


def read_csv(path):
    """Read a trace CSV back into TraceRow objects."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError("unexpected trace header: %s" % (reader.fieldnames,))
        for rec in reader:
            rows.append(TraceRow(
                k=int(rec["k"]), t=float(rec["t"]), theta=float(rec["theta"]),
                primal=float(rec["primal"]),
                dual_surrogate=float(rec["dual_surrogate"]),
                gap=float(rec["gap"]), delta=float(rec["delta"]),
                thm1_residual=float(rec["thm1_residual"]),
                thm2_residual=float(rec["thm2_residual"]),
                bound=float(rec["bound"]) if rec["bound"] else None,
                cggap=float(rec["cggap"]) if rec["cggap"] else None,
            ))
    return rows
