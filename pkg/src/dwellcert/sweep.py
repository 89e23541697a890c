"""(tau x L) grids under periodic switching: solve, post-verify, tabulate."""

import csv
import io
import time
from dataclasses import dataclass, field

from .certificates import certificate_a_from_result, certificate_b_from_result, verify
from .cycles import DEFAULT_CAP, enumerate_cycles
from .errors import CapExceeded, NumericalFailure
from .lmi import build
from .oracles import instability_witness_search
from .solver import SolverOptions, Status, solve_feasibility

ROW_HEADER = ("tau", "L", "status", "margin", "wallclock_ms")
SUMMARY_HEADER = ("tau", "min_L", "lemma_feasible", "oracle", "witness_radius")


@dataclass
class SweepRow:
    tau: int
    L: int
    status: str
    margin: float
    wallclock_ms: int
    reason: str = ""
    certificate: object = field(default=None, repr=False)
    family: object = field(default=None, repr=False)


@dataclass
class TauSummary:
    tau: int
    min_L: object
    lemma_feasible: bool
    witness: object

    @property
    def oracle(self):
        return "witness" if self.witness.found else "no-witness"


@dataclass
class SweepResult:
    rows: list
    summary: list
    L_max: int

    @property
    def any_numerical_failure(self):
        return any(r.status == Status.NUMERICAL_FAILURE.value for r in self.rows)

    def rows_csv(self, wallclock=True):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ROW_HEADER)
        for r in self.rows:
            margin = "" if r.margin is None else f"{r.margin:.9e}"
            w.writerow((r.tau, r.L, r.status, margin, r.wallclock_ms if wallclock else ""))
        return buf.getvalue()

    def summary_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for s in self.summary:
            radius = f"{s.witness.radius:.9f}" if s.witness.found else ""
            w.writerow((s.tau, s.min_L, str(s.lemma_feasible).lower(), s.oracle, radius))
        return buf.getvalue()

    def min_L(self):
        return {s.tau: s.min_L for s in self.summary}


def evaluate_point(sys, L, condition, opts, cap=DEFAULT_CAP, keep=False):
    """Build, solve and post-verify one grid point; never raises for cap or numerics."""
    start = time.perf_counter()
    try:
        family = enumerate_cycles(sys, L, cap)
    except CapExceeded as exc:
        return SweepRow(sys.dwell_min, L, "skipped", None, 0, reason=str(exc))
    try:
        result = solve_feasibility(build(sys, family, condition), opts)
    except NumericalFailure as exc:
        ms = int(round(1000 * (time.perf_counter() - start)))
        return SweepRow(sys.dwell_min, L, Status.NUMERICAL_FAILURE.value, None, ms, reason=str(exc))
    status, cert = result.status.value, None
    reason = result.message
    if result.feasible:
        wrap = certificate_b_from_result if condition == "b" else certificate_a_from_result
        cert = wrap(sys, family, result)
        report = verify(sys, family, cert)
        if not report.passed:
            status, cert = Status.NUMERICAL_FAILURE.value, None
            reason = f"post-verification failed (worst {report.worst:.3e})"
    ms = int(round(1000 * (time.perf_counter() - start)))
    row = SweepRow(sys.dwell_min, L, status, result.margin, ms, reason)
    if keep:
        row.certificate = cert
        row.family = family
    return row


def run_sweep(sys, taus, Ls, condition="b", opts=None, cap=DEFAULT_CAP, witness_L_max=None, keep=False):
    """Evaluate every ``(tau, L)`` with dwell range ``[tau, tau]``; rows come out in grid order."""
    taus, Ls = sorted(set(taus)), sorted(set(Ls))
    if not taus or not Ls:
        raise ValueError("tau and L ranges must be nonempty")
    opts = opts or SolverOptions()
    L_max = max(Ls)
    witness_L_max = witness_L_max or L_max
    rows, summary = [], []
    for tau in taus:
        point = sys.with_dwell(tau)
        try:
            witness = instability_witness_search(point, witness_L_max, cap)
        except CapExceeded:
            witness = instability_witness_search(point, 1, cap)
        feasible_L = []
        for L in Ls:
            row = evaluate_point(point, L, condition, opts, cap, keep)
            if row.status == Status.FEASIBLE.value:
                feasible_L.append(L)
            elif witness.found and row.status == Status.INCONCLUSIVE.value:
                row.status = "witness-unstable"
            rows.append(row)
        min_L = feasible_L[0] if feasible_L else f"none<={L_max}"
        summary.append(TauSummary(tau, min_L, min_L == 1, witness))
    return SweepResult(rows, summary, L_max)
