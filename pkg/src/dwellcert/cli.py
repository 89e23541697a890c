"""Command line entry point: ``dwellcert {analyze,sweep,simulate,verify,convert}``.

Exit codes: 0 completed, 1 certificate rejected (``verify``), 2 usage error,
3 numerical failure.
"""

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import svg
from .certificates import (
    certificate_a_from_result,
    certificate_b_from_result,
    convert_b_to_a,
    dump_certificate,
    extract_b_from_a,
    load_certificate,
    verify,
)
from .cycles import enumerate_cycles
from .errors import DwellCertError, NumericalFailure
from .lmi import build
from .oracles import instability_witness_search
from .solver import SolverOptions, Status, solve_feasibility
from .sweep import run_sweep
from .system import load_system, periodic_signal, random_admissible_signal, simulate

EXIT_OK, EXIT_REJECTED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
DEFAULT_X0 = "1,1"


def _read_system(path):
    return load_system(Path(path).read_text())


def _dwell(args, sys_):
    if args.tau is not None:
        return sys_.with_dwell(args.tau)
    lo = args.tau_min if args.tau_min is not None else sys_.dwell_min
    hi = args.tau_max if args.tau_max is not None else sys_.dwell_max
    return sys_.with_dwell(lo, hi)


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _opts(args):
    return SolverOptions(eps=args.eps, mu=args.mu)


def cmd_analyze(args):
    sys_ = _dwell(args, _read_system(args.system))
    family = enumerate_cycles(sys_, args.L)
    result = solve_feasibility(build(sys_, family, args.condition), _opts(args))
    print(f"dwell [{sys_.dwell_min},{sys_.dwell_max}] L={args.L} condition={args.condition} cycles={len(family)}")
    print(f"status {result.status.value} margin {result.margin:.6e} iterations {result.iterations}")
    witness = instability_witness_search(sys_, args.L_max)
    if witness.found:
        c = witness.cycle
        print(f"instability witness: modes {list(c.modes)} durations {list(c.durations)} radius {witness.radius:.9f}")
    else:
        print(f"no instability witness with L <= {args.L_max} (not a stability proof)")
    if result.status is Status.NUMERICAL_FAILURE:
        print(f"numerical failure: {result.message}", file=sys.stderr)
        return EXIT_NUMERICAL
    if result.feasible and args.out:
        wrap = certificate_b_from_result if args.condition == "b" else certificate_a_from_result
        cert = wrap(sys_, family, result)
        report = verify(sys_, family, cert)
        if not report.passed:
            print("post-verification failed", file=sys.stderr)
            return EXIT_NUMERICAL
        _write(args.out, dump_certificate(cert))
    return EXIT_OK


def cmd_sweep(args):
    if args.tau is not None:
        taus = [args.tau]
    else:
        lo = 1 if args.tau_min is None else args.tau_min
        hi = 15 if args.tau_max is None else args.tau_max
        taus = list(range(lo, hi + 1))
    if not taus or min(taus) < 1:
        raise _Usage("empty or invalid dwell grid")
    Ls = [args.L] if args.L is not None else list(range(1, args.L_max + 1))
    if not Ls or min(Ls) < 1:
        raise _Usage("empty or invalid L range")
    result = run_sweep(_read_system(args.system), taus, Ls, args.condition, _opts(args))
    _write(args.out, result.rows_csv())
    if args.summary:
        _write(args.summary, result.summary_csv())
    elif args.out and args.out != "-":
        sys.stdout.write(result.summary_csv())
    if args.svg:
        Path(args.svg).write_text(svg.sweep_grid(result))
    for r in result.rows:
        if r.reason and r.status != "feasible":
            logging.getLogger(__name__).info("tau=%d L=%d %s: %s", r.tau, r.L, r.status, r.reason)
    return EXIT_NUMERICAL if result.any_numerical_failure else EXIT_OK


def _trajectory_csv(traj):
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = traj.states.shape[1]
    w.writerow(["k", "mode"] + [f"x{i + 1}" for i in range(n)] + ["norm"])
    norms = traj.norms
    for k, x in enumerate(traj.states):
        mode = int(traj.modes[k]) if k < len(traj.modes) else ""
        w.writerow([k, mode] + [repr(float(v)) for v in x] + [repr(float(norms[k]))])
    return buf.getvalue()


def cmd_simulate(args):
    base = _read_system(args.system)
    try:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    except ValueError as exc:
        raise _Usage(f"bad --x0: {exc}") from exc
    runs = []
    taus = args.taus or ([args.tau] if args.tau is not None else None)
    if taus:
        for tau in taus:
            sys_ = base.with_dwell(tau)
            runs.append((f"tau={tau}", sys_, periodic_signal(sys_, tau)))
    else:
        sys_ = _dwell(args, base)
        runs.append((f"seed={args.seed}", sys_, random_admissible_signal(sys_, args.seed, args.segments)))
    panels = []
    for n, (title, sys_, signal) in enumerate(runs):
        traj = simulate(sys_, signal, x0, args.horizon)
        panels.append((title, traj.norms))
        text = _trajectory_csv(traj)
        if args.out and len(runs) > 1:
            p = Path(args.out)
            _write(p.with_name(f"{p.stem}_{title.replace('=', '')}{p.suffix}"), text)
        else:
            _write(args.out, text)
    if args.svg:
        Path(args.svg).write_text(svg.norm_panels(panels))
    return EXIT_OK


def _cert_context(args):
    base = _read_system(args.system)
    cert = load_certificate(Path(args.cert).read_text())
    dwell = cert.meta.get("dwell") or {}
    sys_ = base.with_dwell(dwell.get("min", base.dwell_min), dwell.get("max", base.dwell_max))
    if cert.meta.get("system_hash") != sys_.content_hash():
        raise DwellCertError("certificate was issued for a different system")
    family = enumerate_cycles(sys_, cert.L)
    return sys_, family, cert


def cmd_verify(args):
    sys_, family, cert = _cert_context(args)
    report = verify(sys_, family, cert, args.tol)
    verdict = "PASS" if report.passed else "FAIL"
    print(f"{verdict} condition={cert.condition} L={cert.L} checks={len(report.checks)} worst={report.worst:.6e}")
    for lbl, v in report.failures()[:20]:
        print(f"  failed {lbl}: {v:.6e}")
    return EXIT_OK if report.passed else EXIT_REJECTED


def cmd_convert(args):
    sys_, family, cert = _cert_context(args)
    if cert.condition == "b":
        out = convert_b_to_a(sys_, family, cert, delta0=args.delta0)
    else:
        out = extract_b_from_a(sys_, family, cert)
    _write(args.out, dump_certificate(out))
    return EXIT_OK


class _Usage(Exception):
    pass


def _add_common(p, dwell=True, solver=True):
    p.add_argument("--system", required=True, help="system JSON file")
    if dwell:
        p.add_argument("--tau", type=int, help="periodic dwell: range [tau, tau]")
        p.add_argument("--tau-min", type=int)
        p.add_argument("--tau-max", type=int)
    if solver:
        p.add_argument("--eps", type=float, default=1e-8, help="strictness margin")
        p.add_argument("--mu", type=float, default=1e8, help="normalization cap")


def build_parser():
    parser = argparse.ArgumentParser(prog="dwellcert", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="solve one (L, condition) point")
    _add_common(p)
    p.add_argument("--condition", choices=("a", "b"), default="b")
    p.add_argument("--L", type=int, default=1)
    p.add_argument("--L-max", type=int, default=10, help="witness search depth")
    p.add_argument("--out", help="write the certificate here when feasible")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="periodic (tau x L) grid")
    _add_common(p)
    p.add_argument("--condition", choices=("a", "b"), default="b")
    p.add_argument("--L", type=int, help="single L instead of 1..L-max")
    p.add_argument("--L-max", type=int, default=10)
    p.add_argument("--out", help="row CSV (default stdout)")
    p.add_argument("--summary", help="per-tau summary CSV")
    p.add_argument("--svg", help="feasible-point grid plot")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="trajectory CSV (and SVG)")
    _add_common(p, solver=False)
    p.add_argument("--taus", type=lambda s: [int(v) for v in s.split(",")], help="periodic dwell values, comma list")
    p.add_argument("--x0", default=DEFAULT_X0, help="initial state, comma list")
    p.add_argument("--horizon", type=int, default=240)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--segments", type=int, default=100)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--svg", help="norm plot, one panel per run")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="check a certificate file")
    _add_common(p, dwell=False, solver=False)
    p.add_argument("--cert", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convert", help="product form <-> clock-dependent form")
    _add_common(p, dwell=False, solver=False)
    p.add_argument("--cert", required=True)
    p.add_argument("--out", help="output certificate (default stdout)")
    p.add_argument("--delta0", type=float, help="initial step slack for b -> a")
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"dwellcert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"dwellcert: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DwellCertError, OSError) as exc:
        print(f"dwellcert: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
