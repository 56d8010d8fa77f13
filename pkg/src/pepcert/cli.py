"""Command-line front end.

Subcommands: rates, solve, sweep, verify, plotdata, envelope.

Exit codes: 0 verified/converged, 1 usage error, 2 non-convergence,
3 verification failure, 4 file corruption. The default output directory is
taken from PEPCERT_OUTDIR (falling back to the working directory); all
tolerances are flag-overridable. Identical invocations produce byte-identical
files.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import certfile
from .rates import huber_rate, lower_bound_envelope, quadratic_rate, solve_rate_params
from .recursion import derive_full
from .solver import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    NonConvergence,
    SweepSchedule,
    bootstrap_smallest,
    extrapolate_init,
    gauss_newton,
    sweep,
)
from .verifier import check_delta_certificate, oracle_check, oracle_scale

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGENCE = 2
EXIT_VERIFY_FAIL = 3
EXIT_CORRUPT = 4

DELTA_TOL = 1e-11
CROSS_TOL = 1e-12
ORACLE_TOL = 1e-10


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        raise _UsageError(message)


def _outdir(args) -> str:
    if getattr(args, "outdir", None):
        return args.outdir
    return os.environ.get("PEPCERT_OUTDIR", ".")


def cmd_rates(args) -> int:
    if args.N < 1:
        raise _UsageError("N must be >= 1")
    params = solve_rate_params(args.N)
    gap = abs(quadratic_rate(params.N, params.alpha) - huber_rate(params.N, params.alpha))
    print(f"N {params.N}")
    print(f"alpha {params.alpha!r}")
    print(f"r {params.r!r}")
    print(f"balance_residual {gap:.3e}")
    return EXIT_OK


def _solve_one(n, warm_paths, tol, max_iter):
    params = solve_rate_params(n)
    if warm_paths:
        sources = []
        for path in warm_paths:
            cf = certfile.read_certificate(path)
            sources.append((cf.N, cf.d))
        sources.sort(key=lambda pair: pair[0])
        if len(sources) == 1:
            (n1, d1) = sources[0]
            d0 = extrapolate_init(n1, d1, n1, d1, n)
        else:
            (n1, d1), (n2, d2) = sources[-2], sources[-1]
            d0 = extrapolate_init(n1, d1, n2, d2, n)
        return gauss_newton(params, d0, tol=tol, max_iter=max_iter)
    if n == 3:
        return bootstrap_smallest(params, tol=tol, max_iter=max_iter)
    # cold start: continuation from N=3 up to n, keeping only the last report
    reports = sweep(SweepSchedule.dense(n), tol=tol, max_iter=max_iter)
    return reports[-1]


def cmd_solve(args) -> int:
    if args.N < 3:
        raise _UsageError("solve requires N >= 3")
    if args.warm and len(args.warm) > 2:
        raise _UsageError("at most two warm-start files")
    report = _solve_one(args.N, args.warm, args.tol, args.max_iter)
    cf = certfile.certificate_from_report(report)
    path = args.out or certfile.default_path(_outdir(args), args.N)
    certfile.write_certificate(cf, path=path)
    print(f"N {report.params.N}")
    print(f"alpha {report.params.alpha!r}")
    print(f"r {report.params.r!r}")
    print(f"iterations {report.iterations}")
    print(f"residual_sup {report.residual_sup:.3e}")
    print(f"delta {report.delta:.3e}")
    print(f"positive {report.positive}")
    print(f"converged {report.converged}")
    print(f"wrote {path}")
    return EXIT_OK


def _parse_segment(spec: str):
    try:
        start, stop, stride = (int(part) for part in spec.split(":"))
    except ValueError:
        raise _UsageError(f"bad segment {spec!r}, expected START:STOP:STRIDE")
    return start, stop, stride


def cmd_sweep(args) -> int:
    if args.N_MAX < 3:
        raise _UsageError("sweep requires N_MAX >= 3")
    if args.segment:
        try:
            schedule = SweepSchedule(tuple(_parse_segment(s) for s in args.segment))
        except ValueError as exc:
            raise _UsageError(str(exc))
    elif args.stride_from is not None:
        schedule = SweepSchedule.strided(args.N_MAX, args.stride_from, args.stride)
    else:
        schedule = SweepSchedule.dense(args.N_MAX)
    outdir = _outdir(args)
    print(f"{'N':>6} {'alpha':>20} {'r':>14} {'iters':>5} {'sup|eps|':>10} {'delta':>10}")

    def row(report):
        print(
            f"{report.params.N:>6} {report.params.alpha:>20.16f} "
            f"{report.params.r:>14.6e} {report.iterations:>5} "
            f"{report.residual_sup:>10.2e} {report.delta:>10.2e}"
        )

    try:
        reports = sweep(schedule, tol=args.tol, max_iter=args.max_iter,
                        outdir=outdir, progress=row)
    except NonConvergence as exc:
        print(f"sweep aborted: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    print(f"{len(reports)} certificates written to {outdir}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cf = certfile.read_certificate(args.file)
    params = certfile.params_from_file(cf)
    cert = derive_full(params, cf.d)
    for name in ("a", "b", "c", "eps"):
        stored = getattr(cf, name)
        if stored is None:
            continue
        gap = float(np.max(np.abs(stored - getattr(cert, name))))
        if gap > CROSS_TOL:
            print(
                f"corruption: stored {name} deviates from recomputed by {gap:.3e}",
                file=sys.stderr,
            )
            return EXIT_CORRUPT
    is_cert, delta, bound = check_delta_certificate(cert)
    print(f"N {params.N}")
    print(f"delta {delta:.6e}")
    print(f"positive {is_cert}")
    print(f"bound {params.r!r} + {delta / 2:.3e} = {bound!r}")
    ok = is_cert and delta <= args.tol
    if args.oracle:
        dev = oracle_check(cert)
        tol = args.oracle_tol * oracle_scale(cert)
        print(f"oracle_deviation {dev:.3e} (tolerance {tol:.3e})")
        ok = ok and dev <= tol
    print("verdict " + ("CERTIFIED" if ok else "FAILED"))
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def cmd_plotdata(args) -> int:
    outdir = _outdir(args)
    os.makedirs(outdir, exist_ok=True)
    written = []
    for path in args.files:
        cf = certfile.read_certificate(path)
        params = certfile.params_from_file(cf)
        cert = derive_full(params, cf.d)
        stem = os.path.splitext(os.path.basename(path))[0]
        for name in ("a", "b", "c", "d"):
            vec = getattr(cert, name)
            top = float(np.max(vec))
            if top == 0.0:
                raise _UsageError(f"vector {name} in {path} has max 0; cannot rescale")
            out = os.path.join(outdir, f"{stem}_{name}.dat")
            with open(out, "w") as fh:
                m = len(vec)
                for i, v in enumerate(vec):
                    t = i / (m - 1)
                    fh.write(f"{t!r} {float(v) / top!r}\n")
            written.append(out)
    for out in written:
        print(f"wrote {out}")
    return EXIT_OK


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo, hi, step = (float(part) for part in spec.split(":"))
    except ValueError:
        raise _UsageError(f"bad grid spec {spec!r}, expected lo:hi:step")
    if step <= 0 or hi < lo:
        raise _UsageError(f"bad grid spec {spec!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def cmd_envelope(args) -> int:
    if args.N < 1:
        raise _UsageError("N must be >= 1")
    grid = _parse_grid(args.grid)
    vals = lower_bound_envelope(args.N, grid)
    imin = int(np.argmin(vals))
    for i, (al, v) in enumerate(zip(grid, vals)):
        mark = " *" if i == imin else ""
        print(f"{al:.6f} {v:.16e}{mark}")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="pepcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="stepsize/rate pair for one N")
    p.add_argument("N", type=int)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("solve", help="solve one certificate and write its file")
    p.add_argument("N", type=int)
    p.add_argument("--warm", nargs="+", metavar="FILE",
                   help="one or two certificate files to extrapolate from")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--out", help="output file path")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="continuation sweep, one file per N")
    p.add_argument("N_MAX", type=int)
    p.add_argument("--stride-from", type=int, default=None,
                   help="switch from stride 1 to --stride at this N")
    p.add_argument("--stride", type=int, default=50)
    p.add_argument("--segment", action="append", metavar="START:STOP:STRIDE",
                   help="explicit schedule segment (repeatable, overrides "
                        "N_MAX/--stride-from); e.g. 3:2240:1 2240:8960:320")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="re-derive and check a certificate file")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=DELTA_TOL,
                   help="maximum total positive error delta")
    p.add_argument("--oracle", action="store_true",
                   help="also run the coefficient-matching oracle")
    p.add_argument("--oracle-tol", type=float, default=ORACLE_TOL)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plotdata", help="emit normalized a,b,c,d curves")
    p.add_argument("files", nargs="+")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("envelope", help="lower-bound envelope over a stepsize grid")
    p.add_argument("N", type=int)
    p.add_argument("--grid", default="0.1:1.99:0.01", help="lo:hi:step")
    p.set_defaults(func=cmd_envelope)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except certfile.CertificateFormatError as exc:
        print(f"corrupt certificate: {exc}", file=sys.stderr)
        return EXIT_CORRUPT
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
