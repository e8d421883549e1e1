"""Command-line front end: ``exactsharpe solve | estimate | verify``.

Successful runs write one JSON document (or a weights CSV) to ``--output``.
Failures write a single JSON error object to stderr and exit with

    2  unreadable or malformed input
    3  numerical degeneracy (NotSpd, EqualConsecutiveMeans, ...)
    4  the stationary point minimizes the risk-adjusted return
    5  a verification check failed
"""
from __future__ import annotations

import argparse
import collections
import math
import sys

import numpy as np

from . import formats
from .closed_form import portfolio_metrics, solve_weights
from .errors import ParseError, PortfolioError
from .estimation import estimate_moments, min_variance_weights
from .oracle import check_solution, random_instance

EXIT_VERIFY = 5


class VerificationFailed(PortfolioError):
    exit_code = EXIT_VERIFY

    def __init__(self, failed, report):
        super().__init__("verification failed: " + ", ".join(failed))
        self.failed = failed
        self.report = report

    def to_dict(self):
        out = super().to_dict()
        out["failed_checks"] = self.failed
        out["report"] = self.report
        return out


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _finite(x):
    return float(x) if x is not None and math.isfinite(x) else None


def _floats(xs):
    return [float(x) for x in xs]


def solve_document(moments, baseline=False, full_trace=False) -> dict:
    w, trace = solve_weights(moments)
    doc = {
        "labels": list(moments.labels),
        "weights": _floats(w),
        "weights_sum": math.fsum(w),
        "report": formats.report_to_dict(portfolio_metrics(w, moments)),
        "trace": {
            "t_star": trace.t_star,
            "flags": trace.flags,
            "permutation": [int(i) for i in trace.permutation],
        },
    }
    if full_trace and not trace.all_means_equal:
        doc["trace"].update(
            a=_floats(trace.coeffs.a), b=_floats(trace.coeffs.b),
            u=_floats(trace.u), v=_floats(trace.v),
            alpha=_floats(trace.alpha), beta=_floats(trace.beta),
        )
    if baseline:
        w_mv = min_variance_weights(moments.omega)
        doc["baseline"] = {
            "min_variance": {
                "weights": _floats(w_mv),
                "report": formats.report_to_dict(portfolio_metrics(w_mv, moments)),
            }
        }
    return doc


def _check_dict(c):
    return {"name": c.name, "status": c.status, "value": _finite(c.value),
            "tolerance": c.tolerance, "note": c.note}


def verify_file(moments, weights, grid_resolution, seed) -> dict:
    checks = check_solution(moments, weights, grid_resolution=grid_resolution, rng=seed)
    return {
        "mode": "file",
        "labels": list(moments.labels),
        "checks": [_check_dict(c) for c in checks],
        "passed": not any(c.failed for c in checks),
    }


def verify_random(dims, instances, grid_resolution, seed) -> dict:
    rng = np.random.default_rng(seed)
    stats = collections.OrderedDict()
    for k in range(instances):
        m = random_instance(rng, dims[k % len(dims)])
        for c in check_solution(m, grid_resolution=grid_resolution, rng=rng):
            s = stats.setdefault(c.name, {"pass": 0, "fail": 0, "skip": 0,
                                          "worst": None, "tolerance": c.tolerance})
            s[c.status] += 1
            if c.value is not None:
                v = c.value if math.isfinite(c.value) else math.inf
                s["worst"] = v if s["worst"] is None else max(s["worst"], v)
    for s in stats.values():
        s["worst"] = _finite(s["worst"])
    return {
        "mode": "random",
        "seed": seed,
        "dims": dims,
        "instances": instances,
        "checks": stats,
        "passed": all(s["fail"] == 0 for s in stats.values()),
    }


def _parse_list(text, kind, what):
    try:
        return [kind(x) for x in text.replace(" ", "").strip("[]").split(",") if x]
    except ValueError:
        raise ParseError(f"{what} must be a comma-separated list") from None


def cmd_solve(args):
    moments = formats.load_moments(_read(args.moments), args.symmetrize)
    doc = solve_document(moments, args.baseline, args.full_trace)
    if args.format == "csv-weights":
        return formats.weights_csv(doc["labels"], doc["weights"])
    return formats.dumps(doc)


def cmd_estimate(args):
    if args.format != "document":
        raise ParseError("estimate only writes the moments document")
    series = formats.read_returns_csv(_read(args.returns))
    return formats.dumps(formats.moments_to_dict(estimate_moments(series)))


def cmd_verify(args):
    if args.format != "document":
        raise ParseError("verify only writes a report document")
    if args.grid_resolution < 2:
        raise ParseError("--grid-resolution must be at least 2")
    if args.moments is not None:
        moments = formats.load_moments(_read(args.moments), args.symmetrize)
        weights = None
        if args.weights is not None:
            weights = _parse_list(args.weights, float, "--weights")
            if len(weights) != moments.n:
                raise ParseError(f"--weights needs {moments.n} values")
        report = verify_file(moments, weights, args.grid_resolution, args.seed)
    else:
        if args.weights is not None:
            raise ParseError("--weights needs a moments file")
        dims = _parse_list(args.dims, int, "--dims")
        if not dims or min(dims) < 2:
            raise ParseError("--dims entries must be at least 2")
        report = verify_random(dims, args.instances, args.grid_resolution, args.seed)
    if not report["passed"]:
        if report["mode"] == "file":
            failed = [c["name"] for c in report["checks"] if c["status"] == "fail"]
        else:
            failed = [k for k, s in report["checks"].items() if s["fail"]]
        raise VerificationFailed(failed, report)
    return formats.dumps(report)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("document", "csv-weights"), default="document")
    common.add_argument("--seed", type=int, default=0, help="seed for random checks")
    common.add_argument("--symmetrize", action="store_true",
                        help="average omega with its transpose instead of rejecting asymmetry")

    parser = _Parser(
        prog="exactsharpe",
        description="Closed-form maximum risk-adjusted-return portfolio weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="optimal weights from a moments file")
    p.add_argument("moments", help="moments document (JSON), '-' for stdin")
    p.add_argument("--baseline", action="store_true",
                   help="include the minimum-variance portfolio for comparison")
    p.add_argument("--full-trace", action="store_true",
                   help="include every closed-form intermediate")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("estimate", parents=[common],
                       help="sample moments from a CSV of simple returns")
    p.add_argument("returns", help="CSV file, '-' for stdin")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("verify", parents=[common],
                       help="check the solution against independent oracles")
    p.add_argument("moments", nargs="?", help="moments document; omit for random instances")
    p.add_argument("--weights", help="comma-separated weights to audit instead of the solution")
    p.add_argument("--grid-resolution", type=int, default=1001,
                   help="grid points per axis for the brute-force search (n <= 3)")
    p.add_argument("--instances", type=int, default=100, help="random instances to generate")
    p.add_argument("--dims", default="5", help="comma-separated asset counts for random mode")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = args.func(args)
    except _UsageError as exc:
        err = ParseError(f"usage: {exc}")
        sys.stderr.write(formats.dumps(err.to_dict()))
        return err.exit_code
    except PortfolioError as exc:
        sys.stderr.write(formats.dumps(exc.to_dict()))
        return exc.exit_code
    if args.output == "-":
        sys.stdout.write(out)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
