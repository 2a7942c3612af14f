"""Command-line interface.

Subcommands::

    solve        run a descent method on a bundled function, emit the trace
    bisect-demo  run one bisection (legacy or improved) and log its midpoints
    table1       detection probabilities for the cone function, optional Monte Carlo
    gs-compare   deterministic vs random sampling at the critical point of cone:n

Exit codes: 0 success, 1 usage/configuration error, 2 algorithmic failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np

from . import geometry
from .bisection import BisectionCaps, Found, bisect_improved, bisect_legacy
from .core import AlgorithmFailure, DescentParams, EpsCritical, InvalidArgument, SolverFailure
from .direction import descent_direction
from .minnorm import min_norm_point
from .optimizer import (
    GSParams,
    gs_bundle,
    in_d2,
    make_rng,
    mc_detection_rate,
    minimize_deterministic,
    minimize_random_gs,
)
from .testfns import get_oracle

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2
TRACE_FIELDS = ["iter", "fx", "eps", "vnorm", "oracle_evals", "oracle_subgrads", "bundle_size"]
BISECT_FIELDS = ["j", "a", "b", "t", "inner"]

log = logging.getLogger("dgsampling")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for algorithm failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(value):
    return float(Fraction(value)) if "/" in value else float(value)


def _vector(text, n=None):
    try:
        vals = [_num(s) for s in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}") from None
    if not vals:
        raise UsageError("empty vector")
    if n is not None and len(vals) == 1 and n > 1:
        vals = vals * n
    if n is not None and len(vals) != n:
        raise UsageError(f"expected {n} coordinates, got {len(vals)}")
    return np.array(vals)


def _clean(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def write_rows(rows, fields, fmt, path=None):
    """Write dict rows as CSV (header, \\n endings) or a JSON array."""
    rows = [{k: _clean(r[k]) for k in fields} for r in rows]
    if fmt == "json":
        text = json.dumps(rows, indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        text = buf.getvalue()
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _add_output(p):
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = _Parser(
        prog="dgsampling",
        description="Deterministic gradient sampling: solvers, bisection demos and detection tables.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="minimize a bundled function")
    p.add_argument("--fn", required=True, help="counterexample, cone:<n>, abs, maxnorm:<n>, maxquad")
    p.add_argument("--x0", default="0", help="start point, comma separated; a scalar is broadcast")
    p.add_argument("--method", choices=("deterministic", "gs"), default="deterministic")
    p.add_argument("--eps", type=_num, default=1.0)
    p.add_argument("--c", type=_num, default=0.5)
    p.add_argument("--delta", type=_num, default=None)
    p.add_argument("--eps-min", type=_num, default=1e-6)
    p.add_argument("--shrink", type=_num, default=0.5)
    p.add_argument("--max-outer", type=int, default=10_000)
    p.add_argument("--max-bundle", type=int, default=None)
    p.add_argument("--m", type=int, default=None, help="samples per iteration (gs only)")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("bisect-demo", help="log one bisection run")
    p.add_argument("--algo", choices=("legacy", "improved"), default="improved")
    p.add_argument("--fn", default="counterexample")
    p.add_argument("--x0", default="0")
    p.add_argument("--v", default=None, help="direction (default: minus the subgradient at x0)")
    p.add_argument("--eps", type=_num, default=1.0)
    p.add_argument("--c", type=_num, default=0.5)
    p.add_argument("--ctilde", type=_num, default=None, help="default: midpoint of (c_min, c)")
    p.add_argument("--max-iter", type=int, default=BisectionCaps.max_iter)
    _add_output(p)

    p = sub.add_parser("table1", help="detection probabilities with m = 2n samples")
    p.add_argument("--n", type=int, nargs="+", default=list(geometry.TABLE1_DIMS))
    p.add_argument("--mc", type=int, default=0, metavar="TRIALS", help="add Monte Carlo estimates")
    p.add_argument("--seed", type=int, default=0)
    _add_output(p)

    p = sub.add_parser("gs-compare", help="deterministic vs random sampling on cone:n at 0")
    p.add_argument("--dims", type=int, nargs="+", default=list(range(2, 11)))
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _add_output(p)
    return parser


def cmd_solve(args):
    oracle = get_oracle(args.fn)
    x0 = _vector(args.x0, oracle.dim)
    if args.method == "deterministic":
        params = DescentParams(
            eps=args.eps, c=args.c, delta=args.delta, eps_min=args.eps_min,
            shrink=args.shrink, max_outer=args.max_outer, max_bundle=args.max_bundle,
        )
        trace = minimize_deterministic(oracle, x0, params)
    else:
        params = GSParams(
            m=args.m, eps=args.eps, c=args.c, delta=args.delta, eps_min=args.eps_min,
            shrink=args.shrink, seed=args.seed, max_outer=args.max_outer,
        )
        trace = minimize_random_gs(oracle, x0, params)
    rows = [{k: getattr(r, k) for k in TRACE_FIELDS} for r in trace.rows]
    write_rows(rows, TRACE_FIELDS, args.format, args.out)
    print(
        f"# fn={args.fn} steps={trace.n_steps} f={float(trace.fx)!r} x={trace.x.tolist()}",
        file=sys.stderr,
    )
    if not trace.complete:
        print("# max_outer reached before eps < eps_min", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


def cmd_bisect_demo(args):
    oracle = get_oracle(args.fn)
    x0 = _vector(args.x0, oracle.dim)
    v = -oracle.subgrad(x0) if args.v is None else _vector(args.v, oracle.dim)
    caps = BisectionCaps(max_iter=args.max_iter)
    rows = []

    def record(j, a, b, t, inner):
        rows.append(dict(zip(BISECT_FIELDS, (j, a, b, t, inner))))

    if args.algo == "legacy":
        if args.ctilde is not None:
            raise UsageError("--ctilde only applies to --algo improved")
        out = bisect_legacy(oracle, x0, args.eps, args.c, v, caps=caps, callback=record)
    else:
        out = bisect_improved(oracle, x0, args.eps, args.c, v, c_tilde=args.ctilde, caps=caps, callback=record)
    write_rows(rows, BISECT_FIELDS, args.format, args.out)
    if isinstance(out, Found):
        print(
            f"# Found t={out.t!r} xi={out.xi_new.tolist()} iterations={out.iterations}",
            file=sys.stderr,
        )
    else:
        print(f"# IntervalExhausted after {out.iterations} midpoints, last t={out.last_t!r}", file=sys.stderr)
    return EXIT_OK


def cmd_table1(args):
    if any(n < 2 for n in args.n):
        raise UsageError("--n values must be >= 2")
    if args.mc < 0:
        raise UsageError("--mc must be >= 0")
    fields = ["n", "m", "p", "detect", "display"]
    rows = []
    for r in geometry.table1(args.n):
        row = {"n": r.n, "m": r.m, "p": r.p, "detect": r.detect, "display": geometry.display_round(r.detect)}
        if args.mc:
            est, se = mc_detection_rate(r.n, r.m, args.mc, args.seed)
            row.update(mc=est, mc_se=se)
        rows.append(row)
    if args.mc:
        fields += ["mc", "mc_se"]
    write_rows(rows, fields, args.format, args.out)
    return EXIT_OK


def _gs_trials(job):
    n, seed, start, stop = job
    oracle = get_oracle(f"cone:{n}")
    params = GSParams()
    x0 = np.zeros(n)
    hits = zero_with = zero_without = 0
    for i in range(start, stop):
        rng = make_rng(seed, n, i)
        W, ys = gs_bundle(oracle, x0, params.eps, params.samples(n), rng, include_center=True)
        hits += bool(in_d2(ys).any())
        zero_with += min_norm_point(W).norm <= 1e-9
        zero_without += min_norm_point(W[1:]).norm <= 1e-9
    return hits, zero_with, zero_without


def gs_compare(dims, trials, seed, workers=1):
    """Per dimension: deterministic subgradient count and random-sampling rates at x0 = 0."""
    if trials < 1:
        raise InvalidArgument("trials must be >= 1")
    rows = []
    for n in dims:
        if n < 2:
            raise InvalidArgument("dimensions must be >= 2")
        res, stats = descent_direction(get_oracle(f"cone:{n}"), np.zeros(n), DescentParams())
        step = max(1, -(-trials // max(1, workers)))
        jobs = [(n, seed, s, min(s + step, trials)) for s in range(0, trials, step)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as ex:
                parts = list(ex.map(_gs_trials, jobs))
        else:
            parts = [_gs_trials(j) for j in jobs]
        hits, zw, zo = (sum(p[i] for p in parts) for i in range(3))
        rows.append({
            "n": n,
            "det_subgrads": stats.n_subgrad,
            "det_critical": int(isinstance(res, EpsCritical)),
            "gs_d2_hit_rate": hits / trials,
            "gs_d2_hit_se": float(np.sqrt(hits / trials * (1 - hits / trials) / trials)),
            "gs_vzero_rate": zw / trials,
            "gs_vzero_rate_samples_only": zo / trials,
            "analytic": geometry.detection_probability(n, 2 * n),
        })
    return rows


def cmd_gs_compare(args):
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if any(n < 2 for n in args.dims):
        raise UsageError("--dims values must be >= 2")
    rows = gs_compare(args.dims, args.trials, args.seed, args.workers)
    write_rows(rows, list(rows[0]), args.format, args.out)
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "bisect-demo": cmd_bisect_demo,
    "table1": cmd_table1,
    "gs-compare": cmd_gs_compare,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidArgument) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (AlgorithmFailure, SolverFailure) as e:
        print(f"algorithm failure: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
