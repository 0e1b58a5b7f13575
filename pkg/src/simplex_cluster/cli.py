"""Command-line interface: ``simplex-cluster <subcommand> [options]``.

Exit codes: 0 success, 1 usage or input error, 2 CM hit the iteration cap,
3 a theory check failed.
"""

import argparse
import sys

from . import io
from .cm import run_cm_restarts
from .datagen import PRESETS, generate, load_preset
from .exceptions import SimplexClusterError
from .model_selection import DEFAULT_ALPHA, DEFAULT_BETA, RegularizationParams, select_k
from .simplex import check_theta
from .theory import run_consistency, run_theory_checks

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED, EXIT_THEORY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_data(p, required_preset=False):
    src = p.add_mutually_exclusive_group(required=True)
    if not required_preset:
        src.add_argument("--input", help="CSV (rows normalised by their sums) or dataset JSON")
    src.add_argument("--preset", help=f"mixture preset name ({', '.join(PRESETS)}) or JSON path")
    p.add_argument("--n", type=int, help="sample size when generating from a preset")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")


def _add_fit(p):
    p.add_argument("--theta", type=float, default=1.0,
                   help="smoothing weight in [0, 1]; 1 disables smoothing (default: 1)")
    p.add_argument("--restarts", type=int, default=10, help="CM restarts per k (default: 10)")
    p.add_argument("--max-iterations", type=int, default=1000,
                   help="iteration cap per CM run (default: 1000)")
    p.add_argument("--init", choices=("farthest", "random"), default="farthest",
                   help="prototype seeding policy (default: farthest)")


def _add_output(p, default):
    p.add_argument("--output", default=default, help=f"output path (default: {default})")
    p.add_argument("--format", choices=("csv", "json"),
                   help="output format (default: from the output suffix)")


def build_parser():
    parser = _Parser(prog="simplex-cluster",
                     description="KL clustering of probability vectors.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="run CM for one k")
    _add_data(p)
    p.add_argument("--k", type=int, required=True, help="number of clusters")
    _add_fit(p)
    _add_output(p, "codebook.json")

    p = sub.add_parser("select-k", help="choose k by penalised risk")
    _add_data(p)
    p.add_argument("--kmin", type=int, default=1, help="smallest k (default: 1)")
    p.add_argument("--kmax", type=int, help="largest k (default: min(12, n))")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA,
                   help=f"minimum cluster proportion, in (0, 1) (default: {DEFAULT_ALPHA})")
    p.add_argument("--beta", type=float, default=DEFAULT_BETA,
                   help=f"minimum symmetric divergence between centers, > 0 (default: {DEFAULT_BETA})")
    p.add_argument("--enforce-constraints", action="store_true",
                   help="exclude k values whose clustering violates either constraint")
    _add_fit(p)
    _add_output(p, "selection.csv")

    p = sub.add_parser("gen", help="sample a dataset from a mixture preset")
    _add_data(p, required_preset=True)
    p.add_argument("--labels", help="also write generating component labels to this path")
    p.add_argument("--xy", help="also write the first two coordinates (for 2-D plots)")
    _add_output(p, "data.csv")

    p = sub.add_parser("consistency", help="min empirical risk along a sample-size schedule")
    p.add_argument("--preset", required=True, help="mixture preset name or JSON path")
    p.add_argument("--schedule", type=_int_list, default=[250, 500, 1000, 2000, 4000],
                   help="comma-separated increasing sample sizes")
    p.add_argument("--k", type=int, help="number of clusters (default: number of centers)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--heldout-n", type=int, default=100_000,
                   help="points per held-out reference replicate (default: 100000)")
    p.add_argument("--replicates", type=int, default=10,
                   help="held-out reference replicates (default: 10)")
    _add_fit(p)
    _add_output(p, "consistency.csv")

    p = sub.add_parser("check-theory", help="numerical checks of the ball/remainder geometry")
    p.add_argument("--m", type=_int_list, default=[2, 3, 5, 10],
                   help="comma-separated dimensions (default: 2,3,5,10)")
    p.add_argument("--grid", choices=("default",), default="default",
                   help="radius grid for the rho bracket (default: default)")
    p.add_argument("--trials", type=int, default=10_000, help="random trials per check")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")
    p.add_argument("--output", help="optional report path (.json or .csv)")
    p.add_argument("--format", choices=("csv", "json"), help="report format")
    return parser


def _check_fit(args):
    try:
        check_theta(args.theta)
    except SimplexClusterError as exc:
        raise UsageError(str(exc))
    if args.restarts < 1:
        raise UsageError("restarts must be ≥ 1")
    if args.max_iterations < 1:
        raise UsageError("max-iterations must be ≥ 1")


def _load_data(args):
    if getattr(args, "input", None):
        return io.load_dataset(args.input)
    spec = load_preset(args.preset, n=args.n, seed=args.seed)
    return generate(spec)


def cmd_cluster(args):
    if args.k < 1:
        raise UsageError("k must be ≥ 1")
    _check_fit(args)
    X = _load_data(args)
    res = run_cm_restarts(X, args.k, args.restarts, args.seed, args.init,
                          args.max_iterations, args.theta)
    io.export_codebook(res, args.output, args.format, seed=args.seed)
    print(f"k={args.k} n={len(X)} m={X.shape[1]} risk={res.risk:.6g} "
          f"iterations={res.trace.n_iter} {res.trace.reason} -> {args.output}")
    return EXIT_OK if res.trace.converged else EXIT_NONCONVERGED


def cmd_select_k(args):
    _check_fit(args)
    try:
        params = RegularizationParams(args.alpha, args.beta)
    except ValueError as exc:
        raise UsageError(str(exc))
    X = _load_data(args)
    kmax = min(12, len(X)) if args.kmax is None else args.kmax
    if not 1 <= args.kmin <= kmax <= len(X):
        raise UsageError(f"need 1 ≤ kmin ≤ kmax ≤ n = {len(X)}")
    report = select_k(X, range(args.kmin, kmax + 1), params, args.restarts, args.seed,
                      args.theta, args.enforce_constraints, args.max_iterations, args.init)
    io.export_report(report, args.output, args.format)
    for r in report.rows:
        print(f"k={r.k:3d} risk={r.risk:.6f} regularized={r.regularized_risk:.6f} "
              f"c1={'ok' if r.c1 else 'FAIL'} c2={'ok' if r.c2 else 'FAIL'}")
    if report.chosen_k is None:
        print("no k satisfies the constraints", file=sys.stderr)
        return EXIT_USAGE
    print(f"chosen k = {report.chosen_k}")
    return EXIT_OK


def cmd_gen(args):
    spec = load_preset(args.preset, n=args.n, seed=args.seed)
    X, labels = generate(spec, return_labels=True)
    io.export_dataset(X, args.output, args.format)
    if args.labels:
        io.write_text(args.labels, "\n".join(str(int(c)) for c in labels) + "\n")
    if args.xy:
        io.write_text(args.xy, io.matrix_to_csv(X[:, :2], header=["x1", "x2"]))
    print(f"wrote {len(X)}x{X.shape[1]} dataset -> {args.output}")
    return EXIT_OK


def cmd_consistency(args):
    _check_fit(args)
    spec = load_preset(args.preset, seed=args.seed)
    curve = run_consistency(spec, args.schedule, args.k, args.restarts, args.seed, args.theta,
                            args.heldout_n, args.replicates, args.max_iterations)
    io.export_report(curve, args.output, args.format)
    for r in curve.rows:
        print(f"n={r.n:6d} min_risk={r.min_empirical_risk:.6f} "
              f"heldout={r.heldout_risk:.6f} reference={r.reference_risk:.6f}")
    return EXIT_OK


def cmd_check_theory(args):
    if any(m < 2 for m in args.m):
        raise UsageError("every --m must be ≥ 2")
    report = run_theory_checks(tuple(args.m), args.trials, args.seed)
    if args.output:
        io.export_report(report, args.output, args.format)
    failed = [c for c in report.checks if not c["passed"]]
    print(f"{len(report.checks) - len(failed)}/{len(report.checks)} checks passed")
    for c in failed:
        print(f"FAILED {c['check']} {c['detail']}")
    return EXIT_OK if not failed else EXIT_THEORY


COMMANDS = {
    "cluster": cmd_cluster,
    "select-k": cmd_select_k,
    "gen": cmd_gen,
    "consistency": cmd_consistency,
    "check-theory": cmd_check_theory,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"simplex-cluster {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
