"""Command line interface: ``pdt <check-pd|threshold|counterexample|certify|gen>``.

Every command prints one JSON report (single line unless ``--pretty``).
Exit codes: 0 success, 2 bad input, 3 negative verdict, 4 construction
schedule exhausted.
"""

from __future__ import annotations

import argparse
import math
import os
import shlex
import sys
from pathlib import Path

from . import certificates as cert
from .counterexamples import build_cycle_counterexample
from .errors import PdtError, ScheduleExhausted
from .fileio import dumps, read_matrix, write_matrix
from .graphs import (
    SparsityGraph,
    cycle_graph,
    is_member_pg,
    path_graph,
    random_pg_matrix,
    random_tree,
    read_edge_list,
    star_graph,
    tight_pg_matrix,
    write_edge_list,
)
from .linalg import DEFAULT_TOL, cholesky_pd, lambda_min
from .thresholds import EntrywiseMap, apply_full, apply_offdiag, contraction_constant, graph_threshold

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NEGATIVE = 3
EXIT_EXHAUSTED = 4


class UsageError(PdtError):
    pass


def default_tol() -> float:
    env = os.environ.get("PDT_TOL")
    if env is None:
        return DEFAULT_TOL
    try:
        tol = float(env)
    except ValueError:
        raise UsageError(f"PDT_TOL is not a number: {env!r}") from None
    if not tol > 0:
        raise UsageError("PDT_TOL must be positive")
    return tol


def parse_alpha(text: str) -> float:
    value = math.inf if text.strip().lower() in ("inf", "infinity") else float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("alpha must be positive")
    return value


def positive_float(text: str) -> float:
    value = float(text)
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def load_map(spec: str) -> EntrywiseMap:
    """``--map`` accepts inline JSON or ``@path`` to a JSON file."""
    if spec.startswith("@"):
        try:
            spec = Path(spec[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read map file: {exc}") from None
    return EntrywiseMap.from_json(spec)


def _emit(report: dict, args) -> None:
    text = dumps(report, pretty=args.pretty)
    if getattr(args, "report", None):
        Path(args.report).write_text(text + "\n")
    else:
        print(text)


def _tol(args) -> float:
    return args.tol if args.tol is not None else default_tol()


def cmd_check_pd(args) -> int:
    A = read_matrix(args.matrix)
    v = cholesky_pd(A, _tol(args))
    report = {
        "is_pd": v.is_pd,
        "lambda_min": lambda_min(A),
        "n": A.n,
        "method": v.method,
        "tolerance": v.tolerance_used,
        "scale": v.scale,
    }
    _emit(report, args)
    return EXIT_NEGATIVE if args.expect_pd and not v.is_pd else EXIT_OK


def cmd_threshold(args) -> int:
    A = read_matrix(args.matrix)
    sources = [x is not None for x in (args.map, args.eps, args.graph)]
    if sum(sources) != 1:
        raise UsageError("give exactly one of --map, --eps, --graph")
    if args.graph is not None:
        G = read_edge_list(args.graph)
        out = graph_threshold(A, G)
        desc = {"graph": str(args.graph)}
    else:
        f = load_map(args.map) if args.map is not None else EntrywiseMap.soft(args.eps)
        out = apply_full(A, f) if args.full else apply_offdiag(A, f)
        desc = {"map": f.to_dict(), "full": bool(args.full)}
    tol = _tol(args)
    if args.out:
        write_matrix(out, args.out, comment="thresholded")
    after = cholesky_pd(out, tol)
    report = {
        **desc,
        "n": A.n,
        "lambda_min_before": lambda_min(A),
        "lambda_min_after": lambda_min(out),
        "is_pd_after": after.is_pd,
        "out": str(args.out) if args.out else None,
    }
    if not args.out:
        report["matrix"] = out.tolist()
    _emit(report, args)
    return EXIT_NEGATIVE if args.expect_pd and not after.is_pd else EXIT_OK


def cmd_counterexample(args) -> int:
    try:
        rep = build_cycle_counterexample(args.n, args.eps, args.max_doublings, _tol(args))
    except ScheduleExhausted as exc:
        _emit({"error": str(exc), "diagnostics": exc.diagnostics}, args)
        return EXIT_EXHAUSTED
    if args.out:
        write_matrix(rep.matrix, args.out, comment=f"cycle counterexample n={args.n} eps={args.eps}")
    report = rep.to_dict()
    if not args.steps:
        report.pop("steps", None)
    report["out"] = str(args.out) if args.out else None
    _emit(report, args)
    return EXIT_OK if rep.success else EXIT_NEGATIVE


_VERDICT_RANK = {cert.GUARANTEED: 2, cert.IMPOSSIBLE: 1, cert.NOT_GUARANTEED: 0}


def best_certificate(certs: list[cert.Certificate]) -> cert.Certificate:
    """Guaranteed beats impossible beats not-guaranteed; exact characterizations
    (no bound) rank first within a verdict, then larger bounds."""

    def key(c):
        b = math.inf if c.bound is None else c.bound
        return (_VERDICT_RANK[c.verdict], b)

    # the full-map rule speaks about f[A], not f*[A]; it only wins by default
    offdiag = [c for c in certs if c.rule != "abs-monotone-full"]
    return max(offdiag or certs, key=key)


def certify(f: EntrywiseMap, A=None, alpha=None, a=None, n=None, graph: SparsityGraph | None = None, tol=DEFAULT_TOL):
    """Run every applicable rule. Returns ``(certificates, skipped)`` where
    ``skipped`` maps rule names to the reason they could not be applied."""
    out: list[cert.Certificate] = []
    skipped: dict[str, str] = {}

    def attempt(rule, fn, *fargs):
        try:
            res = fn(*fargs)
        except PdtError as exc:
            skipped[rule] = str(exc)
            return
        for c in res if isinstance(res, list) else [res]:
            if all((c.rule, c.inputs_digest) != (d.rule, d.inputs_digest) for d in out):
                out.append(c)

    if alpha is None and A is None:
        alpha = math.inf
    if alpha is not None:
        attempt("abs-monotone-full", cert.characterize_full_map, f, alpha)
        attempt("xg-characterization", cert.characterize_offdiag_map, f, alpha)
        attempt("sparsity-impossible", cert.sparsity_impossibility, f, alpha)
    if n is not None:
        attempt("correlation-class", cert.correlation_class_certificate, f, n)
    if graph is not None:
        half_width = a if a is not None else alpha
        if half_width is None or math.isinf(half_width):
            skipped["degree-contraction"] = "needs a finite --a or --alpha"
        else:
            attempt(
                "degree-contraction",
                lambda: cert.degree_contraction_certificate(contraction_constant(f, half_width).constant, graph),
            )
    if A is not None:
        attempt("spectral-bound", cert.spectral_bound_certificates, f, A, tol)
        attempt("rho-bound", cert.rho_certificate, f, A, tol)
        attempt("cond-number", cert.cond_number_certificate, f, A, a, tol)
    return out, skipped


def cmd_certify(args) -> int:
    f = load_map(args.map)
    A = read_matrix(args.matrix) if args.matrix else None
    G = read_edge_list(args.graph) if args.graph else None
    certs, skipped = certify(f, A, args.alpha, args.a, args.n, G, _tol(args))
    if not certs:
        raise UsageError("no rule applies: " + "; ".join(f"{k}: {v}" for k, v in skipped.items()))
    best = best_certificate(certs)
    report = {"best": best.to_dict(), "attempted": [c.to_dict() for c in certs], "skipped": skipped}
    _emit(report, args)
    return EXIT_NEGATIVE if args.expect_pd and not best.guaranteed else EXIT_OK


def cmd_gen(args) -> int:
    kind, n, seed = args.kind, args.n, args.seed
    if n is None or n < 1:
        raise UsageError("--n must be a positive integer")
    if not args.out:
        raise UsageError("gen needs --out")
    report = {"kind": kind, "n": n, "seed": seed, "out": str(args.out)}
    if kind in ("tree", "cycle", "path", "star"):
        G = {"tree": lambda: random_tree(n, seed), "cycle": lambda: cycle_graph(n),
             "path": lambda: path_graph(n), "star": lambda: star_graph(n)}[kind]()
        write_edge_list(G, args.out)
        report["edges"] = G.m
    else:
        G = read_edge_list(args.graph) if args.graph else random_tree(n, seed)
        if G.n != n:
            raise UsageError(f"graph has {G.n} vertices but --n is {n}")
        M = tight_pg_matrix(G, seed, margin=args.margin) if args.margin else random_pg_matrix(G, seed)
        write_matrix(M, args.out, comment=f"member of P_G+ seed={seed}")
        report["edges"] = [list(e) for e in G.sorted_edges()]
        report["in_cone"] = is_member_pg(M, G, 0.0, _tol(args))
    _emit(report, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=positive_float, default=None, help="PD tolerance relative to max(1, max|a_ii|)")
    common.add_argument("--pretty", action="store_true", help="indent the JSON report")
    common.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")
    common.add_argument("--expect-pd", action="store_true", help="exit 3 if the outcome is not PD / not guaranteed")

    parser = argparse.ArgumentParser(prog="pdt", description="Entrywise thresholding of positive definite matrices.")
    parser.add_argument("--batch", type=Path, help="file with one pdt command line per row")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("check-pd", parents=[common], help="decide positive definiteness")
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--out", type=Path, dest="report", help="same as --report")
    p.set_defaults(func=cmd_check_pd)

    p = sub.add_parser("threshold", parents=[common], help="apply a map or a graph threshold")
    p.add_argument("--matrix", type=Path, required=True)
    p.add_argument("--map", help='JSON like {"kind":"soft","epsilon":0.1}, or @file')
    p.add_argument("--eps", type=positive_float, help="shorthand for soft thresholding at this level")
    p.add_argument("--graph", type=Path, help="edge list; keep only these off-diagonal entries")
    p.add_argument("--full", action="store_true", help="apply the map to the diagonal too")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("counterexample", parents=[common], help="cycle matrix whose soft threshold is not PD")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=positive_float, default=0.1)
    p.add_argument("--max-doublings", type=int, default=20)
    p.add_argument("--steps", action="store_true", help="include per-step trajectories")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("certify", parents=[common], help="certificates that a map preserves PD")
    p.add_argument("--map", required=True)
    p.add_argument("--matrix", type=Path)
    p.add_argument("--alpha", type=parse_alpha, help="entry bound for the class-level rules (R or inf)")
    p.add_argument("--a", type=positive_float, help="entry bound for the contraction-based rules")
    p.add_argument("--n", type=int, help="dimension for the correlation-class rule")
    p.add_argument("--graph", type=Path, help="edge list for the degree rule")
    p.add_argument("--out", type=Path, dest="report", help="same as --report")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("gen", parents=[common], help="generate graphs and P_G+ matrices")
    p.add_argument("--kind", choices=("tree", "cycle", "path", "star", "pg-matrix"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--graph", type=Path, help="sparsity graph for pg-matrix (default: random tree)")
    p.add_argument("--margin", type=positive_float, help="push lambda_min down to this value")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_gen)
    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.batch:
        return run_batch(args.batch)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except ScheduleExhausted as exc:
        print(f"pdt: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (PdtError, ValueError) as exc:
        print(f"pdt: {exc}", file=sys.stderr)
        return EXIT_INPUT


def run_batch(path: Path) -> int:
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        print(f"pdt: cannot read batch file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    worst = EXIT_OK
    for line in lines:
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        worst = max(worst, run(shlex.split(line)))
    return worst


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
