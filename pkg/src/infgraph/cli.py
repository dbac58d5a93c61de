"""Command line front end.

Exit codes: 0 success, 1 bad input or domain error, 2 a verification or
assertion failed, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .dirichlet import DirichletProblem, harnack_constant, solve_dirichlet
from .errors import DomainError, InconsistencyError, VerificationError
from .esa import LAPLACIAN, SHIFTED, esa_probe
from .graph import FamilySpec, FiniteGraph, build_family, combinatorial_ball, region
from .harmonic import build_harmonic, harnack_intervals
from .io import dump_json, open_output, parse_config, parse_function, read_edge_list, write_csv
from .metric import MetricContext, ball_distances, completeness_diagnostic, delta_a
from .operator import apply_laplacian, gauge_to_schrodinger
from .remarks import EXAMPLES, run_examples

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_DOMAIN, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# graph selection


def _add_graph_flags(p):
    g = p.add_argument_group("graph")
    g.add_argument("--family", help="half-line-power | half-line-log | half-line-table | binary-tree")
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--beta", type=float)
    g.add_argument("--epsilon", type=float, help="sets beta = -(2 + epsilon)")
    g.add_argument("--start", type=int)
    g.add_argument("--shift", type=float, default=0.0, help="c_n = (n + shift)**-beta")
    g.add_argument("--table", help="periodic rows 'omega c; omega c; ...'")
    g.add_argument("--graph-file", help="edge list with 'u v c' and 'w u omega' lines")
    g.add_argument("--config", help="family config file ('key = value' lines) or edge list")


def _add_common(p):
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--tol", type=float)
    p.add_argument("--n-max", type=int)
    p.add_argument("--seed", type=int, default=0, help="echoed in reports; all pipelines are deterministic")


def _family_spec(args) -> FamilySpec | None:
    if args.family is None:
        return None
    table = ()
    if args.table:
        table = tuple(tuple(float(x) for x in row.split()) for row in args.table.split(";"))
    return FamilySpec(args.family, alpha=args.alpha, beta=args.beta, epsilon=args.epsilon,
                      start=args.start, shift=args.shift, table=table)


def _graph(args):
    """Returns ``(graph, spec or None)``."""
    sources = [x for x in (args.family, args.graph_file, args.config) if x is not None]
    if len(sources) != 1:
        raise DomainError("give exactly one of --family, --graph-file, --config")
    if args.graph_file:
        return read_edge_list(args.graph_file), None
    if args.config:
        parsed = parse_config(Path(args.config).read_text(encoding="utf-8"))
        if isinstance(parsed, FiniteGraph):
            return parsed, None
        return build_family(parsed), parsed
    spec = _family_spec(args)
    return build_family(spec), spec


def _spec_of(args) -> FamilySpec:
    _, spec = _graph(args)
    if spec is None:
        raise DomainError("this command needs a family, not an edge list")
    return spec


def _default_range(g, args, default=20):
    if isinstance(g, FiniteGraph):
        return g.vertices
    start = getattr(g, "start", 1)
    return list(range(start, (args.n_max or start + default - 1) + 1))


def _emit(args, fmt_default, table=None, report=None):
    fmt = args.format or fmt_default
    with open_output(args.out) as fh:
        if fmt == "csv":
            if table is None:
                raise DomainError("this command has no CSV form; use --format json")
            header, rows = table
            write_csv(fh, header, rows)
        else:
            fh.write(dump_json(report if report is not None else {"header": table[0], "rows": table[1]}))


# ---------------------------------------------------------------------------
# commands


def cmd_laplacian(args):
    g, _ = _graph(args)
    if args.function:
        f = parse_function(Path(args.function).read_text(encoding="utf-8"))
    else:
        f = {x: 1.0 for x in _default_range(g, args)}
    pts = sorted(set(f) | {y for x in f for y in g.neighbors(x)})
    rows = [(x, f.get(x, 0.0), apply_laplacian(g, f, x)) for x in pts]
    _emit(args, "csv", (("vertex", "f", "laplacian_f"), rows))


def cmd_gauge(args):
    g, spec = _graph(args)
    s = gauge_to_schrodinger(g)
    rows = []
    for x in _default_range(g, args):
        nbrs = sorted(g.neighbors(x))
        nxt = [y for y in nbrs if y > x]
        rows.append((x, g.omega(x), s.W(x), nxt[0] if nxt else "", s.a(x, nxt[0]) if nxt else ""))
    report = {"family": spec.as_dict() if spec else "edge-list",
              "rows": [dict(zip(("vertex", "omega", "W", "next", "a_next"), r)) for r in rows]}
    _emit(args, "csv", (("vertex", "omega", "W", "next", "a_next"), rows), report)


def cmd_harmonic(args):
    g, spec = _graph(args)
    s = gauge_to_schrodinger(g)
    x0 = args.x0 if args.x0 is not None else getattr(g, "start", 1)
    prof = build_harmonic(s, x0, args.n_max or 200, args.window, tol=args.tol or 1e-8)
    intervals = harnack_intervals(s, prof) if prof.history else []
    rows = [(x, prof.values[x]) for x in sorted(prof.values)]
    report = {
        "family": spec.as_dict() if spec else "edge-list",
        "anchor": x0, "window": args.window, "n_max": args.n_max or 200, "tol": prof.tol,
        "converged": prof.converged, "accepted": prof.accepted, "iterations": len(prof.history),
        "residual": prof.residual, "residual_tol": prof.residual_tol,
        "phi": {str(x): v for x, v in rows},
        "harnack_within": all(i.within for i in intervals),
        "harnack": [{"vertex": i.vertex, "n0": i.n0, "d": i.d, "k": i.k, "within": i.within} for i in intervals],
    }
    _emit(args, "json", (("vertex", "phi"), rows), report)
    if args.history:
        with open_output(args.history) as fh:
            write_csv(fh, ("n", "vertex", "phi_n"),
                      ((n, x, vals[x]) for n, vals in prof.history for x in sorted(vals)))
    if not prof.accepted:
        return EXIT_VERIFY
    return EXIT_OK


def cmd_dirichlet(args):
    g, _ = _graph(args)
    s = gauge_to_schrodinger(g)
    if args.region:
        verts = [int(v) for v in args.region.replace(",", " ").split()]
        reg = region(g, verts)
    else:
        x0 = args.x0 if args.x0 is not None else getattr(g, "start", 1)
        reg = combinatorial_ball(g, x0, args.radius)
    if args.boundary:
        u = parse_function(Path(args.boundary).read_text(encoding="utf-8"))
    else:
        u = {b: args.boundary_value for b in reg.boundary}
    f = solve_dirichlet(DirichletProblem(s, reg, u))
    cert = harnack_constant(s, reg)
    rows = [(x, f[x], int(x in reg.interior)) for x in sorted(f)]
    report = {"rows": [{"vertex": x, "value": v, "interior_flag": k} for x, v, k in rows], "harnack_k0": cert.k0}
    _emit(args, "csv", (("vertex", "value", "interior_flag"), rows), report)


def cmd_metric(args):
    g, spec = _graph(args)
    if args.action == "completeness":
        spec = spec or _spec_of(args)
        rep = completeness_diagnostic(spec, n_probe=args.n_max or 100_000)
        ns = range(rep.start, rep.start + len(rep.partial_sums))
        rows = list(zip(ns, rep.partial_sums.tolist()))
        sample = sorted({rep.start + i for i in (0, 1, 2, 5, 10, 100, 1000, 10_000, 100_000, 1_000_000)
                         if i < len(rep.partial_sums)} | {ns[-1]})
        report = {"family": spec.as_dict(), "n_probe": ns[-1], "verdict": rep.verdict,
                  "numeric_verdict": rep.numeric_verdict, "closed_form_verdict": rep.closed_form_verdict,
                  "details": rep.details, "s_n": {str(n): rep.s(n) for n in sample}}
        _emit(args, "json", (("n", "s_n"), rows), report)
        return EXIT_OK
    ctx = MetricContext.from_graph(g)
    if args.action == "distance":
        if args.src is None or args.dst is None:
            raise DomainError("metric distance needs --from and --to")
        d = delta_a(ctx, args.src, args.dst)
        if args.format == "json":
            _emit(args, "json", report={"from": args.src, "to": args.dst, "distance": d})
        else:
            with open_output(args.out) as fh:
                fh.write(f"{d!r}\n")
        return EXIT_OK
    if args.radius is None:
        raise DomainError("metric ball needs --radius")
    x0 = args.x0 if args.x0 is not None else getattr(g, "start", 1)
    dist = ball_distances(ctx, x0, args.radius)
    rows = [(x, dist[x]) for x in sorted(dist)]
    _emit(args, "csv", (("vertex", "distance"), rows),
          {"x0": x0, "radius": args.radius, "ball": {str(x): d for x, d in rows}})
    return EXIT_OK


def cmd_esa(args):
    spec = _spec_of(args)
    radii = [float(r) for r in args.radii.replace(",", " ").split()] if args.radii else range(3, 11)
    rep = esa_probe(spec, args.mode, N=args.n_max or 2000, radii=radii)
    sol = rep.solution
    rows = list(zip(sol.indices.tolist(), sol.values.tolist(), sol.partial_l2.tolist()))
    report = {
        "family": rep.family, "mode": rep.mode, "lambda": rep.lam, "N": rep.N,
        "classification": rep.classification, "evidence": rep.verdict.details,
        "log_partial_l2": rep.verdict.log_partial, "log_threshold": rep.verdict.log_threshold,
        "form_bound": rep.form_bound, "W_min": rep.w_min, "W_bounded_below": rep.w_bounded_below,
        "completeness": rep.completeness,
        "witness_length": None if rep.witness is None else len(rep.witness),
        "witness_head": None if rep.witness is None else rep.witness[:20],
        "certificates": [c.__dict__ for c in rep.certificates],
        "notes": rep.notes,
    }
    _emit(args, "json", (("n", "v", "partial_l2"), rows), report)
    violated = [c.R for c in rep.certificates if not (c.lower_holds and c.transition_holds)]
    return EXIT_VERIFY if violated else EXIT_OK


def cmd_examples(args):
    rec = run_examples(args.name)
    _emit(args, "json", report=rec.as_dict(include_time=args.timing))
    if not rec.passed:
        print(f"failed checks: {', '.join(rec.failures)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="infgraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"infgraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("laplacian", help="apply Delta_{omega,c} to a finitely supported function")
    p.add_argument("action", choices=("apply",))
    p.add_argument("--function", help="file of 'vertex value' lines (default: 1 on the range)")
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_laplacian)

    p = sub.add_parser("gauge", help="edge coefficients a and potential W of the equivalent operator")
    p.add_argument("action", choices=("to-schrodinger",))
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_gauge)

    p = sub.add_parser("harmonic", help="positive harmonic function by ball exhaustion")
    p.add_argument("action", choices=("build",))
    p.add_argument("--x0", type=int)
    p.add_argument("--window", type=int, default=30)
    p.add_argument("--history", help="also write the n,vertex,phi_n history CSV here")
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_harmonic)

    p = sub.add_parser("dirichlet", help="solve P f = 0 inside a region with given boundary values")
    p.add_argument("action", choices=("solve",))
    p.add_argument("--region", help="vertex list; default is the ball of --radius around --x0")
    p.add_argument("--x0", type=int)
    p.add_argument("--radius", type=int, default=3)
    p.add_argument("--boundary", help="file of 'vertex value' lines")
    p.add_argument("--boundary-value", type=float, default=1.0)
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_dirichlet)

    p = sub.add_parser("metric", help="distances, balls and completeness for edge lengths 1/sqrt(a)")
    p.add_argument("action", choices=("distance", "ball", "completeness"))
    p.add_argument("--from", dest="src", type=int)
    p.add_argument("--to", dest="dst", type=int)
    p.add_argument("--x0", type=int)
    p.add_argument("--radius", type=float)
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_metric)

    p = sub.add_parser("esa", help="deficiency recurrence probe on a half-line family")
    p.add_argument("action", choices=("probe",))
    p.add_argument("--mode", choices=(LAPLACIAN, SHIFTED), default=LAPLACIAN)
    p.add_argument("--radii", help="cutoff radii for sandwich certificates (default 3..10)")
    _add_graph_flags(p), _add_common(p)
    p.set_defaults(run=cmd_esa)

    p = sub.add_parser("examples", help="run a worked example and check its closed-form facts")
    p.add_argument("name", choices=tuple(EXAMPLES))
    p.add_argument("--timing", action="store_true", help="include wall time (makes output non-deterministic)")
    _add_common(p)
    p.set_defaults(run=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.run(args)
    except (VerificationError, InconsistencyError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if code is None else code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
